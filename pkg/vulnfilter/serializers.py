from rest_framework import serializers


class KeywordGroupField(serializers.ListField):
    child = serializers.CharField()


class FilterConfigSerializer(serializers.Serializer):
    """Configuración de las etapas S0–S4b."""

    source_suffixes = serializers.DictField(
        child=serializers.ListField(child=serializers.CharField(), allow_empty=False)
    )
    test_path_markers = serializers.ListField(child=serializers.CharField(), default=list)
    include_labels = serializers.ListField(child=serializers.CharField(), default=list)
    title_prefix_markers = serializers.ListField(child=serializers.CharField(), default=list)
    exclude_labels = serializers.ListField(child=serializers.CharField(), default=list)
    include_keywords = serializers.ListField(child=KeywordGroupField(allow_empty=False), default=list)
    exclude_keywords = serializers.ListField(child=KeywordGroupField(allow_empty=False), default=list)
    min_word_frequency = serializers.IntegerField(min_value=1, default=2)
    similarity_threshold = serializers.FloatField(min_value=-1.0, max_value=1.0, default=0.6)

    def validate(self, attrs):
        shared = {label.lower() for label in attrs['include_labels']} & {
            label.lower() for label in attrs['exclude_labels']
        }
        if shared:
            raise serializers.ValidationError(
                {'exclude_labels': f"Etiquetas a la vez incluidas y excluidas: {', '.join(sorted(shared))}"}
            )
        included = {word for group in attrs['include_keywords'] for word in group}
        excluded = {word for group in attrs['exclude_keywords'] for word in group}
        if included & excluded:
            raise serializers.ValidationError(
                {'exclude_keywords': f"Palabras a la vez incluidas y excluidas: {', '.join(sorted(included & excluded))}"}
            )
        return attrs
