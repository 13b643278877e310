import re

from rest_framework import serializers


class TitleRulesSerializer(serializers.Serializer):
    """Reglas de limpieza de títulos."""

    module_prefix_window = serializers.IntegerField(min_value=1, default=3)
    special_token_patterns = serializers.ListField(child=serializers.CharField(), default=list)
    noun_phrases = serializers.ListField(child=serializers.CharField(), default=list)
    synonyms = serializers.DictField(child=serializers.CharField(), default=dict)

    def validate_special_token_patterns(self, value):
        for pattern in value:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise serializers.ValidationError(f"Patrón inválido '{pattern}': {exc}")
        return value


class PosVocabularySerializer(serializers.Serializer):
    """Lista semilla de verbos y preposiciones."""

    verbs = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    prepositions = serializers.ListField(child=serializers.CharField(), allow_empty=False)

    def validate(self, attrs):
        overlap = set(attrs['verbs']) & set(attrs['prepositions'])
        if overlap:
            raise serializers.ValidationError(
                f"Palabras en ambas listas: {', '.join(sorted(overlap))}"
            )
        return attrs
