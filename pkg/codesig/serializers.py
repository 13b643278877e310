import re

from rest_framework import serializers


class LanguageSerializer(serializers.Serializer):
    """Sintaxis léxica de un lenguaje."""

    suffixes = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    line_comments = serializers.ListField(child=serializers.CharField(), default=list)
    block_comment = serializers.ListField(
        child=serializers.CharField(), min_length=2, max_length=2, allow_null=True, default=None
    )
    string_quotes = serializers.ListField(child=serializers.CharField(max_length=1), default=list)
    import_patterns = serializers.ListField(child=serializers.CharField(), default=list)
    size_functions = serializers.DictField(child=serializers.ChoiceField(choices=['LEN', 'SIZE']), default=dict)
    error_functions = serializers.ListField(child=serializers.CharField(), default=list)
    nil_literals = serializers.ListField(child=serializers.CharField(), default=list)
    bool_literals = serializers.ListField(child=serializers.CharField(), default=list)
    condition_parens = serializers.BooleanField(default=False)

    def validate_import_patterns(self, value):
        for pattern in value:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise serializers.ValidationError(f"Patrón inválido '{pattern}': {exc}")
        return value


class CodesigSettingsSerializer(serializers.Serializer):
    """Sección 'codesig' de la configuración del pipeline."""

    languages = serializers.DictField(child=LanguageSerializer(), required=False)
    test_path_markers = serializers.ListField(child=serializers.CharField(), required=False)
    pairing_threshold = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    keep_numeric_atoms = serializers.BooleanField(required=False)
