import re

from rest_framework import serializers


class SignatureField(serializers.CharField):
    """Firma escrita como tokens separados por espacios."""

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        tokens = tuple(value.split())
        if not tokens:
            raise serializers.ValidationError('La firma no puede estar vacía.')
        return tokens


class PatternSerializer(serializers.Serializer):
    """Un patrón vulnerable: dónde buscar y qué firmas comparar."""

    id = serializers.RegexField(r'^[A-Za-z][\w-]*$')
    description = serializers.CharField()
    provenance = serializers.CharField()
    file_globs = serializers.ListField(child=serializers.CharField(), default=list)
    function_patterns = serializers.ListField(child=serializers.CharField(), default=list)
    anchor_signature = SignatureField()
    vulnerable_signature = SignatureField()
    patched_signature = SignatureField()
    match_threshold = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)

    def validate_function_patterns(self, value):
        for pattern in value:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise serializers.ValidationError(f"Patrón inválido '{pattern}': {exc}")
        return value

    def validate_match_threshold(self, value):
        if value <= 0.0:
            raise serializers.ValidationError('El umbral debe ser mayor que 0.')
        return value

    def validate(self, attrs):
        if not attrs['file_globs'] and not attrs['function_patterns']:
            raise serializers.ValidationError('Se necesita al menos un glob de archivo o un patrón de función.')
        return attrs


class PatternFileSerializer(serializers.Serializer):
    schema_version = serializers.ChoiceField(choices=[1], default=1)
    patterns = serializers.ListField(child=PatternSerializer(), default=list)
