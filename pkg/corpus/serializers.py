from rest_framework import serializers


class HunkLineSerializer(serializers.Serializer):
    """Línea de un hunk en formato unificado."""

    marker = serializers.ChoiceField(choices=['+', '-', ' '])
    text = serializers.CharField(allow_blank=True, trim_whitespace=False)


class HunkSerializer(serializers.Serializer):
    """Hunk de un diff con su ruta de archivo."""

    file_path = serializers.CharField()
    header = serializers.CharField(allow_blank=True, trim_whitespace=False, default='')
    lines = HunkLineSerializer(many=True)


class IssueSerializer(serializers.Serializer):
    """Esquema de un issue o PR minado."""

    id = serializers.IntegerField(min_value=0)
    project = serializers.CharField()
    title = serializers.CharField(allow_blank=True, trim_whitespace=False)
    body = serializers.CharField(allow_blank=True, trim_whitespace=False, default='')
    labels = serializers.ListField(child=serializers.CharField(), default=list)
    event_commit_ids = serializers.ListField(child=serializers.CharField(), default=list)
    pr_commit_ids = serializers.ListField(child=serializers.CharField(), default=list)
    is_pr = serializers.BooleanField(default=False)


class CommitSerializer(serializers.Serializer):
    """Esquema de un commit con sus hunks."""

    id = serializers.RegexField(r'^[0-9a-fA-F]+$')
    project = serializers.CharField()
    title = serializers.CharField(allow_blank=True, trim_whitespace=False)
    message = serializers.CharField(allow_blank=True, trim_whitespace=False, default='')
    files = serializers.ListField(child=serializers.CharField(), default=list)
    hunks = HunkSerializer(many=True, default=list)

    def validate(self, attrs):
        if attrs['hunks'] and not attrs['files']:
            raise serializers.ValidationError({'files': 'Un commit con hunks debe listar sus archivos.'})
        return attrs


class DocumentSerializer(serializers.Serializer):
    """Cabecera versionada de los documentos del corpus."""

    schema_version = serializers.IntegerField()

    def validate_schema_version(self, value):
        if value != 1:
            raise serializers.ValidationError(f"Versión de esquema no soportada: {value}")
        return value
