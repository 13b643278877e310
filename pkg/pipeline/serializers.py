from django.conf import settings
from rest_framework import serializers

from codesig.serializers import CodesigSettingsSerializer


class PathsSerializer(serializers.Serializer):
    """Rutas de entrada y salida; las relativas se resuelven contra el archivo de configuración."""

    issues = serializers.CharField(required=False)
    commits = serializers.CharField(required=False)
    embeddings = serializers.CharField(required=False)
    vocabulary = serializers.CharField(required=False)
    title_rules = serializers.CharField(required=False)
    architecture_map = serializers.CharField(required=False)
    patterns = serializers.CharField(required=False)
    keyword_clusters = serializers.CharField(required=False)
    confirmed = serializers.CharField(required=False)
    targets = serializers.ListField(child=serializers.CharField(), default=list)
    output_dir = serializers.CharField(required=False)


class GridField(serializers.ListField):
    """Rejilla [inicio, fin, paso] inclusiva."""

    child = serializers.FloatField()

    def __init__(self, **kwargs):
        super().__init__(min_length=3, max_length=3, **kwargs)

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)) or len(data) != 3:
            raise serializers.ValidationError('Se espera una lista [inicio, fin, paso]')
        start, stop, step = super().to_internal_value(data)
        if step <= 0 or stop < start:
            raise serializers.ValidationError('Se espera inicio ≤ fin y paso > 0')
        return [start, stop, step]


class ClusteringSerializer(serializers.Serializer):
    k_grid = GridField(required=False)
    damping_grid = GridField(required=False)
    ap_damping = serializers.FloatField(min_value=0.5, max_value=0.999, required=False)
    ap_max_iterations = serializers.IntegerField(min_value=2, required=False)
    ap_convergence_window = serializers.IntegerField(min_value=1, required=False)
    summary_min_size = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        defaults = settings.CHAINVULN['CLUSTERING']
        iterations = attrs.get('ap_max_iterations', defaults['AP_MAX_ITERATIONS'])
        window = attrs.get('ap_convergence_window', defaults['AP_CONVERGENCE_WINDOW'])
        if window >= iterations:
            raise serializers.ValidationError(
                {'ap_convergence_window': 'Debe ser menor que ap_max_iterations'}
            )
        return attrs


class ScanSerializer(serializers.Serializer):
    match_threshold = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)

    def validate_match_threshold(self, value):
        if value <= 0:
            raise serializers.ValidationError('El umbral debe estar en (0, 1]')
        return value


class PipelineConfigSerializer(serializers.Serializer):
    """Documento de configuración del pipeline."""

    schema_version = serializers.IntegerField()
    paths = PathsSerializer(required=False)
    filter = serializers.DictField(required=False)
    titles = serializers.DictField(required=False)
    clustering = ClusteringSerializer(required=False)
    codesig = CodesigSettingsSerializer(required=False)
    scan = ScanSerializer(required=False)

    def validate_schema_version(self, value):
        if value != 1:
            raise serializers.ValidationError(f"Versión de esquema no soportada: {value}")
        return value
