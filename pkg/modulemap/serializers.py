from rest_framework import serializers

LAYERS = ['Policy', 'Peer', 'Network', 'UI', 'Other']


class ArchitectureEntrySerializer(serializers.Serializer):
    """Ruta de módulo asignada a un módulo y una capa."""

    path = serializers.CharField()
    module = serializers.CharField()
    layer = serializers.ChoiceField(choices=LAYERS)


class ArchitectureMapSerializer(serializers.Serializer):
    """Mapa de arquitectura de referencia."""

    generic_roots = serializers.DictField(
        child=serializers.ListField(child=serializers.CharField(), allow_empty=False)
    )
    unmapped_policy = serializers.ChoiceField(choices=['report', 'drop'], default='report')
    entries = ArchitectureEntrySerializer(many=True)
    overrides = serializers.DictField(child=serializers.CharField(), default=dict)
