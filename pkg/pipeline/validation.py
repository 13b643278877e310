"""Utilidades para convertir errores de serializers en rutas legibles."""


def first_error(errors, prefix=''):
    """Obtener (ruta, mensaje) del primer error de un serializer de DRF."""
    if isinstance(errors, dict):
        for name, detail in errors.items():
            if name == 'non_field_errors':
                return first_error(detail, prefix)
            path = f"{prefix}.{name}" if prefix else name
            found = first_error(detail, path)
            if found:
                return found
        return None
    if isinstance(errors, list):
        for index, detail in enumerate(errors):
            if isinstance(detail, (dict, list)):
                if not detail:
                    continue
                found = first_error(detail, f"{prefix}[{index}]")
                if found:
                    return found
            else:
                return prefix, str(detail)
        return None
    return prefix, str(errors)
