from django.apps import AppConfig


class VulnfilterConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'vulnfilter'
    verbose_name = 'Filtrado de vulnerabilidades'
