from django.apps import AppConfig


class CodesigConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'codesig'
    verbose_name = 'Firmas de cambios de código'
