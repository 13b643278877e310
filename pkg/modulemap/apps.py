from django.apps import AppConfig


class ModulemapConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'modulemap'
    verbose_name = 'Módulos y capas de arquitectura'
