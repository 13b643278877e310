from django.apps import AppConfig


class PatscanConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'patscan'
    verbose_name = 'Detección de clones vulnerables'
