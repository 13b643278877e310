from django.apps import AppConfig


class TextclusterConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'textcluster'
    verbose_name = 'Distancias y agrupamiento'
