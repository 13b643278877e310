from django.apps import AppConfig


class TitlekwConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'titlekw'
    verbose_name = 'Palabras clave de tipo en títulos'
