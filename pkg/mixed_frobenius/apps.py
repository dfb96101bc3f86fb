from django.apps import AppConfig


class MixedFrobeniusConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mixed_frobenius'
    verbose_name = 'Mixed Frobenius verification desk'
