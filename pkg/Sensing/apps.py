from django.apps import AppConfig


class SensingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'Sensing'
    verbose_name = 'ZNE magnetometry simulation'
