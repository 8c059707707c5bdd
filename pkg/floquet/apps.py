"""
App configuration for Floquet spectral analysis
"""
from django.apps import AppConfig


class FloquetConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'floquet'
    verbose_name = 'Floquet Spectral Analysis'
