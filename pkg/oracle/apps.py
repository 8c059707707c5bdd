"""
App configuration for the time-domain oracle
"""
from django.apps import AppConfig


class OracleConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'oracle'
    verbose_name = 'Time-Domain Oracle'
