from django.apps import AppConfig


class UraConfig(AppConfig):
    name = 'coded_demixing.ura'
    verbose_name = 'Unsourced random access'
