from django.apps import AppConfig


class BoussinesqConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "boussinesq"
    verbose_name = "Boussinesq channel runs"
