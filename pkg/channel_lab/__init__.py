# Imported at startup so that shared_task binds to the channel_lab app.
from .celery import app as celery_app

__all__ = ("celery_app",)
