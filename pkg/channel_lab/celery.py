"""
Celery configuration for channel_lab.

Workers execute one simulation run per task; parameter sweeps fan out
over worker processes with disjoint output directories.
"""

import os
from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "channel_lab.settings")

app = Celery("channel_lab")

# All celery-related settings use the CELERY_ prefix in settings.py.
app.config_from_object("django.conf:settings", namespace="CELERY")

app.autodiscover_tasks()
