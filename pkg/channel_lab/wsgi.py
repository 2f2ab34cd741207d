"""
WSGI config for the channel_lab project.

Serves the run-inspection API (``/api/runs/``) and the admin.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "channel_lab.settings")

application = get_wsgi_application()
