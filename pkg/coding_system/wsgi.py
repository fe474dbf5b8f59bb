"""
WSGI config for coding_system project.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'coding_system.settings')

application = get_wsgi_application()
