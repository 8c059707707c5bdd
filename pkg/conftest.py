import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'hhg_sim.settings')
django.setup()
