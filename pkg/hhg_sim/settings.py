"""
Floquet HHG Simulator - Django Settings
Numerical defaults and logging for the simulator apps and management commands
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only the management commands and the test runner use Django here; there is
# no request handling, but Django still insists on a key.
SECRET_KEY = config('SECRET_KEY', default='django-insecure-hhg-sim-key-not-used-for-requests')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Local apps
    'floquet',
    'oracle',
    'scenarios',
]

# No database: every computation is pure and results are written as files
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'floquet': {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False},
        'oracle': {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False},
        'scenarios': {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False},
    },
}

# Continuum and Floquet truncation defaults
HHG_CUTOFF_FACTOR = config('HHG_CUTOFF_FACTOR', default=10.0, cast=float)  # cutoff = factor * delta0
HHG_TRUNCATION_PAD = config('HHG_TRUNCATION_PAD', default=20, cast=int)  # M = ceil(a) + pad
HHG_WEAK_COUPLING_LIMIT = config('HHG_WEAK_COUPLING_LIMIT', default=0.1, cast=float)

# Branch-cut quadrature
HHG_BRANCH_TOLERANCE = config('HHG_BRANCH_TOLERANCE', default=1e-6, cast=float)
HHG_BRANCH_POINTS_PER_WIDTH = config('HHG_BRANCH_POINTS_PER_WIDTH', default=40, cast=int)

# Time-domain oracle
ORACLE_MODES = config('ORACLE_MODES', default=4000, cast=int)
ORACLE_DT = config('ORACLE_DT', default=0.005, cast=float)
ORACLE_STEP_TOLERANCE = config('ORACLE_STEP_TOLERANCE', default=1e-8, cast=float)
ORACLE_NORM_TOLERANCE = config('ORACLE_NORM_TOLERANCE', default=1e-8, cast=float)

# Output
HHG_OUTPUT_DIR = config('HHG_OUTPUT_DIR', default=str(BASE_DIR / 'output'))
