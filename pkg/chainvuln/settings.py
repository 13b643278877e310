"""
Django settings for the chainvuln project.

The project has no HTTP surface: every pipeline step is a management
command (``manage.py ingest``, ``filter``, ``modules``, ``types``,
``signatures``, ``cluster`` and ``scan``).

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
from decouple import config
import dj_database_url

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-chainvuln-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
DJANGO_APPS = [
    'django.contrib.contenttypes',
]

THIRD_PARTY_APPS = [
    'rest_framework',
]

LOCAL_APPS = [
    'pipeline',
    'corpus',
    'vulnfilter',
    'modulemap',
    'titlekw',
    'textcluster',
    'codesig',
    'patscan',
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# Database
DATABASES = {
    'default': dj_database_url.config(
        default=config('DATABASE_URL', default=f'sqlite:///{BASE_DIR / "db.sqlite3"}'),
        conn_max_age=600,
    )
}

# Internationalization
LANGUAGE_CODE = 'es-es'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ===========================
# LOGGING
# ===========================
LOG_DIR = BASE_DIR / 'logs'
LOG_LEVEL = config('CHAINVULN_LOG_LEVEL', default='INFO')
LOG_TO_FILE = config('CHAINVULN_LOG_TO_FILE', default=False, cast=bool)

PIPELINE_LOGGERS = [
    'pipeline', 'corpus', 'vulnfilter', 'modulemap',
    'titlekw', 'textcluster', 'codesig', 'patscan',
]

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        **{
            name: {
                'handlers': ['console'],
                'level': LOG_LEVEL,
                'propagate': False,
            }
            for name in PIPELINE_LOGGERS
        },
    },
}

if LOG_TO_FILE:
    LOG_DIR.mkdir(exist_ok=True)
    LOGGING['handlers']['file'] = {
        'level': 'INFO',
        'class': 'logging.FileHandler',
        'filename': LOG_DIR / 'chainvuln.log',
        'formatter': 'verbose',
    }
    for name in PIPELINE_LOGGERS:
        LOGGING['loggers'][name]['handlers'].append('file')

# ===========================
# CUSTOM SETTINGS
# ===========================

# Valores por defecto de la línea de comandos
CHAINVULN_CONFIG = config('CHAINVULN_CONFIG', default='')
CHAINVULN_OUTPUT_DIR = config('CHAINVULN_OUTPUT_DIR', default='out')
CHAINVULN_JOBS = config('CHAINVULN_JOBS', default=1, cast=int)
CHAINVULN_PERSIST = config('CHAINVULN_PERSIST', default=False, cast=bool)

# Parámetros por defecto de cada etapa
CHAINVULN = {
    'FILTER': {
        'MIN_WORD_FREQUENCY': 2,
        'KEYWORD_SIMILARITY_THRESHOLD': 0.6,
    },
    'TITLES': {
        'MODULE_PREFIX_WINDOW': 3,
    },
    'CLUSTERING': {
        'K_GRID': (25, 225, 2),
        'DAMPING_GRID': (0.50, 0.99, 0.01),
        'AP_DAMPING': 0.78,
        'AP_MAX_ITERATIONS': 200,
        'AP_CONVERGENCE_WINDOW': 15,
        'SUMMARY_MIN_SIZE': 10,
    },
    'CODESIG': {
        'PAIRING_THRESHOLD': 0.5,
        'KEEP_NUMERIC_ATOMS': False,
        'TEST_PATH_MARKERS': ('test/', 'tests/', '_test.go', '/test_', 'qa/rpc-tests/'),
    },
    'SCAN': {
        'MATCH_THRESHOLD': 0.8,
    },
}
