"""
Django settings for frobenius_lab project.

Configuration only: the project hosts the mixed_frobenius app and its
`frobenius` management command. There are no URL routes or web servers.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get("SECRET_KEY", "frobenius-lab-local")

DEBUG = bool(int(os.environ.get("DEBUG", default=0)))

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Our apps
    'mixed_frobenius',
]


# Database
# https://docs.djangoproject.com/en/4.2/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": os.environ.get("SQL_ENGINE", "django.db.backends.sqlite3"),
        "NAME": os.environ.get("SQL_DATABASE", BASE_DIR / "db.sqlite3"),
        "USER": os.environ.get("SQL_USER", "user"),
        "PASSWORD": os.environ.get("SQL_PASSWORD", "password"),
        "HOST": os.environ.get("SQL_HOST", "localhost"),
        "PORT": os.environ.get("SQL_PORT", "5432"),
    }
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Verification desk
FROBENIUS_DEFAULT_ORDER = int(os.environ.get("FROBENIUS_DEFAULT_ORDER", 4))
FROBENIUS_DEFAULT_SEED = int(os.environ.get("FROBENIUS_DEFAULT_SEED", 0))
FROBENIUS_DEFAULT_JOBS = int(os.environ.get("FROBENIUS_DEFAULT_JOBS", 1))
FROBENIUS_RANDOM_TRIALS = int(os.environ.get("FROBENIUS_RANDOM_TRIALS", 10))
FROBENIUS_REPORT_FORMAT = os.environ.get("FROBENIUS_REPORT_FORMAT", "text")
FROBENIUS_LOG_LEVEL = os.environ.get("FROBENIUS_LOG_LEVEL", "INFO")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'mixed_frobenius': {
            'handlers': ['console'],
            'level': FROBENIUS_LOG_LEVEL,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}
