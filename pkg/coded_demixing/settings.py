"""
Django settings for the coded_demixing project.

Deployment-specific values (DEBUG, DATABASES, log level) live in
local_settings.py; copy local_settings_sample.py to start one.
"""

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
import os

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'coded-demixing-development-key')

try:
    from .local_settings import *
except ImportError:
    from .local_settings_sample import *

# Application definition

INSTALLED_APPS = (
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'coded_demixing.ura',
)

MIDDLEWARE = (
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
    'django.middleware.security.SecurityMiddleware',
)

ROOT_URLCONF = 'coded_demixing.urls'
TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.contrib.auth.context_processors.auth',
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'coded_demixing.wsgi.application'

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

STATIC_URL = '/static/'
STATIC_ROOT = BASE_DIR + '/staticfiles/'

REST_FRAMEWORK = {
    'EXCEPTION_HANDLER': 'coded_demixing.ura.response.api_exception_handler',
    'DEFAULT_AUTHENTICATION_CLASSES': (),
    'DEFAULT_PERMISSION_CLASSES': (),
    'UNAUTHENTICATED_USER': None,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'coded_demixing': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Simulation defaults; scenario files may override the AMP knobs per run
DEMIXING = {
    'AMP_ITERATIONS': 15,
    'LIST_SLACK': 10,
    'EXTRACTION_BP_ROUNDS': 10,
    'DENOISER_BP_ROUNDS': 1,
    'BINID_POWER_FRACTION': 0.002,
    'SIC_KEEP_FRACTION': 0.7,
    'TAU_FLOOR': 1e-12,
    'WORKERS': WORKERS,
    'GRAPH_MAX_CHECK_DEGREE': 4,
    'GRAPH_MAX_TRIES': 1000,
    'RESULTS_DIR': RESULTS_DIR,
}
