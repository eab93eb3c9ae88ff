from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Command-line only project: no sessions, cookies or signed data.
SECRET_KEY = 'magnetometry-offline-simulation'
DEBUG = False
ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Your apps
    'Sensing',
]

# No database: every artifact is a file under ZNE_OUTPUT_DIR
DATABASES = {}

# ===============================
# Caching Configuration
# ===============================
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'magnetometry-circuit-cache',
        'TIMEOUT': None,  # exact probabilities never go stale
        'OPTIONS': {
            'MAX_ENTRIES': 20000,
            'CULL_FREQUENCY': 3,
        }
    },
}

# Cache key prefixes for different data types
CACHE_KEYS = {
    'circuit_probability': 'circuit:p1:{}',
    'closed_form_table': 'analytic:table:{}',
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ===============================
# Simulation defaults
# ===============================
ZNE_OUTPUT_DIR = Path(config('ZNE_OUTPUT_DIR', default=str(BASE_DIR / 'results')))
ZNE_DEFAULT_SEED = 42
ZNE_DEFAULT_SHOTS = 10_000
ZNE_DESK_TRIALS = 500
ZNE_FULL_SCALE_TRIALS = 5000
ZNE_GATE_TIME_FRACTION = 0.05  # ALT gate time as a fraction of the segment time
ZNE_EXPONENTIAL_RATE_BOUND = 5.0
ZNE_FIT_MAX_EVALUATIONS = 500
ZNE_CSV_SCHEMA = 'zne-csv/1'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'null': {
            'class': 'logging.NullHandler',
        },
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'Sensing': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
    'root': {
        'handlers': ['null'],
        'level': 'WARNING',
    },
}
