"""
Cache helpers for exact simulation results.

Exact circuit probabilities and closed-form tables are pure functions of
their (frozen) inputs, so they are memoized in the default Django cache under
keys built from ``settings.CACHE_KEYS`` and a digest of the input's repr.
"""

import hashlib
import logging

from django.conf import settings
from django.core.cache import cache

logger = logging.getLogger(__name__)


def get_cache_key(key_template, *args):
    """
    Generate cache key from template.

    Example:
        get_cache_key('circuit:p1:{}', '3f2a...')
        # Returns: 'circuit:p1:3f2a...'
    """
    try:
        return key_template.format(*args) if args else key_template
    except (KeyError, IndexError) as e:
        logger.error(f"Error generating cache key: {e}")
        return None


def digest_key(value):
    """Stable sha1 digest of ``repr(value)``; floats repr round-trip exactly."""
    return hashlib.sha1(repr(value).encode('utf-8')).hexdigest()


def get_or_set_cache(cache_key, data_func, timeout=None):
    """
    Get data from cache or set it if not present.

    Args:
        cache_key: Key to look up
        data_func: Function to call if cache miss
        timeout: Cache timeout in seconds (None keeps the entry forever)

    Returns:
        Cached or freshly computed data
    """
    if cache_key is None:
        return data_func()

    data = cache.get(cache_key)

    if data is not None:
        logger.debug(f"Cache hit: {cache_key}")
        return data

    logger.debug(f"Cache miss: {cache_key}")
    data = data_func()
    cache.set(cache_key, data, timeout)
    return data


def clear_simulation_cache():
    """Drop every memoized probability and table."""
    try:
        cache.clear()
        logger.debug(f"Cleared simulation cache ({settings.CACHES['default']['LOCATION']})")
        return True
    except Exception as e:
        logger.error(f"Error clearing simulation cache: {e}")
        return False
