"""
Persistent cache for expensive exact searches.

Rankin minima of a lattice depend only on its Gram matrix, so they are
memoized on disk keyed by the canonical serialization of the Gram matrix.

Improvements over an in-memory dict:
- survives between CLI invocations and batch runs
- size limit with LRU eviction
- expiry so stale entries from older releases disappear
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import diskcache

logger = logging.getLogger(__name__)

# bump when the stored payload layout changes
CACHE_SCHEMA = 1


class CacheManager:
    """Disk cache for Rankin profiles with size limits and expiry."""

    DEFAULT_SIZE_LIMIT = 500 * 1024 * 1024

    def __init__(
        self,
        cache_dir: str = "./cache",
        expiry_days: int = 7,
        size_limit: int = DEFAULT_SIZE_LIMIT
    ):
        """
        Args:
            cache_dir: Directory for cache storage
            expiry_days: Number of days before entries expire
            size_limit: Maximum cache size in bytes
        """
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(exist_ok=True, parents=True)

        self.rankin_cache = diskcache.Cache(
            str(self.cache_dir / "rankin_profiles"),
            size_limit=size_limit,
            eviction_policy='least-recently-used'
        )
        self.expiry_seconds = expiry_days * 24 * 3600

        logger.info(f"Cache initialized at {cache_dir} with {expiry_days} day expiry")

    def _generate_key(self, data: Dict[str, Any]) -> str:
        """Generate cache key from data dictionary."""
        sorted_data = json.dumps({"schema": CACHE_SCHEMA, **data}, sort_keys=True)
        return hashlib.md5(sorted_data.encode()).hexdigest()

    def get_profile(self, lattice_key: Dict[str, Any], rank: int) -> Optional[Dict[str, Any]]:
        """
        Get a cached Rankin minimum.

        Args:
            lattice_key: Canonical serialization of the lattice
            rank: Sublattice rank k

        Returns:
            Stored payload ({"det", "basis", "radius", "certified"}) or None
        """
        try:
            cache_key = self._generate_key({"lattice": lattice_key, "rank": rank})
            result = self.rankin_cache.get(cache_key)
            if result is not None:
                logger.debug(f"Cache hit for rank-{rank} minimum (key: {cache_key[:8]}...)")
            return result
        except Exception as e:
            logger.error(f"Error reading Rankin cache: {e}")
            return None

    def set_profile(self, lattice_key: Dict[str, Any], rank: int, payload: Dict[str, Any]) -> None:
        """Store a Rankin minimum payload."""
        try:
            cache_key = self._generate_key({"lattice": lattice_key, "rank": rank})
            self.rankin_cache.set(cache_key, payload, expire=self.expiry_seconds)
            logger.debug(f"Cached rank-{rank} minimum (key: {cache_key[:8]}...)")
        except Exception as e:
            logger.error(f"Error writing Rankin cache: {e}")

    def get_cache_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        try:
            hits, misses = self.rankin_cache.stats(enable=True)
            return {
                "rankin_cache": {
                    "size": len(self.rankin_cache),
                    "bytes": self.rankin_cache.volume(),
                    "hits": hits,
                    "misses": misses,
                    "size_limit_mb": self.rankin_cache.size_limit / (1024 * 1024)
                }
            }
        except Exception as e:
            logger.error(f"Error getting cache stats: {e}")
            return {"rankin_cache": {"size": 0, "bytes": 0}, "error": str(e)}

    def clear_cache(self) -> None:
        self.rankin_cache.clear()

    def cleanup_expired(self) -> int:
        """Remove expired entries. Returns number of entries removed."""
        return self.rankin_cache.expire()


_cache_manager: Optional[CacheManager] = None


def get_cache_manager() -> CacheManager:
    """Get or create global cache manager instance."""
    global _cache_manager

    if _cache_manager is None:
        from .config import get_config

        cache = get_config().cache
        _cache_manager = CacheManager(
            cache.cache_dir,
            cache.expiry_days,
            cache.size_limit_mb * 1024 * 1024
        )

    return _cache_manager
