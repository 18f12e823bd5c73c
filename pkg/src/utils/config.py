"""
Configuration management module with validation.

Provides centralized configuration for enumeration budgets, caching, batch
concurrency and logging, read from environment variables (and `.env`) with
default values.
"""
import os
import logging
from fractions import Fraction
from typing import Optional, Dict, Any
from dataclasses import dataclass, replace
from dotenv import load_dotenv

from .errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class EnumerationConfig:
    """Budgets and radius policy for the exact searches."""
    budget_nodes: int = 10_000_000
    rank_cap: int = 9
    uncertified_radius: Optional[Fraction] = None  # multiplier on the certified radius
    time_budget_seconds: Optional[float] = None


@dataclass
class CacheConfig:
    """Configuration for caching."""
    enabled: bool = False
    cache_dir: str = "./cache"
    expiry_days: int = 7
    size_limit_mb: int = 500


@dataclass
class BatchConfig:
    """Configuration for the batch runner."""
    threads: int = 1
    report_path: Optional[str] = None


@dataclass
class LogConfig:
    """Configuration for logging."""
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None


def _optional_fraction(raw: Optional[str]) -> Optional[Fraction]:
    if raw is None or raw.strip() == "":
        return None
    return Fraction(raw.strip())


def _optional_float(raw: Optional[str]) -> Optional[float]:
    if raw is None or raw.strip() == "":
        return None
    return float(raw)


@dataclass
class AppConfig:
    """Main application configuration."""
    enumeration: EnumerationConfig
    cache: CacheConfig
    batch: BatchConfig
    log: LogConfig

    @classmethod
    def from_env(cls) -> "AppConfig":
        """
        Load configuration from environment variables.

        Returns:
            AppConfig instance (not yet validated)
        """
        load_dotenv()

        try:
            enumeration = EnumerationConfig(
                budget_nodes=int(os.getenv("SLOPEFORGE_BUDGET_NODES", "10000000")),
                rank_cap=int(os.getenv("SLOPEFORGE_RANK_CAP", "9")),
                uncertified_radius=_optional_fraction(os.getenv("SLOPEFORGE_UNCERTIFIED_RADIUS")),
                time_budget_seconds=_optional_float(os.getenv("SLOPEFORGE_TIME_BUDGET"))
            )

            cache = CacheConfig(
                enabled=os.getenv("SLOPEFORGE_CACHE_ENABLED", "false").lower() == "true",
                cache_dir=os.getenv("SLOPEFORGE_CACHE_DIR", "./cache"),
                expiry_days=int(os.getenv("SLOPEFORGE_CACHE_EXPIRY_DAYS", "7")),
                size_limit_mb=int(os.getenv("SLOPEFORGE_CACHE_SIZE_LIMIT_MB", "500"))
            )

            batch = BatchConfig(
                threads=int(os.getenv("SLOPEFORGE_THREADS", "1")),
                report_path=os.getenv("SLOPEFORGE_REPORT_PATH")
            )
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigurationError(f"Malformed environment setting: {e}") from e

        log = LogConfig(
            level=os.getenv("LOG_LEVEL", "WARNING"),
            format=os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
            file=os.getenv("LOG_FILE")
        )

        return cls(enumeration=enumeration, cache=cache, batch=batch, log=log)

    def validate(self) -> Dict[str, Any]:
        """
        Validate configuration and return validation results.

        Returns:
            Dictionary with validation results and warnings
        """
        results = {
            "valid": True,
            "errors": [],
            "warnings": []
        }

        if self.enumeration.budget_nodes <= 0:
            results["valid"] = False
            results["errors"].append("SLOPEFORGE_BUDGET_NODES must be positive")

        if self.enumeration.rank_cap < 1:
            results["valid"] = False
            results["errors"].append("SLOPEFORGE_RANK_CAP must be at least 1")
        elif self.enumeration.rank_cap > 16:
            results["warnings"].append(
                f"Rank cap {self.enumeration.rank_cap} is far beyond desk scale; "
                "tensor enumerations may not finish."
            )

        radius = self.enumeration.uncertified_radius
        if radius is not None:
            if radius <= 0:
                results["valid"] = False
                results["errors"].append("SLOPEFORGE_UNCERTIFIED_RADIUS must be positive")
            else:
                results["warnings"].append(
                    "Uncertified radius override active: Rankin minima are not certified."
                )

        if self.batch.threads < 1:
            results["valid"] = False
            results["errors"].append("SLOPEFORGE_THREADS must be at least 1")

        if self.log.level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            results["valid"] = False
            results["errors"].append(f"Unknown LOG_LEVEL '{self.log.level}'")

        if self.cache.enabled:
            try:
                os.makedirs(self.cache.cache_dir, exist_ok=True)
            except OSError as e:
                results["errors"].append(f"Cannot create cache directory: {e}")
                results["valid"] = False

        return results

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary (for display and reports)."""
        radius = self.enumeration.uncertified_radius
        return {
            "enumeration": {
                "budget_nodes": self.enumeration.budget_nodes,
                "rank_cap": self.enumeration.rank_cap,
                "uncertified_radius": None if radius is None else str(radius),
                "time_budget_seconds": self.enumeration.time_budget_seconds
            },
            "cache": {
                "enabled": self.cache.enabled,
                "cache_dir": self.cache.cache_dir,
                "expiry_days": self.cache.expiry_days,
                "size_limit_mb": self.cache.size_limit_mb
            },
            "batch": {
                "threads": self.batch.threads,
                "report_path": self.batch.report_path
            },
            "log": {
                "level": self.log.level,
                "file": self.log.file
            }
        }


# Global configuration instance
_config: Optional[AppConfig] = None


def _check(config: AppConfig) -> AppConfig:
    validation = config.validate()

    if not validation["valid"]:
        for error in validation["errors"]:
            logger.error(f"Configuration error: {error}")
        raise ConfigurationError("Invalid configuration. Check logs for details.")

    for warning in validation["warnings"]:
        logger.warning(f"Configuration warning: {warning}")

    return config


def get_config() -> AppConfig:
    """
    Get or create global configuration instance.

    Returns:
        AppConfig instance
    """
    global _config

    if _config is None:
        _config = _check(AppConfig.from_env())
        logger.debug("Configuration loaded and validated successfully")

    return _config


def override_config(
    budget_nodes: Optional[int] = None,
    rank_cap: Optional[int] = None,
    uncertified_radius: Optional[Fraction] = None,
    threads: Optional[int] = None,
    cache_enabled: Optional[bool] = None
) -> AppConfig:
    """
    Apply command-line overrides on top of the environment configuration.

    Args:
        budget_nodes: Node budget per search
        rank_cap: Maximal tensor rank for Bost experiments
        uncertified_radius: Radius multiplier (disables certification)
        threads: Worker count for batch and branch concurrency
        cache_enabled: Toggle the persistent Rankin cache

    Returns:
        The new global AppConfig
    """
    global _config

    base = get_config()
    enumeration = base.enumeration
    if budget_nodes is not None:
        enumeration = replace(enumeration, budget_nodes=budget_nodes)
    if rank_cap is not None:
        enumeration = replace(enumeration, rank_cap=rank_cap)
    if uncertified_radius is not None:
        enumeration = replace(enumeration, uncertified_radius=uncertified_radius)

    batch = base.batch if threads is None else replace(base.batch, threads=threads)
    cache = base.cache if cache_enabled is None else replace(base.cache, enabled=cache_enabled)

    _config = _check(replace(base, enumeration=enumeration, batch=batch, cache=cache))
    return _config


def reset_config() -> None:
    """Forget the global configuration (it is reloaded on next access)."""
    global _config
    _config = None


# Example usage
if __name__ == "__main__":
    import json

    config = get_config()
    print(json.dumps(config.to_dict(), indent=2))
