"""Utility modules: configuration, logging, errors, budgets and caching."""
from .config import AppConfig, get_config, override_config, reset_config
from .errors import (
    SlopeforgeError,
    DimensionError,
    ShapeError,
    DefinitenessError,
    DomainError,
    UnfactoredError,
    RankError,
    ParseError,
    ConfigurationError,
    InvariantViolation,
    BudgetExhausted,
    RankCapExceeded,
    UnknownCatalogEntry,
)
from .budget_tracker import SearchBudget, UsageTracker, get_usage_tracker
from .cache_manager import CacheManager, get_cache_manager

__all__ = [
    "AppConfig",
    "get_config",
    "override_config",
    "reset_config",
    "SlopeforgeError",
    "DimensionError",
    "ShapeError",
    "DefinitenessError",
    "DomainError",
    "UnfactoredError",
    "RankError",
    "ParseError",
    "ConfigurationError",
    "InvariantViolation",
    "BudgetExhausted",
    "RankCapExceeded",
    "UnknownCatalogEntry",
    "SearchBudget",
    "UsageTracker",
    "get_usage_tracker",
    "CacheManager",
    "get_cache_manager",
]
