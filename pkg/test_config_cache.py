"""
Tests for configuration loading, search budgets and the Rankin profile cache.
"""
import logging
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import src.utils.cache_manager as cache_module
from src.lattice.gram import make_lattice
from src.lattice.rankin import rankin_min
from src.utils.budget_tracker import SearchBudget, UsageTracker
from src.utils.cache_manager import CacheManager, get_cache_manager
from src.utils.config import AppConfig, get_config, override_config, reset_config
from src.utils.errors import BudgetExhausted, ConfigurationError
from src.utils.logger import effective_level, init_logging_from_config, setup_logging

A2 = [[2, 1], [1, 2]]


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    monkeypatch.setattr(cache_module, "_cache_manager", None)
    reset_config()
    yield
    reset_config()


class TestConfig:
    """Environment loading and validation."""

    def test_defaults(self, monkeypatch):
        for name in ("SLOPEFORGE_BUDGET_NODES", "SLOPEFORGE_RANK_CAP", "SLOPEFORGE_THREADS",
                     "SLOPEFORGE_UNCERTIFIED_RADIUS", "SLOPEFORGE_CACHE_ENABLED"):
            monkeypatch.delenv(name, raising=False)
        monkeypatch.setenv("LOG_LEVEL", "WARNING")
        config = AppConfig.from_env()
        assert config.enumeration.rank_cap == 9
        assert config.enumeration.uncertified_radius is None
        assert config.validate()["valid"]

    def test_environment_values(self, monkeypatch):
        monkeypatch.setenv("SLOPEFORGE_BUDGET_NODES", "500")
        monkeypatch.setenv("SLOPEFORGE_UNCERTIFIED_RADIUS", "3/2")
        monkeypatch.setenv("LOG_LEVEL", "INFO")
        config = get_config()
        assert config.enumeration.budget_nodes == 500
        assert config.enumeration.uncertified_radius == Fraction(3, 2)
        assert any("not certified" in w for w in config.validate()["warnings"])

    def test_malformed_value(self, monkeypatch):
        monkeypatch.setenv("SLOPEFORGE_RANK_CAP", "nine")
        with pytest.raises(ConfigurationError):
            AppConfig.from_env()

    def test_invalid_value(self, monkeypatch):
        monkeypatch.setenv("SLOPEFORGE_THREADS", "0")
        with pytest.raises(ConfigurationError):
            get_config()

    def test_overrides(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "WARNING")
        config = override_config(budget_nodes=42, threads=3)
        assert config.enumeration.budget_nodes == 42
        assert config.batch.threads == 3
        assert get_config() is config
        with pytest.raises(ConfigurationError):
            override_config(rank_cap=0)


class TestBudgets:
    """Node budgets and usage statistics."""

    def test_budget_exhaustion(self):
        budget = SearchBudget("rankin", max_nodes=2, time_limit=None)
        budget.tick()
        budget.tick()
        with pytest.raises(BudgetExhausted):
            budget.tick()

    def test_usage_stats(self):
        tracker = UsageTracker()
        tracker.record("short_vectors", 10, 0.5)
        tracker.record("short_vectors", 5, 0.25, exhausted=True)
        stats = tracker.get_usage_stats()["short_vectors"]
        assert stats["searches"] == 2
        assert stats["nodes"] == 15
        assert stats["exhausted"] == 1


class TestCache:
    """Persistent Rankin minima."""

    def test_round_trip(self, tmp_path):
        cache = CacheManager(str(tmp_path), expiry_days=1)
        key = make_lattice(A2).canonical_key()
        assert cache.get_profile(key, 1) is None
        cache.set_profile(key, 1, {"det": "2"})
        assert cache.get_profile(key, 1) == {"det": "2"}
        assert cache.get_profile(key, 2) is None
        cache.clear_cache()
        assert cache.get_profile(key, 1) is None

    def test_rankin_minima_are_cached(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SLOPEFORGE_CACHE_ENABLED", "true")
        monkeypatch.setenv("SLOPEFORGE_CACHE_DIR", str(tmp_path))
        monkeypatch.setenv("LOG_LEVEL", "WARNING")
        lattice = make_lattice(A2)

        first = rankin_min(lattice, 1)
        stored = get_cache_manager().get_profile(lattice.canonical_key(), 1)
        assert stored is not None
        assert stored["det"] == "2"

        second = rankin_min(lattice, 1)
        assert second.det == first.det == 2
        assert [m.basis for m in second.minimizers] == [m.basis for m in first.minimizers]
        assert second.certified

    def test_disabled_cache_is_untouched(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SLOPEFORGE_CACHE_ENABLED", "false")
        monkeypatch.setenv("SLOPEFORGE_CACHE_DIR", str(tmp_path / "unused"))
        monkeypatch.setenv("LOG_LEVEL", "WARNING")
        rankin_min(make_lattice(A2), 1)
        assert not (tmp_path / "unused").exists()


class TestLogging:
    """Log levels, handlers and the rotating file."""

    def test_verbosity_lowers_the_level(self):
        assert effective_level("WARNING") == "WARNING"
        assert effective_level("warning", 1) == "INFO"
        assert effective_level("WARNING", 2) == "DEBUG"
        assert effective_level("INFO", 5) == "DEBUG"

    def test_console_goes_to_stderr(self):
        setup_logging(level="INFO")
        root = logging.getLogger()
        assert root.level == logging.INFO
        assert [h.stream for h in root.handlers] == [sys.stderr]

    def test_log_file(self, tmp_path):
        path = tmp_path / "logs" / "run.log"
        setup_logging(level="INFO", log_file=str(path))
        logging.getLogger("slopeforge.test").info("rankin search finished")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "rankin search finished" in path.read_text(encoding="utf-8")
        setup_logging()

    def test_config_level_and_verbosity(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "ERROR")
        monkeypatch.delenv("LOG_FILE", raising=False)
        init_logging_from_config(verbosity=1, force=True)
        assert logging.getLogger().level == logging.WARNING
