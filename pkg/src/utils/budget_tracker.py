"""
Search budgets and usage statistics.

Every exact search (short vectors, Rankin branch and bound, isometry
backtracking) runs under a SearchBudget. Finished searches are recorded in
the process-wide UsageTracker, whose statistics end up in reports as the
"timing" section.
"""
import time
import threading
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional

from .errors import BudgetExhausted


@dataclass
class SearchRecord:
    """Record of a single finished (or aborted) search."""
    timestamp: float
    operation: str
    nodes: int
    elapsed: float
    exhausted: bool = False


class SearchBudget:
    """Node and wall-clock budget for one search; thread safe."""

    def __init__(
        self,
        operation: str,
        max_nodes: Optional[int] = None,
        time_limit: Optional[float] = None
    ):
        """
        Args:
            operation: Name used in logs and usage statistics
            max_nodes: Node limit (None = taken from configuration)
            time_limit: Seconds (None = taken from configuration, may be unlimited)
        """
        if max_nodes is None or time_limit is None:
            from .config import get_config
            enumeration = get_config().enumeration
            if max_nodes is None:
                max_nodes = enumeration.budget_nodes
            if time_limit is None:
                time_limit = enumeration.time_budget_seconds

        self.operation = operation
        self.max_nodes = max_nodes
        self.time_limit = time_limit
        self.nodes = 0
        self.started = time.monotonic()
        self._lock = threading.Lock()

    def tick(self, count: int = 1) -> None:
        """Charge `count` nodes; raise BudgetExhausted past the limit."""
        with self._lock:
            self.nodes += count
            nodes = self.nodes
        if nodes > self.max_nodes:
            raise BudgetExhausted(self.operation, nodes)
        # clock checks are amortized
        if self.time_limit is not None and nodes % 1024 == 0:
            if time.monotonic() - self.started > self.time_limit:
                raise BudgetExhausted(self.operation, nodes)

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def finish(self, exhausted: bool = False) -> SearchRecord:
        """Record this search in the global usage tracker."""
        return get_usage_tracker().record(
            self.operation, self.nodes, self.elapsed, exhausted=exhausted
        )


class UsageTracker:
    """Aggregates search statistics per operation."""

    def __init__(self):
        self.records: List[SearchRecord] = []
        self.lock = threading.Lock()

    def record(
        self,
        operation: str,
        nodes: int,
        elapsed: float,
        exhausted: bool = False
    ) -> SearchRecord:
        record = SearchRecord(
            timestamp=time.time(),
            operation=operation,
            nodes=nodes,
            elapsed=elapsed,
            exhausted=exhausted
        )
        with self.lock:
            self.records.append(record)
        return record

    def get_usage_stats(self) -> Dict[str, Dict[str, float]]:
        """
        Summarize recorded searches.

        Returns:
            {operation: {"searches", "nodes", "seconds", "exhausted"}}
        """
        with self.lock:
            records = list(self.records)

        stats: Dict[str, Dict[str, float]] = {}
        for record in records:
            entry = stats.setdefault(
                record.operation,
                {"searches": 0, "nodes": 0, "seconds": 0.0, "exhausted": 0}
            )
            entry["searches"] += 1
            entry["nodes"] += record.nodes
            entry["seconds"] += record.elapsed
            entry["exhausted"] += int(record.exhausted)
        return stats

    def export_records(self) -> List[Dict]:
        with self.lock:
            return [asdict(r) for r in self.records]

    def reset(self) -> None:
        with self.lock:
            self.records = []


_usage_tracker: Optional[UsageTracker] = None
_tracker_lock = threading.Lock()


def get_usage_tracker() -> UsageTracker:
    """Get or create the global usage tracker."""
    global _usage_tracker

    with _tracker_lock:
        if _usage_tracker is None:
            _usage_tracker = UsageTracker()
    return _usage_tracker
