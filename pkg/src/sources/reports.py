"""
Report documents.

A ReportDocument collects experiment results for one command or batch run.
Rationals are strings, exact heights are prime → exponent maps and
witnesses are integer row-major arrays, so a reloaded report can be
re-verified from scratch with reload_and_reverify.
"""
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src import __version__
from src.core.checks import CheckReport
from src.core.posreal import epr_from_json
from src.lattice.filtration import gs_filtration
from src.lattice.gram import GramLattice, SqHeight, sublattice, tensor_product
from src.symmetry.isometry import is_isometry
from src.symmetry.isoduality import verify_witness
from src.utils.budget_tracker import get_usage_tracker
from src.utils.errors import ParseError
from .file_source import lattice_from_dict

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

STATUS_ORDER = ("fail", "inconclusive", "pass", "not-applicable")


@dataclass
class ReportDocument:
    """Results of one run plus search statistics."""
    command: str
    results: List[Dict[str, Any]] = field(default_factory=list)
    timing: Dict[str, Any] = field(default_factory=dict)
    settings: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    @property
    def status(self) -> str:
        statuses = {r.get("status") for r in self.results}
        for status in STATUS_ORDER:
            if status in statuses:
                return status
        return "not-applicable"

    def add(self, result: Any) -> None:
        """Append an ExperimentResult or an already serialized result."""
        self.results.append(result if isinstance(result, dict) else result.to_dict())

    def finalize(self) -> None:
        self.timing = get_usage_tracker().get_usage_stats()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "command": self.command,
            "status": self.status,
            "settings": self.settings,
            "results": self.results,
            "timing": self.timing,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ReportDocument":
        if not isinstance(data, dict) or "results" not in data:
            raise ParseError("report must be a JSON object with a 'results' list")
        return cls(
            command=data.get("command", ""),
            results=list(data["results"]),
            timing=data.get("timing", {}),
            settings=data.get("settings", {}),
            version=data.get("version", __version__),
        )

    def save(self, path: PathLike) -> None:
        _atomic_write(Path(path), self.to_json())
        logger.info(f"Saved report with {len(self.results)} results to {path}")

    @classmethod
    def load(cls, path: PathLike) -> "ReportDocument":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid report JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
        return cls.from_dict(data)


def _atomic_write(path: Path, text: str) -> None:
    handle, temp = tempfile.mkstemp(dir=path.parent, prefix=".report-", suffix=".json")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.remove(temp)
        raise


class ReportWriter:
    """Single writer for concurrent producers; the file is rewritten after every append."""

    def __init__(self, document: ReportDocument, path: Optional[PathLike] = None):
        self.document = document
        self.path = Path(path) if path else None
        self._lock = threading.Lock()

    def append(self, result: Any) -> None:
        with self._lock:
            self.document.add(result)
            if self.path:
                _atomic_write(self.path, self.document.to_json())

    def close(self) -> ReportDocument:
        with self._lock:
            self.document.results.sort(key=lambda r: r.get("index", 0))
            self.document.finalize()
            if self.path:
                self.document.save(self.path)
        return self.document


def _inputs(result: Dict[str, Any]) -> Dict[str, GramLattice]:
    lattices = {key: lattice_from_dict(data) for key, data in result.get("inputs", {}).items()}
    if "a" in lattices and "b" in lattices:
        lattices["a(x)b"] = tensor_product(lattices["a"], lattices["b"])
    return lattices


def _reverify(witness: Dict[str, Any], lattices: Dict[str, GramLattice], report: CheckReport, prefix: str) -> None:
    kind = witness.get("type")
    lattice = lattices.get(witness.get("lattice"))
    if lattice is None:
        report.add(f"{prefix}{kind}: lattice", False, f"unknown lattice {witness.get('lattice')!r}")
        return

    if kind == "sublattice":
        sub = sublattice(lattice, witness["basis"])
        report.add(f"{prefix}sublattice det", sub.det == Fraction(witness["det"]), witness["det"])
    elif kind == "filtration":
        steps = [sublattice(lattice, b).basis for b in witness["steps"]]
        fresh = [s.basis for s in gs_filtration(lattice).steps]
        report.add(f"{prefix}filtration steps", steps == fresh, f"length {len(steps)}")
    elif kind == "isoduality":
        ratio = verify_witness(lattice, witness["map_u"])
        report.add(f"{prefix}isoduality witness", ratio is not None and ratio == Fraction(witness["ratio"]),
                   f"c = {ratio}")
    elif kind == "isometry":
        report.add(f"{prefix}automorphism", is_isometry(witness["map"], lattice, lattice))
    elif kind == "tensor_violation":
        from src.experiments.multiplicativity import reverify_witness

        sub = sublattice(lattice, witness["basis"])
        rhs = SqHeight(epr_from_json(witness["rhs"]), witness["rhs_rank"])
        check = reverify_witness(lattices["a"], lattices["b"], sub, rhs)
        report.extend(check, prefix=f"{prefix}violation: ")
    else:
        report.add(f"{prefix}{kind}", None, "unknown witness type")


def reload_and_reverify(source: Union[ReportDocument, PathLike]) -> CheckReport:
    """
    Rebuild every input lattice from the report and check every witness
    against it with fresh computations.
    """
    document = source if isinstance(source, ReportDocument) else ReportDocument.load(source)
    report = CheckReport(title="report reverification")
    for index, result in enumerate(document.results):
        if not result.get("inputs"):
            continue
        lattices = _inputs(result)
        for witness in result.get("witnesses", []):
            _reverify(witness, lattices, report, f"result {index}: ")
    logger.info(f"Reverified report: {report.status} ({len(report.checks)} checks)")
    return report
