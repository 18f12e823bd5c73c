"""
Batch experiment runner.

A manifest lists experiments over catalog names or lattice files:

    {
      "budget_nodes": 2000000,
      "experiments": [
        {"kind": "tensor", "a": "diag_1_4", "b": "A2", "checks": ["bost", "redsi"], "rank_cap": 4},
        {"kind": "filtration", "a": "lattices/e.json"}
      ]
    }

Experiments run concurrently on SLOPEFORGE_THREADS workers; results go
through a single ReportWriter into one ReportDocument.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from tqdm import tqdm

from src.experiments.runner import BINARY_KINDS, EXIT_USAGE, RUNNERS, exit_code_for, run_experiment
from src.utils.config import get_config, override_config
from src.utils.errors import ParseError, RankCapExceeded, SlopeforgeError
from .reports import ReportDocument, ReportWriter
from .resolver import resolve_lattice

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

OPTION_KEYS = {"checks", "max_rank", "sweep"}
ERROR = "error"


@dataclass
class ExperimentSpec:
    """One manifest entry."""
    kind: str
    a: str
    b: Optional[str] = None
    rank_cap: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)
    index: int = 0

    def label(self) -> str:
        return f"{self.kind}({self.a}" + (f", {self.b})" if self.b else ")")


@dataclass
class BatchManifest:
    experiments: List[ExperimentSpec]
    budget_nodes: Optional[int] = None
    threads: Optional[int] = None


def _optional_int(entry: Dict[str, Any], key: str, row: Optional[int]) -> Optional[int]:
    value = entry.get(key)
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ParseError(f"'{key}' must be a positive integer", row=row)
    return value


def parse_manifest(data: Any) -> BatchManifest:
    """
    Validate a decoded manifest; row positions are 1-based experiment numbers.

    Raises:
        ParseError: malformed manifest
    """
    if not isinstance(data, dict) or not isinstance(data.get("experiments"), list):
        raise ParseError("manifest must be an object with an 'experiments' list")
    specs = []
    for i, entry in enumerate(data["experiments"], start=1):
        if not isinstance(entry, dict):
            raise ParseError("experiment must be an object", row=i)
        kind = entry.get("kind")
        if kind not in RUNNERS:
            raise ParseError(f"unknown kind {kind!r}; choose from {', '.join(sorted(RUNNERS))}", row=i)
        if not isinstance(entry.get("a"), str):
            raise ParseError("field 'a' must name a lattice", row=i)
        if kind in BINARY_KINDS and not isinstance(entry.get("b"), str):
            raise ParseError(f"kind '{kind}' needs a second lattice 'b'", row=i)
        unknown = set(entry) - OPTION_KEYS - {"kind", "a", "b", "rank_cap"}
        if unknown:
            raise ParseError(f"unknown fields {sorted(unknown)}", row=i)
        specs.append(ExperimentSpec(
            kind=kind,
            a=entry["a"],
            b=entry.get("b"),
            rank_cap=_optional_int(entry, "rank_cap", i),
            options={k: entry[k] for k in OPTION_KEYS if k in entry},
            index=i - 1,
        ))
    return BatchManifest(
        experiments=specs,
        budget_nodes=_optional_int(data, "budget_nodes", None),
        threads=_optional_int(data, "threads", None),
    )


def load_manifest(path: PathLike) -> BatchManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read manifest {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid manifest JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_manifest(data)


class BatchRunner:
    """Run a manifest concurrently and collect one report."""

    def __init__(self, manifest: BatchManifest, report_path: Optional[PathLike] = None):
        self.manifest = manifest
        self.report_path = report_path

    def _configure(self) -> int:
        caps = [s.rank_cap for s in self.manifest.experiments if s.rank_cap is not None]
        config = override_config(
            budget_nodes=self.manifest.budget_nodes,
            rank_cap=max(caps) if caps else None,
            threads=self.manifest.threads,
        )
        return config.batch.threads

    def _run_one(self, spec: ExperimentSpec) -> Dict[str, Any]:
        try:
            a = resolve_lattice(spec.a)
            b = resolve_lattice(spec.b) if spec.b else None
            if b is not None and spec.rank_cap is not None and a.rank * b.rank > spec.rank_cap:
                if get_config().enumeration.uncertified_radius is None:
                    raise RankCapExceeded(f"tensor rank {a.rank * b.rank} exceeds rank cap {spec.rank_cap}")
            result = run_experiment(spec.kind, a, b, **spec.options).to_dict()
        except SlopeforgeError as e:
            logger.error(f"{spec.label()}: {e}")
            result = {"kind": spec.kind, "status": ERROR, "error": str(e), "inputs": {}, "witnesses": []}
        except TypeError as e:
            # option not accepted by this kind
            logger.error(f"{spec.label()}: {e}")
            result = {"kind": spec.kind, "status": ERROR, "error": str(e), "inputs": {}, "witnesses": []}
        result["index"] = spec.index
        result["label"] = spec.label()
        return result

    def run(self, show_progress: bool = True) -> ReportDocument:
        threads = self._configure()
        document = ReportDocument(command="batch", settings=get_config().to_dict())
        writer = ReportWriter(document, self.report_path)
        experiments = self.manifest.experiments
        logger.info(f"Running {len(experiments)} experiments on {threads} workers")

        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            futures = {executor.submit(self._run_one, spec): spec for spec in experiments}
            for future in tqdm(
                as_completed(futures), total=len(futures), desc="experiments", disable=not show_progress
            ):
                spec = futures[future]
                result = future.result()
                writer.append(result)
                marker = "✓" if result["status"] in ("pass", "not-applicable") else "✗"
                logger.info(f"{marker} {spec.label()}: {result['status']}")

        return writer.close()


def batch_exit_code(document: ReportDocument) -> int:
    """Failures first, then usage errors, then inconclusive runs."""
    statuses = {r.get("status") for r in document.results}
    if "fail" in statuses:
        return exit_code_for("fail")
    if ERROR in statuses:
        return EXIT_USAGE
    if "inconclusive" in statuses:
        return exit_code_for("inconclusive")
    return 0
