"""
Experiment runner shared by the command line and the batch manifest.

Each experiment kind takes one or two lattices, runs the corresponding
computations and checks, and returns an ExperimentResult: the check
reports, a one-line human summary, a JSON payload with exact values, and
the witnesses a report reader can re-verify independently.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.core.checks import FAIL, INCONCLUSIVE, NOT_APPLICABLE, PASS, CheckReport
from src.core.posreal import ExactPosReal, epr_format, epr_pow, epr_to_json
from src.lattice.filtration import Filtration, gs_filtration, is_stable, verify_filtration
from src.lattice.gram import GramLattice, Sublattice
from src.lattice.rankin import describe_profile, rankin_profile
from src.symmetry.isometry import automorphisms
from src.symmetry.isoduality import (
    IsodualityWitness,
    check_witt_index,
    isoduality_witness,
    signature_certificate,
    verify_aut_invariance,
    verify_isodual_filtration,
    verify_tau_square_law,
)
from src.utils.errors import BudgetExhausted, DomainError, InvariantViolation
from .multiplicativity import check_multiplicativity
from .theorems import (
    check_filtered_split,
    check_isodual_reduction,
    check_mixed_signatures,
    check_rank_two,
    check_semistable_reduction,
    check_signature_bound,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_INCONCLUSIVE = 3

# ranks up to this size get a full σ∘Aut(L) sweep by default
SWEEP_RANK = 4

TENSOR_CHECKS = ("bost", "sgn", "mix", "redsi", "redi", "c1", "r2")


def exit_code_for(status: str) -> int:
    return {
        PASS: EXIT_OK,
        NOT_APPLICABLE: EXIT_OK,
        FAIL: EXIT_FAILURE,
        INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[status]


def combined_status(statuses: Sequence[str]) -> str:
    """fail > inconclusive > pass > not-applicable."""
    for status in (FAIL, INCONCLUSIVE, PASS):
        if status in statuses:
            return status
    return NOT_APPLICABLE


@dataclass
class ExperimentResult:
    """Outcome of one experiment, ready for printing and serialization."""
    kind: str
    inputs: Dict[str, GramLattice]
    reports: List[CheckReport] = field(default_factory=list)
    summary: str = ""
    payload: Dict[str, Any] = field(default_factory=dict)
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    counterexample: bool = False
    error: Optional[str] = None

    @property
    def status(self) -> str:
        if self.counterexample:
            return FAIL
        return combined_status([r.status for r in self.reports])

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.status)

    def to_dict(self) -> Dict[str, Any]:
        from src.sources.file_source import lattice_to_dict

        return {
            "kind": self.kind,
            "status": self.status,
            "summary": self.summary,
            "counterexample": self.counterexample,
            "error": self.error,
            "inputs": {key: lattice_to_dict(lattice) for key, lattice in self.inputs.items()},
            "reports": [r.to_dict() for r in self.reports],
            "payload": self.payload,
            "witnesses": self.witnesses,
        }


def _matrix(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    return [list(r) for r in rows]


def sublattice_witness(label: str, sub: Sublattice) -> Dict[str, Any]:
    return {"type": "sublattice", "lattice": label, "basis": _matrix(sub.basis), "det": str(sub.det)}


def _reduced_root(x: ExactPosReal) -> str:
    """H_r from H_r²."""
    return epr_format(epr_pow(x, Fraction(1, 2)))


def describe_filtration(filtration: Filtration) -> str:
    heights = [epr_format(h.sq_reduced) for h in filtration.step_sq_heights]
    if filtration.length == 1:
        text = f"semistable, H_r^2 = {heights[0]}"
    else:
        text = f"unstable, length {filtration.length}, quotient H_r^2 = {' < '.join(heights)}"
    if not filtration.certified:
        text += " [uncertified radius]"
    return text


def _filtration_payload(filtration: Filtration) -> Dict[str, Any]:
    payload = filtration.to_dict()
    payload["quotient_sq_heights"] = [
        {"rank": h.rank, "value": epr_to_json(h.value)} for h in filtration.step_sq_heights
    ]
    payload["polygon_exact"] = [[d, epr_to_json(v)] for d, v in filtration.polygon]
    return payload


def _filtration_result(a: GramLattice, kind: str) -> Tuple[ExperimentResult, Filtration]:
    filtration = gs_filtration(a, validate=False)
    result = ExperimentResult(kind, {"a": a}, [verify_filtration(a, filtration)])
    result.summary = describe_filtration(filtration)
    result.payload = _filtration_payload(filtration)
    if filtration.length == 1:
        result.payload["stable"] = is_stable(a, filtration.flags[0])
    result.witnesses.append({
        "type": "filtration",
        "lattice": "a",
        "steps": [_matrix(s.basis) for s in filtration.steps],
    })
    result.witnesses.extend(sublattice_witness("a", s) for s in filtration.steps)
    return result, filtration


def run_filtration(a: GramLattice) -> ExperimentResult:
    return _filtration_result(a, "filtration")[0]


def run_rankin(a: GramLattice, max_rank: Optional[int] = None) -> ExperimentResult:
    profile = rankin_profile(a, max_rank)
    report = CheckReport(title="rankin minima")
    for k in sorted(profile.results):
        r = profile.results[k]
        report.add(f"d_{k} attained by its witness", r.witness.det == r.det, str(r.det))
    result = ExperimentResult("rankin", {"a": a}, [report])
    result.summary = ", ".join(f"d_{k} = {profile.d(k)}" for k in sorted(profile.results))
    if not profile.certified:
        result.summary += " [uncertified radius]"
    result.payload = {"profile": describe_profile(profile), "certified": profile.certified}
    result.witnesses.extend(sublattice_witness("a", profile.witness(k)) for k in sorted(profile.results))
    return result


def _witness(lattice: GramLattice, sweep: Optional[bool]) -> Optional[IsodualityWitness]:
    if sweep is None:
        sweep = lattice.rank <= SWEEP_RANK
    return isoduality_witness(lattice, sweep=sweep)


def describe_witness(witness: IsodualityWitness) -> str:
    types = "+".join(sorted(witness.types_realizable))
    text = f"isodual, c = {witness.ratio}, types {types}"
    if witness.signature is not None:
        text += f", signature {witness.signature}, Witt index {witness.witt_index}"
    if not witness.complete:
        text += " (partial sweep)"
    return text


def run_isodual(a: GramLattice, sweep: Optional[bool] = None) -> ExperimentResult:
    witness = _witness(a, sweep)
    result = ExperimentResult("isodual", {"a": a})
    if witness is None:
        result.reports.append(CheckReport(title="isoduality", data={"isodual": False}))
        result.summary = "not isodual"
        result.payload = {"isodual": False}
        return result

    filtration = gs_filtration(a)
    result.reports.append(verify_tau_square_law(witness))
    result.reports.append(verify_isodual_filtration(a, witness, filtration))
    certificate = signature_certificate(a, witness, cross_validate=True)
    if certificate is not None:
        result.reports.append(certificate.cross_check)
        result.payload["certificate"] = {
            "signature": certificate.signature,
            "bound": certificate.bound,
            "semistable": certificate.semistable,
        }
        result.reports.append(check_witt_index(a, witness))
    result.summary = describe_witness(witness)
    result.payload.update({"isodual": True, "witness": witness.to_dict()})
    for u in sorted({witness.map_u, witness.orthogonal_map, witness.symplectic_map} - {None}):
        result.witnesses.append({"type": "isoduality", "lattice": "a", "map_u": _matrix(u), "ratio": str(witness.ratio)})
    return result


def run_aut(a: GramLattice) -> ExperimentResult:
    group = automorphisms(a)
    report = CheckReport(title="automorphism group")
    report.add("search complete", True if group.complete else None, f"orbits {group.orbit_sizes}")
    result = ExperimentResult("aut", {"a": a}, [report])
    if group.complete:
        result.reports.append(verify_aut_invariance(a, group=group))
        result.summary = f"|Aut| = {group.order}, {len(group.generators)} generators"
    else:
        result.summary = f"automorphism search incomplete, {len(group.generators)} generators found"
    result.payload = {"order": group.order, "orbit_sizes": group.orbit_sizes, "complete": group.complete}
    result.witnesses.extend({"type": "isometry", "lattice": "a", "map": _matrix(g)} for g in group.generators)
    return result


def run_analyze(a: GramLattice) -> ExperimentResult:
    """Filtration, Rankin profile, isoduality and the signature certificate in one pass."""
    filtration = run_filtration(a)
    rankin = run_rankin(a)
    isodual = run_isodual(a, sweep=False)
    result = ExperimentResult(
        "analyze",
        {"a": a},
        filtration.reports + rankin.reports + isodual.reports,
        summary="\n".join([
            f"filtration: {filtration.summary}",
            f"rankin: {rankin.summary}",
            f"isoduality: {isodual.summary}",
        ]),
        payload={"filtration": filtration.payload, "rankin": rankin.payload, "isoduality": isodual.payload},
        witnesses=filtration.witnesses + isodual.witnesses,
    )
    return result


def _bost(a: GramLattice, b: GramLattice, result: ExperimentResult) -> CheckReport:
    verdict = check_multiplicativity(a, b)
    report = CheckReport(title="multiplicativity")
    report.add("H_min(E (x) F) = H_min(E) H_min(F)", verdict.equal,
               f"{epr_format(verdict.lhs.sq_reduced)} vs {epr_format(verdict.rhs.sq_reduced)}")
    result.payload["bost"] = verdict.to_dict()
    result.payload["bost"]["rhs_sq"] = {"rank": verdict.rhs.rank, "value": epr_to_json(verdict.rhs.value)}
    if verdict.equal:
        result.summary = f"equal, H_min = {_reduced_root(verdict.rhs.sq_reduced)}"
    else:
        result.counterexample = True
        report.extend(verdict.reverification, prefix="reverification: ")
        result.summary = (
            f"COUNTEREXAMPLE: H_min(E (x) F)^2 = {epr_format(verdict.lhs.sq_reduced)} "
            f"< {epr_format(verdict.rhs.sq_reduced)}"
        )
        witness = sublattice_witness("a(x)b", verdict.violating_witness)
        witness.update({"type": "tensor_violation", "rhs": epr_to_json(verdict.rhs.value), "rhs_rank": verdict.rhs.rank})
        result.witnesses.append(witness)
        logger.critical(f"multiplicativity counterexample: {a!r} (x) {b!r}")
    if not verdict.certified:
        result.summary += " [uncertified radius]"
    return report


def _describe_check(name: str, report: CheckReport) -> str:
    if report.status == PASS:
        return f"{name}: hypothesis satisfied, conclusion verified"
    if report.status == NOT_APPLICABLE:
        return f"{name}: not applicable ({report.note})"
    if report.status == INCONCLUSIVE:
        return f"{name}: inconclusive"
    return f"{name}: FAILED ({', '.join(c.name for c in report.failures())})"


def run_tensor(
    a: GramLattice,
    b: GramLattice,
    checks: Sequence[str] = ("bost",),
    sweep: Optional[bool] = None
) -> ExperimentResult:
    unknown = [c for c in checks if c not in TENSOR_CHECKS]
    if unknown:
        raise DomainError(f"unknown tensor checks {unknown}; choose from {', '.join(TENSOR_CHECKS)}")
    result = ExperimentResult("tensor", {"a": a, "b": b})
    lines: List[str] = []
    witnesses: Dict[str, Optional[IsodualityWitness]] = {}

    def witness_pair():
        if not witnesses:
            witnesses["a"] = _witness(a, sweep)
            witnesses["b"] = _witness(b, sweep)
        return witnesses["a"], witnesses["b"]

    theorem_checks: Dict[str, Callable[[], CheckReport]] = {
        "sgn": lambda: check_signature_bound(a, witness_pair()[0], b, witness_pair()[1]),
        "mix": lambda: check_mixed_signatures(a, witness_pair()[0], b, witness_pair()[1]),
        "redsi": lambda: check_semistable_reduction(a, b),
        "redi": lambda: check_isodual_reduction(a, b),
        "c1": lambda: check_filtered_split(a, b, gs_filtration(b)),
        "r2": lambda: check_rank_two(a, b),
    }
    for name in checks:
        if name == "bost":
            report = _bost(a, b, result)
            lines.append(result.summary)
        else:
            report = theorem_checks[name]()
            lines.append(_describe_check(name, report))
        report.data.setdefault("check", name)
        result.reports.append(report)
    result.summary = "\n".join(lines)
    return result


def run_polygon(a: GramLattice, svg: Optional[str] = None, csv: Optional[str] = None) -> ExperimentResult:
    from src.sources.polygon_plot import write_polygon_csv, write_polygon_svg

    result, filtration = _filtration_result(a, "polygon")
    result.summary = "polygon " + " ".join(f"({d}, {epr_format(v)})" for d, v in filtration.polygon)
    if csv:
        write_polygon_csv(filtration, csv)
    if svg:
        write_polygon_svg(filtration, svg)
    result.payload["files"] = {"svg": svg, "csv": csv}
    return result


RUNNERS: Dict[str, Callable[..., ExperimentResult]] = {
    "analyze": run_analyze,
    "filtration": run_filtration,
    "rankin": run_rankin,
    "isodual": run_isodual,
    "aut": run_aut,
    "tensor": run_tensor,
    "polygon": run_polygon,
}

BINARY_KINDS = {"tensor"}


def run_experiment(
    kind: str,
    a: GramLattice,
    b: Optional[GramLattice] = None,
    **options: Any
) -> ExperimentResult:
    """
    Run one experiment, turning budget exhaustion into an inconclusive
    result and internal inconsistencies into a failed one.

    Raises:
        DomainError: unknown kind or a missing second lattice
        RankCapExceeded: the tensor rank is above the cap
    """
    if kind not in RUNNERS:
        raise DomainError(f"unknown experiment kind '{kind}'; choose from {', '.join(sorted(RUNNERS))}")
    inputs = {"a": a} if b is None else {"a": a, "b": b}
    if kind in BINARY_KINDS and b is None:
        raise DomainError(f"experiment '{kind}' needs two lattices")
    try:
        if kind in BINARY_KINDS:
            return RUNNERS[kind](a, b, **options)
        return RUNNERS[kind](a, **options)
    except BudgetExhausted as e:
        logger.warning(f"{kind}: {e}")
        report = CheckReport(title=kind)
        report.add("search budget", None, str(e))
        return ExperimentResult(kind, inputs, [report], summary=f"inconclusive: {e}", error=str(e))
    except InvariantViolation as e:
        logger.critical(f"{kind}: invariant violated: {e}")
        report = CheckReport(title=kind)
        report.add("internal consistency", False, str(e))
        return ExperimentResult(kind, inputs, [report], summary=f"FAILED: {e}", error=str(e))

