"""
Executable reduction arguments for tensor multiplicativity.

Each check instantiates, on a concrete pair of lattices, the hypotheses and
the chain of equalities and inequalities of one argument, with every height
computed by certified enumeration. All values are squared reduced heights
H_r² as ExactPosReal; scaling a lattice by s multiplies them by s, so
irrational scales stay symbolic.
"""
import logging
from typing import Dict, List, Optional, Sequence, Union

from src.core.checks import CheckReport, not_applicable
from src.core.posreal import ExactPosReal, epr_format
from src.core.rational import is_zero, kron, matmul, signature_value, to_int_matrix, transpose
from src.lattice.filtration import Filtration, gs_filtration, is_stable
from src.lattice.gram import (
    GramLattice,
    Sublattice,
    as_lattice,
    direct_product,
    dual,
    quotient,
    scale,
    subquotient,
    tensor_product,
    zero,
)
from src.lattice.rankin import MinFlag, h_min
from src.symmetry.isometry import are_isometric
from src.symmetry.isoduality import (
    IsodualityWitness,
    isoduality_witness,
    pairing_matrix,
    verify_witness,
)
from src.utils.errors import BudgetExhausted
from .multiplicativity import balance, check_multiplicativity, double_dual_product, require_rank_cap

logger = logging.getLogger(__name__)

Steps = Union[Filtration, Sequence[Sublattice]]


class _Heights:
    """Memoized H_min of the lattices one experiment touches."""

    def __init__(self):
        self._flags: Dict[tuple, MinFlag] = {}

    def flag(self, lattice: GramLattice) -> MinFlag:
        if lattice.gram not in self._flags:
            self._flags[lattice.gram] = h_min(lattice)
        return self._flags[lattice.gram]

    def sq(self, lattice: GramLattice) -> ExactPosReal:
        return self.flag(lattice).h_min.sq_reduced

    def tensor_sq(self, e: GramLattice, f: GramLattice) -> ExactPosReal:
        require_rank_cap(e.rank * f.rank)
        return self.sq(tensor_product(e, f))

    def multiplicative(self, e: GramLattice, f: GramLattice) -> bool:
        return self.tensor_sq(e, f) == self.sq(e) * self.sq(f)


def _fmt(x: ExactPosReal) -> str:
    return epr_format(x)


def _steps(flag: Steps) -> List[Sublattice]:
    return list(flag.steps) if isinstance(flag, Filtration) else list(flag)


def _inconclusive(report: CheckReport, error: BudgetExhausted) -> CheckReport:
    report.add("search budget", None, str(error))
    return report


def check_filtered_split(e: GramLattice, f: GramLattice, flag: Steps) -> CheckReport:
    """
    A filtration of F whose quotients Q_i are each multiplicative with E and
    have nondecreasing H_min makes E ⊗ F multiplicative.
    """
    report = CheckReport(title="multiplicativity along a filtration")
    heights = _Heights()
    steps = _steps(flag)
    chain = [zero(f)] + steps
    valid = bool(steps) and steps[-1].rank == f.rank and all(
        a.rank < b.rank and a.is_subgroup_of(b) for a, b in zip(chain, steps)
    )
    report.add("valid saturated chain ending at F", valid)
    if not valid:
        report.applicable = False
        report.note = "flag is not a chain of F"
        return report
    try:
        quotients = [subquotient(f, a, b) for a, b in zip(chain, steps)]
        values = [heights.sq(q) for q in quotients]
        hypotheses = True
        for i, q in enumerate(quotients, start=1):
            ok = heights.multiplicative(e, q)
            hypotheses &= ok
            report.add(f"E (x) Q_{i} multiplicative", ok, f"rank {q.rank}")
        monotone = all(a <= b for a, b in zip(values, values[1:]))
        hypotheses &= monotone
        report.add("H_min(Q_i) nondecreasing", monotone, ", ".join(_fmt(v) for v in values))

        verdict = check_multiplicativity(e, f, flags={"e": heights.flag(e), "f": heights.flag(f)})
        report.add("H_min(E (x) F) = H_min(E) H_min(F)", verdict.equal,
                   f"{_fmt(verdict.lhs.sq_reduced)} vs {_fmt(verdict.rhs.sq_reduced)}")
        if not hypotheses:
            report.applicable = False
            report.note = "hypotheses fail; the conclusion is not implied"
    except BudgetExhausted as e_:
        return _inconclusive(report, e_)
    return report


def check_rank_two(e: GramLattice, f: GramLattice) -> CheckReport:
    """
    Rank-2 F that is not stable: an unstable F splits into rank-1 pieces and
    the filtration route must agree with direct enumeration.
    """
    title = "rank two factor"
    if f.rank != 2:
        return not_applicable(title, f"F has rank {f.rank}")
    try:
        flag = h_min(f)
        if is_stable(f, flag):
            return not_applicable(title, "F is stable")
        report = CheckReport(title=title)
        direct = check_multiplicativity(e, f)
        report.add("direct enumeration", direct.equal,
                   f"{_fmt(direct.lhs.sq_reduced)} vs {_fmt(direct.rhs.sq_reduced)}")
        if flag.destabilizer.rank == 1:
            split = check_filtered_split(e, f, gs_filtration(f))
            report.extend(split, prefix="filtration route: ")
            report.add("routes agree", split.passed == direct.equal)
        else:
            report.note = "F is semistable and not stable; checked directly"
    except BudgetExhausted as e_:
        return _inconclusive(CheckReport(title=title), e_)
    return report


def tensor_witness(e_witness: IsodualityWitness, f_witness: IsodualityWitness):
    """σ ⊗ τ on E ⊗ F, in the Kronecker index order."""
    return to_int_matrix(kron(e_witness.orthogonal_map, f_witness.orthogonal_map))


def check_signature_bound(
    e: GramLattice,
    e_witness: Optional[IsodualityWitness],
    f: GramLattice,
    f_witness: Optional[IsodualityWitness]
) -> CheckReport:
    """
    |s(S_E)·s(S_F)| ≥ rank E · rank F − 8 for orthogonal witnesses forces
    multiplicativity; the tensor pairing is S_E ⊗ S_F, its signature the
    product, and an unstable E ⊗ F has a totally isotropic destabilizer.
    """
    title = "signature bound"
    if not (e_witness and f_witness and e_witness.orthogonal_map and f_witness.orthogonal_map):
        return not_applicable(title, "orthogonal witnesses required for both factors")
    report = CheckReport(title=title)
    n = e.rank * f.rank
    s = e_witness.signature * f_witness.signature
    product = tensor_product(e, f)
    u = tensor_witness(e_witness, f_witness)
    s_e = pairing_matrix(e_witness.orthogonal_map)
    s_f = pairing_matrix(f_witness.orthogonal_map)
    s_t = pairing_matrix(u)

    report.add("sigma (x) tau is a similarity", verify_witness(product, u) == e_witness.ratio * f_witness.ratio)
    report.add("pairing of the tensor = S_E (x) S_F", s_t == kron(s_e, s_f))
    report.add("signature multiplicative", signature_value(s_t) == s, f"s = {s}")

    hypothesis = abs(s) >= n - 8
    report.data.update({"signature": s, "rank": n, "hypothesis": hypothesis})
    try:
        require_rank_cap(n)
        verdict = check_multiplicativity(e, f)
        report.add("H_min(E (x) F) = H_min(E) H_min(F)", verdict.equal,
                   f"{_fmt(verdict.lhs.sq_reduced)} vs {_fmt(verdict.rhs.sq_reduced)}")
        destabilizer = h_min(product).destabilizer
        if destabilizer.rank < n:
            b = destabilizer.basis
            report.add("destabilizer totally isotropic", is_zero(matmul(matmul(b, s_t), transpose(b))))
            report.add("destabilizer rank <= (n - |s|)/2", 2 * destabilizer.rank <= n - abs(s),
                       f"rank {destabilizer.rank}")
    except BudgetExhausted as e_:
        return _inconclusive(report, e_)
    if not hypothesis:
        report.applicable = False
        report.note = f"|s| = {abs(s)} < {n - 8}"
    return report


def _kind(lattice: GramLattice, witness: Optional[IsodualityWitness]) -> Optional[str]:
    if witness is None or witness.signature is None:
        return None
    if abs(witness.signature) == lattice.rank:
        return "definite"
    if abs(witness.signature) == lattice.rank - 2:
        return "lorentzian"
    return None


def _lorentzian_split(e: GramLattice, f: GramLattice, report: CheckReport, prefix: str) -> None:
    """The filtration F_1 ⊂ F_(ℓ−1) ⊂ F of an unstable Lorentzian F, with F_1 of rank 1."""
    filtration = gs_filtration(f)
    first = filtration.step(1)
    report.add(prefix + "F_1 has rank 1", first.rank == 1, f"rank {first.rank}")
    flag = [first]
    if filtration.length > 2:
        flag.append(filtration.step(filtration.length - 1))
    flag.append(filtration.steps[-1])
    report.extend(check_filtered_split(e, f, flag), prefix=prefix)


def check_mixed_signatures(
    e: GramLattice,
    e_witness: Optional[IsodualityWitness],
    f: GramLattice,
    f_witness: Optional[IsodualityWitness]
) -> CheckReport:
    """
    Multiplicativity when both pairings are definite, when one is definite
    and the other Lorentzian and not stable, or when both are Lorentzian and
    neither is stable (Lorentzian: |s| = n − 2).
    """
    title = "definite and Lorentzian pairings"
    kinds = (_kind(e, e_witness), _kind(f, f_witness))
    try:
        if kinds == ("definite", "definite"):
            case = 1
        elif "definite" in kinds and "lorentzian" in kinds:
            if kinds[0] == "lorentzian":
                e, f = f, e
            case = 2 if not is_stable(f) else None
        elif kinds == ("lorentzian", "lorentzian"):
            case = 3 if not is_stable(e) and not is_stable(f) else None
        else:
            case = None
        if case is None:
            return not_applicable(title, f"no case applies to signatures {kinds}")

        report = CheckReport(title=title, data={"case": case})
        verdict = check_multiplicativity(e, f)
        report.add(f"case {case}: H_min(E (x) F) = H_min(E) H_min(F)", verdict.equal,
                   f"{_fmt(verdict.lhs.sq_reduced)} vs {_fmt(verdict.rhs.sq_reduced)}")
        if case >= 2:
            _lorentzian_split(e, f, report, "F: ")
    except BudgetExhausted as e_:
        return _inconclusive(CheckReport(title=title), e_)
    return report


def check_isodual_reduction(e: GramLattice, f: GramLattice, heights: Optional[_Heights] = None) -> CheckReport:
    """
    With X = E[t] × E[t]^∨ balanced (s = t²):

        H(X⊗F)² = min(s·H(E⊗F)², H(E^∨⊗F)²/s) ≤ s·H(E⊗F)² ≤ s·H(E)²·H(F)²

    and X⊗F multiplicative forces E⊗F multiplicative. X is materialized and
    checked directly when s is rational and the rank fits the cap.
    """
    report = CheckReport(title="reduction to E[t] x E[t]^v")
    heights = heights or _Heights()
    try:
        pair = balance(e)
        s = pair.scale_sq
        a, f_sq = heights.sq(e), heights.sq(f)
        ef = heights.tensor_sq(e, f)
        evf = heights.tensor_sq(dual(e), f)
        x_f = min(ef * s, evf / s)
        report.data.update({"s": _fmt(s), "symbolic": pair.symbolic})

        report.add("balanced: s H(E)^2 = H(E^v)^2 / s", a * s == pair.dual_h_min_sq / s, f"s = {_fmt(s)}")
        x_sq = pair.balanced_sq
        report.add("H(X (x) F) <= t H(E) H(F)", x_f <= x_sq * f_sq,
                   f"{_fmt(x_f)} <= {_fmt(x_sq * f_sq)}")
        report.add("H(X (x) F) <= t H(E (x) F)", x_f <= ef * s)
        report.add("t H(E (x) F) <= t H(E) H(F)", ef * s <= a * s * f_sq)
        x_mult = x_f == x_sq * f_sq
        e_mult = ef == a * f_sq
        report.add("X (x) F multiplicative implies E (x) F multiplicative", (not x_mult) or e_mult,
                   f"X: {x_mult}, E: {e_mult}")

        if not pair.symbolic and 2 * e.rank * f.rank <= _rank_cap():
            doubled = double_dual_product(pair.scaled)
            report.add("X orthogonal and symplectic",
                       doubled.orthogonal.orthogonal and doubled.symplectic.symplectic)
            x = doubled.lattice
            report.add("H(X)^2 = s H(E)^2", heights.sq(x) == x_sq)
            report.add("H(X (x) F) direct = min formula", heights.tensor_sq(x, f) == x_f)
    except BudgetExhausted as e_:
        return _inconclusive(report, e_)
    return report


def _rank_cap() -> int:
    from src.utils.config import get_config
    return get_config().enumeration.rank_cap


def _semistable_step(e: GramLattice, f: GramLattice, heights: _Heights) -> CheckReport:
    """F semistable, E unstable with destabilizer E_1."""
    report = CheckReport(title="E unstable, F semistable")
    e1 = as_lattice(heights.flag(e).destabilizer)
    report.extend(check_isodual_reduction(e1, f, heights), prefix="E_1: ")
    e_sq, e1_sq, f_sq = heights.sq(e), heights.sq(e1), heights.sq(f)
    e1f = heights.tensor_sq(e1, f)
    ef = heights.tensor_sq(e, f)
    report.add("H(E) H(F) = H(E_1) H(F)", e_sq * f_sq == e1_sq * f_sq)
    report.add("H(E_1) H(F) = H(E_1 (x) F)", e1_sq * f_sq == e1f, f"{_fmt(e1_sq * f_sq)} vs {_fmt(e1f)}")
    report.add("H(E_1 (x) F) <= H(E (x) F)", e1f <= ef)
    report.add("H(E (x) F) <= H(E) H(F)", ef <= e_sq * f_sq)
    return report


def _unstable_step(
    e: GramLattice,
    f: GramLattice,
    f_witness: IsodualityWitness,
    heights: _Heights
) -> CheckReport:
    """Both unstable: the chain through F_1, F_(ℓ−1) and F/F_(ℓ−1) ≅ F_1^∨[1/c]."""
    report = CheckReport(title="E and F unstable")
    filtration = gs_filtration(f)
    ell = filtration.length
    f1_sub, last_sub = filtration.step(1), filtration.step(ell - 1)
    f1 = as_lattice(f1_sub)
    f_last = as_lattice(last_sub)
    top = quotient(f, last_sub)
    c = f_witness.ratio

    e_f1 = heights.tensor_sq(e, f1)
    e_last = heights.tensor_sq(e, f_last)
    ef = heights.tensor_sq(e, f)
    e_top = heights.tensor_sq(e, top)

    if ell > 2:
        middle = subquotient(f, f1_sub, last_sub)
        e_mid = heights.tensor_sq(e, middle)
        report.add("H(E (x) F_1) >= H(E (x) F_l-1)", e_f1 >= e_last)
        report.add("H(E (x) F_l-1) >= min(H(E (x) F_1), H(E (x) F_l-1/F_1))", e_last >= min(e_f1, e_mid))
        report.add("E (x) F_l-1/F_1 multiplicative", e_mid == heights.sq(e) * heights.sq(middle))
        report.add("H(F_1) <= H(F_l-1/F_1)", heights.sq(f1) <= heights.sq(middle))
    report.add("H(E (x) F_l-1) = H(E (x) F_1)", e_last == e_f1)

    report.add("H(E (x) F_l-1) >= H(E (x) F)", e_last >= ef)
    report.add("H(E (x) F) >= min(H(E (x) F_1), H(E (x) F/F_l-1))", ef >= min(e_f1, e_top),
               f"{_fmt(ef)} vs min({_fmt(e_f1)}, {_fmt(e_top)})")
    f1_dual = scale(dual(f1), 1 / c)
    report.add("F/F_l-1 isometric to F_1^v[1/c]", are_isometric(top, f1_dual), f"c = {c}")
    report.add("H(E (x) (F_1 x F/F_l-1)) = min", heights.tensor_sq(e, direct_product(f1, top)) == min(e_f1, e_top))
    report.extend(check_isodual_reduction(f1, e, heights), prefix="F_1: ")

    product = heights.sq(e) * heights.sq(f)
    report.add("H(E (x) F) = H(E) H(F)", ef == product, f"{_fmt(ef)} vs {_fmt(product)}")
    return report


def check_semistable_reduction(e: GramLattice, f: GramLattice) -> CheckReport:
    """
    Instantiate the reduction to semistable isodual factors: with F
    semistable the destabilizer of E is balanced and compared; with both
    unstable the chain runs through the filtration of F and its dual
    identification.
    """
    title = "reduction to semistable isodual factors"
    heights = _Heights()
    try:
        e_witness = isoduality_witness(e, sweep=False)
        f_witness = isoduality_witness(f, sweep=False)
        if e_witness is None or f_witness is None:
            return not_applicable(title, "both factors must be isodual")
        require_rank_cap(e.rank * f.rank)
        e_semi = heights.flag(e).destabilizer.rank == e.rank
        f_semi = heights.flag(f).destabilizer.rank == f.rank
        report = CheckReport(title=title)
        if e_semi and f_semi:
            verdict = check_multiplicativity(e, f)
            report.add("both semistable: multiplicative", verdict.equal)
        elif e_semi or f_semi:
            if e_semi:
                e, f = f, e
            report.extend(_semistable_step(e, f, heights), prefix="step 1: ")
        else:
            report.extend(_unstable_step(e, f, f_witness, heights), prefix="step 2: ")
    except BudgetExhausted as e_:
        return _inconclusive(CheckReport(title=title), e_)
    return report
