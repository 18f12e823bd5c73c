"""
Grayson-Stuhler filtration, canonical polygon and stability predicates.

The filtration is built recursively: E_1 is the destabilizing subspace of L,
and E_i is the preimage of the destabilizing subspace of L/E_(i-1). Every
filtration is re-validated before it is returned: quotients must be
semistable and their reduced heights strictly increasing.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.checks import CheckReport
from src.core.integer import saturate
from src.core.posreal import ONE, ExactPosReal, epr_format, epr_from_rat
from src.core.rational import RatLike, rat, rref
from src.utils.budget_tracker import SearchBudget
from src.utils.errors import InvariantViolation
from .enumeration import minimum, reduced_form, short_vectors_with_norms
from .gram import (
    GramLattice,
    SqHeight,
    Sublattice,
    as_lattice,
    cmp_reduced,
    direct_product,
    dual,
    height,
    image,
    min_reduced,
    perp,
    pullback,
    quotient,
    scale,
    sq_height_from_det,
    subquotient,
    zero,
)
from .rankin import MinFlag, certified_radius, h_min

logger = logging.getLogger(__name__)

Vertex = Tuple[int, ExactPosReal]


@dataclass
class Filtration:
    """0 = E_0 ⊂ E_1 ⊂ … ⊂ E_ℓ = L with quotient heights and polygon vertices."""
    lattice: GramLattice
    steps: List[Sublattice]
    step_sq_heights: List[SqHeight]
    polygon: List[Vertex]
    certified: bool = True
    flags: List[MinFlag] = field(default_factory=list, repr=False)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def destabilizer(self) -> Sublattice:
        return self.steps[0]

    def step(self, i: int) -> Sublattice:
        """E_i for 0 ≤ i ≤ ℓ."""
        return zero(self.lattice) if i == 0 else self.steps[i - 1]

    def to_dict(self) -> Dict[str, object]:
        return {
            "length": self.length,
            "steps": [[list(r) for r in s.basis] for s in self.steps],
            "quotient_sq_reduced": [epr_format(h.sq_reduced) for h in self.step_sq_heights],
            "polygon": [[d, epr_format(v)] for d, v in self.polygon],
            "certified": self.certified,
        }


def _assemble(lattice: GramLattice, steps: List[Sublattice], flags: List[MinFlag], certified: bool) -> Filtration:
    heights: List[SqHeight] = []
    polygon: List[Vertex] = [(0, ONE)]
    previous_det, previous_rank = Fraction(1), 0
    for s in steps:
        heights.append(sq_height_from_det(s.det / previous_det, s.rank - previous_rank))
        polygon.append((s.rank, epr_from_rat(s.det)))
        previous_det, previous_rank = s.det, s.rank
    return Filtration(lattice, steps, heights, polygon, certified, flags)


def _recursive_filtration(lattice: GramLattice, destabilize) -> Filtration:
    steps: List[Sublattice] = []
    flags: List[MinFlag] = []
    certified = True
    current = zero(lattice)
    while current.rank < lattice.rank:
        if current.rank == 0:
            flag = destabilize(lattice)
            new = flag.destabilizer
            new = Sublattice(lattice, new.basis)
        else:
            flag = destabilize(quotient(lattice, current))
            new = pullback(lattice, current, flag.destabilizer.basis)
        certified = certified and flag.certified
        flags.append(flag)
        if new.rank <= current.rank:
            raise InvariantViolation("filtration step does not grow")
        steps.append(new)
        current = new
    return _assemble(lattice, steps, flags, certified)


def gs_filtration(
    lattice: GramLattice,
    validate: bool = True,
    budget: Optional[SearchBudget] = None
) -> Filtration:
    """
    The Grayson-Stuhler filtration of `lattice`.

    Args:
        lattice: Input lattice
        validate: Re-check semistable quotients and increasing heights
        budget: Shared search budget

    Raises:
        InvariantViolation: a characterizing condition fails
        BudgetExhausted: an enumeration ran out of budget
    """
    filtration = _recursive_filtration(lattice, lambda q: h_min(q, budget=budget))
    logger.info(f"filtration of {lattice!r}: length {filtration.length}")
    if validate:
        report = verify_filtration(lattice, filtration)
        if not report.passed:
            failed = ", ".join(c.name for c in report.failures())
            raise InvariantViolation(f"filtration failed validation: {failed}")
    return filtration


def canonical_polygon(lattice: GramLattice) -> List[Vertex]:
    """Vertices (dim E_i, H(E_i)²)."""
    return gs_filtration(lattice).polygon


def is_semistable(lattice: GramLattice) -> bool:
    return h_min(lattice).destabilizer.rank == lattice.rank


def is_stable(lattice: GramLattice, flag: Optional[MinFlag] = None) -> bool:
    """Semistable and every proper sublattice has strictly larger H_r."""
    if lattice.rank == 1:
        return True
    flag = flag or h_min(lattice)
    if flag.destabilizer.rank != lattice.rank:
        return False
    whole_height = height(lattice)
    return all(
        cmp_reduced(flag.profile.results[k].sq_height, whole_height) > 0
        for k in range(1, lattice.rank)
    )


def polygon_is_concave(polygon: Sequence[Vertex]) -> bool:
    """deg = −log H is strictly concave: edge values (Δ H²)^(1/Δdim) strictly increase."""
    edges = []
    for (d0, v0), (d1, v1) in zip(polygon, polygon[1:]):
        if d1 <= d0:
            return False
        edges.append(SqHeight(v1 / v0, d1 - d0))
    return all(cmp_reduced(a, b) < 0 for a, b in zip(edges, edges[1:]))


def verify_filtration(lattice: GramLattice, filtration: Filtration) -> CheckReport:
    """Independent re-check of the two characterizing conditions."""
    report = CheckReport(title="filtration")
    chain_ok = filtration.steps[-1].rank == lattice.rank and all(
        a.rank < b.rank and a.is_subgroup_of(b)
        for a, b in zip([zero(lattice)] + filtration.steps, filtration.steps)
    )
    report.add("strict saturated chain", chain_ok)
    report.add(
        "saturated steps",
        all(s.basis == saturate(s.basis, lattice.rank) for s in filtration.steps)
    )

    for i in range(1, filtration.length + 1):
        q = subquotient(lattice, filtration.step(i - 1), filtration.step(i))
        flag = h_min(q)
        report.add(
            f"E_{i}/E_{i - 1} semistable",
            flag.destabilizer.rank == q.rank,
            f"rank {q.rank}, destabilizer rank {flag.destabilizer.rank}"
        )

    increasing = all(
        cmp_reduced(a, b) < 0
        for a, b in zip(filtration.step_sq_heights, filtration.step_sq_heights[1:])
    )
    report.add("quotient H_r strictly increasing", increasing,
               ", ".join(epr_format(h.sq_reduced) for h in filtration.step_sq_heights))
    report.add("canonical polygon concave", polygon_is_concave(filtration.polygon))
    return report


def _oracle_h_min(lattice: GramLattice, radius_factor: Fraction) -> Tuple[SqHeight, Sublattice, int]:
    """Unpruned enumeration of all sublattices spanned by short vectors."""
    n = lattice.rank
    lambda1_sq = minimum(lattice)
    _, t = reduced_form(lattice.gram)
    radius = Fraction(0)
    for k in range(1, n):
        upper = Sublattice(lattice, saturate(t[:k], n)).det
        radius = max(radius, certified_radius(k, upper, lambda1_sq) * radius_factor)
    vectors = [v for _, v in short_vectors_with_norms(lattice, radius)] if n > 1 else []

    found: Dict[Tuple, Sublattice] = {}
    for k in range(1, n):
        for combo in itertools.combinations(vectors, k):
            key = rref(combo)
            if len(key) != k or key in found:
                continue
            found[key] = Sublattice(lattice, saturate(combo, n))
    candidates = list(found.values()) + [Sublattice(lattice, saturate(t, n))]

    best = min_reduced(*(height(c) for c in candidates))
    winners = [c for c in candidates if cmp_reduced(height(c), best) == 0]
    destabilizer = Sublattice(lattice, saturate([r for c in winners for r in c.basis], n))
    return best, destabilizer, len(found)


@dataclass
class _OracleFlag:
    destabilizer: Sublattice
    certified: bool = True


def brute_force_filtration(
    lattice: GramLattice,
    radius_factor: RatLike = 4,
    check_stability: bool = True
) -> Filtration:
    """
    Oracle filtration from unpruned enumeration at radius_factor × the
    certified radius; with check_stability the destabilizers must not change
    when the factor doubles.

    Raises:
        InvariantViolation: the oracle is not radius-stable
    """
    factor = rat(radius_factor)

    def destabilize(q: GramLattice) -> _OracleFlag:
        best, destab, _ = _oracle_h_min(q, factor)
        if check_stability:
            best2, destab2, _ = _oracle_h_min(q, 2 * factor)
            if destab2.basis != destab.basis or cmp_reduced(best, best2) != 0:
                raise InvariantViolation("oracle is not radius-stable")
        return _OracleFlag(destab)

    steps: List[Sublattice] = []
    current = zero(lattice)
    while current.rank < lattice.rank:
        if current.rank == 0:
            new = Sublattice(lattice, destabilize(lattice).destabilizer.basis)
        else:
            new = pullback(lattice, current, destabilize(quotient(lattice, current)).destabilizer.basis)
        steps.append(new)
        current = new
    return _assemble(lattice, steps, [], True)


def verify_dual_reversal(lattice: GramLattice, filtration: Optional[Filtration] = None) -> CheckReport:
    """Filtration of the dual equals (E_(ℓ-1))^⊥ ⊂ … ⊂ (E_0)^⊥."""
    report = CheckReport(title="dual reversal")
    filtration = filtration or gs_filtration(lattice)
    dual_filtration = gs_filtration(dual(lattice))
    ell = filtration.length
    expected = [perp(filtration.step(ell - j)) for j in range(1, ell + 1)]
    report.add("same length", dual_filtration.length == ell,
               f"{dual_filtration.length} vs {ell}")
    for j, (got, want) in enumerate(zip(dual_filtration.steps, expected), start=1):
        report.add(f"dual step {j} = E_{ell - j}^perp", got.basis == want.basis,
                   basis=[list(r) for r in got.basis])
    return report


def verify_scale_equivariance(lattice: GramLattice, s: RatLike) -> CheckReport:
    """Scaling keeps the steps and multiplies each rank-r height by s^r."""
    s = rat(s)
    report = CheckReport(title=f"scale equivariance (s = {s})")
    base = gs_filtration(lattice)
    scaled = gs_filtration(scale(lattice, s))
    report.add("same steps", [a.basis for a in base.steps] == [b.basis for b in scaled.steps])
    factor = epr_from_rat(s)
    report.add(
        "heights scale by s^rank",
        all(h.scaled(factor) == g for h, g in zip(base.step_sq_heights, scaled.step_sq_heights))
    )
    return report


def verify_isometry_transport(lattice: GramLattice, u: Sequence[Sequence[int]]) -> CheckReport:
    """
    For unimodular U, the lattice M with Gram UᵀGU maps isometrically onto L
    by U; the filtration of L must be the image of the filtration of M.
    """
    from src.core.rational import congruence, transpose

    report = CheckReport(title="isometry transport")
    moved = GramLattice(congruence(transpose(u), lattice.gram))
    base = gs_filtration(lattice)
    other = gs_filtration(moved)
    report.add("same length", base.length == other.length)
    for i, (a, b) in enumerate(zip(other.steps, base.steps), start=1):
        report.add(f"U(E_{i}) = E_{i}", image(a, u, lattice).basis == b.basis)
    return report


def check_ds_bounds(lattice: GramLattice, sub: Sublattice) -> CheckReport:
    """min(H_min(F), H_min(L/F)) ≤ H_min(L) ≤ H_min(F) for proper saturated F."""
    report = CheckReport(title="minimal height of an extension")
    h_l = h_min(lattice).h_min
    h_f = h_min(as_lattice(sub)).h_min
    h_q = h_min(quotient(lattice, sub)).h_min
    report.add("H_min(L) <= H_min(F)", cmp_reduced(h_l, h_f) <= 0)
    report.add("min(H_min(F), H_min(L/F)) <= H_min(L)", cmp_reduced(min_reduced(h_f, h_q), h_l) <= 0)
    return report


def check_ds_product(e: GramLattice, f: GramLattice) -> CheckReport:
    """H_min(E × F) = min(H_min(E), H_min(F))."""
    report = CheckReport(title="minimal height of a product")
    product = h_min(direct_product(e, f)).h_min
    expected = min_reduced(h_min(e).h_min, h_min(f).h_min)
    report.add("H_min(E x F) = min", cmp_reduced(product, expected) == 0,
               f"{epr_format(product.sq_reduced)} vs {epr_format(expected.sq_reduced)}")
    return report
