"""
Certified Rankin minima and minimal reduced height.

rankin_min(L, k) finds the smallest Gram determinant d_k of a saturated
rank-k sublattice. Any minimizer F is the saturation of the span of k
independent vectors attaining its successive minima, and Minkowski's second
theorem bounds those norms:

    λ₁(L)^(2(i-1)) · λ_k(F)² ≤ ∏ λ_i(F)² ≤ γ_k^k · det(F) ≤ γ_k^k · D

where D is the best determinant found so far. The search enumerates every
short vector within that radius and runs a branch and bound over increasing
index tuples, pruning a prefix as soon as the same product bound fails.
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.integer import saturate
from src.core.rational import rref
from src.utils.budget_tracker import SearchBudget
from src.utils.config import get_config
from src.utils.errors import BudgetExhausted, DimensionError, InvariantViolation
from .enumeration import Vector, independent_prefix, minimum, reduced_form, short_vectors_with_norms
from .gram import (
    GramLattice,
    SqHeight,
    Sublattice,
    cmp_reduced,
    dual,
    height,
    perp,
    span_sublattice,
    sq_height_from_det,
    whole,
)

logger = logging.getLogger(__name__)

# γ_k^k for k ≤ 8 (exact Hermite constants); beyond that Hermite's bound (4/3)^(k(k-1)/2)
HERMITE_POWER = {
    1: Fraction(1),
    2: Fraction(4, 3),
    3: Fraction(2),
    4: Fraction(4),
    5: Fraction(8),
    6: Fraction(64, 3),
    7: Fraction(64),
    8: Fraction(256),
}


def hermite_power(k: int) -> Fraction:
    """Certified upper bound for γ_k^k."""
    if k in HERMITE_POWER:
        return HERMITE_POWER[k]
    return Fraction(4, 3) ** (k * (k - 1) // 2)


def certified_radius(k: int, best_det: Fraction, lambda1_sq: Fraction) -> Fraction:
    """Bound on λ_k(F)² for any saturated rank-k F with det(F) ≤ best_det."""
    return hermite_power(k) * best_det / lambda1_sq ** (k - 1)


@dataclass
class RankinResult:
    """Minimum d_k with its witness and every tied minimizer found."""
    rank: int
    det: Fraction
    witness: Sublattice
    minimizers: List[Sublattice]
    radius: Fraction
    certified: bool = True

    @property
    def sq_height(self) -> SqHeight:
        return sq_height_from_det(self.det, self.rank)


@dataclass
class RankinProfile:
    """d_k for k = 1..n (a prefix when max_rank was given)."""
    lattice: GramLattice
    results: Dict[int, RankinResult] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return all(r.certified for r in self.results.values())

    def d(self, k: int) -> Fraction:
        return self.results[k].det

    def witness(self, k: int) -> Sublattice:
        return self.results[k].witness


class RowEchelon:
    """Incremental rational row echelon used for independence tests."""

    def __init__(self, rows: Sequence[Tuple[int, List[Fraction]]] = ()):
        self.rows = list(rows)

    def reduce(self, v: Sequence[int]) -> Optional[Tuple[int, List[Fraction]]]:
        w = [Fraction(x) for x in v]
        for col, row in self.rows:
            if w[col]:
                f = w[col]
                w = [a - f * b for a, b in zip(w, row)]
        pivot = next((i for i, a in enumerate(w) if a), None)
        if pivot is None:
            return None
        p = w[pivot]
        return pivot, [a / p for a in w]

    def extended(self, entry: Tuple[int, List[Fraction]]) -> "RowEchelon":
        return RowEchelon(self.rows + [entry])


class _RankinSearch:
    """Branch and bound over index tuples of a norm-sorted vector list."""

    def __init__(
        self,
        lattice: GramLattice,
        k: int,
        vectors: List[Tuple[Fraction, Vector]],
        best_det: Fraction,
        budget: SearchBudget
    ):
        self.lattice = lattice
        self.k = k
        self.vectors = vectors
        self.gamma = hermite_power(k)
        self.best_det = best_det
        self.minimizers: Dict[Tuple, Sublattice] = {}
        self.seen: set = set()
        self.budget = budget
        self.lock = threading.Lock()

    def _score(self, chosen: List[Vector]) -> None:
        key = rref(chosen)
        with self.lock:
            if key in self.seen:
                return
            self.seen.add(key)
        basis = saturate(chosen, self.lattice.rank)
        candidate = Sublattice(self.lattice, basis)
        det = candidate.det
        with self.lock:
            if det < self.best_det:
                self.best_det = det
                self.minimizers = {basis: candidate}
            elif det == self.best_det:
                self.minimizers[basis] = candidate

    def _extend(self, start: int, chosen: List[Vector], product: Fraction, echelon: RowEchelon) -> None:
        depth = len(chosen)
        if depth == self.k:
            self._score(chosen)
            return
        remaining = self.k - depth
        for index in range(start, len(self.vectors) - remaining + 1):
            self.budget.tick()
            norm, v = self.vectors[index]
            # norms are sorted: once the bound fails it fails for every later index
            if product * norm ** remaining > self.gamma * self.best_det:
                break
            entry = echelon.reduce(v)
            if entry is None:
                continue
            self._extend(index + 1, chosen + [v], product * norm, echelon.extended(entry))

    def run_branch(self, first: int) -> None:
        norm, v = self.vectors[first]
        if norm ** self.k > self.gamma * self.best_det:
            return
        echelon = RowEchelon()
        self._extend(first + 1, [v], norm, echelon.extended(echelon.reduce(v)))

    def run(self, threads: int = 1) -> None:
        indices = range(len(self.vectors) - self.k + 1)
        if threads <= 1 or self.k == 1:
            for first in indices:
                self.run_branch(first)
            return
        with ThreadPoolExecutor(max_workers=threads) as executor:
            # list() re-raises the first branch failure (e.g. budget exhaustion)
            list(executor.map(self.run_branch, indices))


def _from_cache(lattice: GramLattice, k: int) -> Optional[RankinResult]:
    config = get_config()
    if not config.cache.enabled:
        return None
    from src.utils.cache_manager import get_cache_manager

    payload = get_cache_manager().get_profile(lattice.canonical_key(), k)
    if payload is None:
        return None
    minimizers = [Sublattice(lattice, tuple(tuple(r) for r in basis)) for basis in payload["minimizers"]]
    return RankinResult(k, Fraction(payload["det"]), minimizers[0], minimizers,
                        Fraction(payload["radius"]), payload["certified"])


def _to_cache(lattice: GramLattice, result: RankinResult) -> None:
    config = get_config()
    if not config.cache.enabled or not result.certified:
        return
    from src.utils.cache_manager import get_cache_manager

    get_cache_manager().set_profile(lattice.canonical_key(), result.rank, {
        "det": str(result.det),
        "minimizers": [[list(r) for r in m.basis] for m in result.minimizers],
        "radius": str(result.radius),
        "certified": result.certified,
    })


def _search(
    lattice: GramLattice,
    k: int,
    radius_factor: Fraction,
    certified: bool,
    budget: SearchBudget
) -> RankinResult:
    n = lattice.rank
    lambda1_sq = minimum(lattice, budget)

    # initial D: saturation of k shortest independent vectors
    reduced, _ = reduced_form(lattice.gram)
    seed_bound = sorted(reduced[i][i] for i in range(n))[k - 1]
    seed = independent_prefix([v for _, v in short_vectors_with_norms(lattice, seed_bound, budget)], k)
    best = Sublattice(lattice, saturate(seed, n))
    best_det = best.det

    radius = certified_radius(k, best_det, lambda1_sq) * radius_factor
    vectors = short_vectors_with_norms(lattice, radius, budget)
    logger.debug(f"rankin_min rank {k}/{n}: radius {radius}, {len(vectors)} vectors, seed det {best_det}")

    search = _RankinSearch(lattice, k, vectors, best_det, budget)
    search.minimizers = {best.basis: best}
    search.run(get_config().batch.threads)

    minimizers = [search.minimizers[b] for b in sorted(search.minimizers)]
    return RankinResult(k, search.best_det, minimizers[0], minimizers, radius, certified)


def rankin_min(
    lattice: GramLattice,
    k: int,
    radius_factor: Fraction = Fraction(1),
    budget: Optional[SearchBudget] = None
) -> RankinResult:
    """
    Certified minimal determinant of a saturated rank-k sublattice.

    Args:
        lattice: The ambient lattice
        k: Sublattice rank, 1 ≤ k ≤ n
        radius_factor: Enlarges the certified radius (oracle runs)
        budget: Shared search budget (a fresh one from configuration otherwise)

    Returns:
        RankinResult with d_k, a witness and all tied minimizers

    Raises:
        DimensionError: k out of range
        BudgetExhausted: the search hit its node or time budget
    """
    n = lattice.rank
    if not 1 <= k <= n:
        raise DimensionError(f"rank {k} outside 1..{n}")
    if k == n:
        full = whole(lattice)
        return RankinResult(k, lattice.det, full, [full], Fraction(0))

    cached = _from_cache(lattice, k) if radius_factor == 1 else None
    if cached is not None:
        return cached

    override = get_config().enumeration.uncertified_radius
    certified = override is None
    factor = radius_factor * (override if override is not None else 1)

    own_budget = budget is None
    if own_budget:
        budget = SearchBudget("rankin_min")
    try:
        if 2 * k > n:
            # d_k(L) = det(L) · d_(n-k)(L^∨), witnesses are annihilators
            co = _search(dual(lattice), n - k, factor, certified, budget)
            minimizers = sorted(
                (Sublattice(lattice, perp(m).basis) for m in co.minimizers),
                key=lambda s: s.basis
            )
            result = RankinResult(k, lattice.det * co.det, minimizers[0], minimizers, co.radius, certified)
        else:
            result = _search(lattice, k, factor, certified, budget)
    except BudgetExhausted:
        if own_budget:
            budget.finish(exhausted=True)
        logger.warning(f"rankin_min rank {k} of {lattice!r}: budget exhausted")
        raise
    if own_budget:
        budget.finish()

    if result.witness.det != result.det:
        raise InvariantViolation("Rankin witness does not attain the minimum")
    _to_cache(lattice, result)
    return result


def rankin_profile(
    lattice: GramLattice,
    max_rank: Optional[int] = None,
    radius_factor: Fraction = Fraction(1),
    budget: Optional[SearchBudget] = None
) -> RankinProfile:
    """d_k and witnesses for k = 1..max_rank (default n)."""
    top = lattice.rank if max_rank is None else min(max_rank, lattice.rank)
    profile = RankinProfile(lattice)
    for k in range(1, top + 1):
        profile.results[k] = rankin_min(lattice, k, radius_factor, budget)
    return profile


@dataclass
class MinFlag:
    """H_min with every minimizer found and the destabilizing subspace."""
    h_min: SqHeight
    minimizers: List[Sublattice]
    destabilizer: Sublattice
    profile: RankinProfile

    @property
    def certified(self) -> bool:
        return self.profile.certified


def h_min(
    lattice: GramLattice,
    radius_factor: Fraction = Fraction(1),
    budget: Optional[SearchBudget] = None,
    profile: Optional[RankinProfile] = None
) -> MinFlag:
    """
    Minimal reduced height and destabilizing subspace.

    The destabilizer is the saturation of the sum of all minimizers; it must
    itself attain H_min.

    Raises:
        InvariantViolation: the sum of minimizers has larger reduced height
    """
    if profile is None:
        profile = rankin_profile(lattice, radius_factor=radius_factor, budget=budget)

    best: Optional[SqHeight] = None
    for k in sorted(profile.results):
        h = profile.results[k].sq_height
        if best is None or cmp_reduced(h, best) < 0:
            best = h

    minimizers: List[Sublattice] = []
    for k in sorted(profile.results):
        result = profile.results[k]
        if cmp_reduced(result.sq_height, best) == 0:
            minimizers.extend(result.minimizers)

    destabilizer = span_sublattice(lattice, [row for m in minimizers for row in m.basis])
    if cmp_reduced(height(destabilizer), best) != 0:
        logger.error(f"sum of minimizers of {lattice!r} has rank {destabilizer.rank} and det {destabilizer.det}")
        raise InvariantViolation("destabilizer does not attain H_min")
    if not all(m.is_subgroup_of(destabilizer) for m in minimizers):
        raise InvariantViolation("a minimizer escapes the destabilizer")

    return MinFlag(best, minimizers, destabilizer, profile)


def describe_profile(profile: RankinProfile) -> List[Dict[str, object]]:
    """Rows for CLI tables and reports."""
    rows = []
    for k in sorted(profile.results):
        r = profile.results[k]
        rows.append({
            "rank": k,
            "d_k": str(r.det),
            "witness": [list(row) for row in r.witness.basis],
            "minimizers": len(r.minimizers),
            "radius": str(r.radius),
            "certified": r.certified,
        })
    return rows
