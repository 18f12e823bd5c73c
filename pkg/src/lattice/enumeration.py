"""
Exact short-vector enumeration (Fincke-Pohst) over rational Gram matrices.

The Gram matrix is LLL-reduced first; enumeration runs in reduced
coordinates on the exact LDLᵀ decomposition and results are mapped back.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from src.core.integer import lll_reduce_gram
from src.core.rational import IntMatrix, Matrix, gram_ldl, rat, RatLike
from src.utils.budget_tracker import SearchBudget
from src.utils.errors import BudgetExhausted, DomainError
from .gram import GramLattice

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@lru_cache(maxsize=256)
def reduced_form(gram: Matrix) -> Tuple[Matrix, IntMatrix]:
    """Cached exact LLL reduction (reduced Gram, transform T)."""
    return lll_reduce_gram(gram)


def integer_window(center: Fraction, radius_sq: Fraction) -> Tuple[int, int]:
    """
    Smallest and largest integer x with (x − center)² ≤ radius_sq.

    Returns (1, 0) when the window holds no integer.
    """
    if radius_sq < 0:
        return 1, 0
    nearest = min(math.floor(center), math.ceil(center), key=lambda x: (x - center) ** 2)
    if (nearest - center) ** 2 > radius_sq:
        return 1, 0
    # both scans stop at `nearest` at the latest
    spread = math.isqrt(math.ceil(radius_sq)) + 1
    lo = math.floor(center) - spread
    while (lo - center) ** 2 > radius_sq:
        lo += 1
    hi = math.ceil(center) + spread
    while (hi - center) ** 2 > radius_sq:
        hi -= 1
    return lo, hi


def _canonical_sign(v: Sequence[int]) -> Vector:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def short_vectors_with_norms(
    lattice: GramLattice,
    bound: RatLike,
    budget: Optional[SearchBudget] = None
) -> List[Tuple[Fraction, Vector]]:
    """
    All nonzero v with vᵀGv ≤ bound, one per ±pair, as (norm, v) pairs.

    Sorted by norm, then lexicographically; the representative of each pair
    has a positive first nonzero coordinate.
    """
    bound = rat(bound)
    if bound <= 0:
        raise DomainError(f"enumeration bound must be positive, got {bound}")
    own_budget = budget is None
    if own_budget:
        budget = SearchBudget("short_vectors")

    reduced, t = reduced_form(lattice.gram)
    low, d = gram_ldl(reduced)
    n = lattice.rank
    x = [0] * n
    found: List[Tuple[Fraction, Vector]] = []

    def descend(i: int, remaining: Fraction, leading_zero: bool) -> None:
        budget.tick()
        center = -sum((low[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
        lo, hi = integer_window(center, remaining / d[i])
        if leading_zero:
            lo = max(lo, 0)
        for value in range(lo, hi + 1):
            x[i] = value
            rest = remaining - d[i] * (value - center) ** 2
            if i == 0:
                if leading_zero and value == 0:
                    continue
                v = tuple(sum(x[k] * t[k][j] for k in range(n)) for j in range(n))
                found.append((bound - rest, _canonical_sign(v)))
            else:
                descend(i - 1, rest, leading_zero and value == 0)
        x[i] = 0

    try:
        descend(n - 1, bound, True)
    except BudgetExhausted:
        if own_budget:
            budget.finish(exhausted=True)
        raise
    if own_budget:
        budget.finish()

    found.sort()
    logger.debug(f"short_vectors: {len(found)} pairs with norm <= {bound} (rank {n})")
    return found


def short_vectors(
    lattice: GramLattice,
    bound: RatLike,
    budget: Optional[SearchBudget] = None
) -> List[Vector]:
    """Vectors of norm ≤ bound, one per ±pair, sorted by norm then lexicographically."""
    return [v for _, v in short_vectors_with_norms(lattice, bound, budget)]


def minimum(lattice: GramLattice, budget: Optional[SearchBudget] = None) -> Fraction:
    """λ₁² exactly."""
    reduced, _ = reduced_form(lattice.gram)
    bound = min(reduced[i][i] for i in range(lattice.rank))
    return short_vectors_with_norms(lattice, bound, budget)[0][0]


def independent_prefix(vectors: Sequence[Vector], k: int) -> List[Vector]:
    """Greedily pick the first k linearly independent vectors."""
    from src.core.rational import rank_exact

    chosen: List[Vector] = []
    for v in vectors:
        if rank_exact(chosen + [v]) == len(chosen) + 1:
            chosen.append(v)
            if len(chosen) == k:
                break
    return chosen
