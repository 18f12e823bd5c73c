"""
Euclidean lattices given by rational Gram matrices.

A GramLattice is the standard integer lattice Zⁿ equipped with a positive
definite rational form. Sublattices are always saturated and carry their
canonical Hermite basis, so two Sublattice objects are equal exactly when
they are the same subgroup.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

from src.core.integer import complete_basis, hnf_rows, integer_kernel, saturate
from src.core.posreal import ONE, ExactPosReal, epr_cmp, epr_from_rat, epr_pow
from src.core.rational import (
    IntMatrix,
    Matrix,
    RatLike,
    block_diag,
    congruence,
    det_exact,
    format_matrix,
    inverse,
    kron,
    matmul,
    rank_exact,
    rat,
    require_positive_definite,
    scalar_mul,
    solve_left,
    to_int_matrix,
    to_matrix,
    transpose,
)
from src.utils.errors import DimensionError, DomainError, InvariantViolation, RankError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GramLattice:
    """Full-rank lattice Zⁿ with the positive-definite form `gram`."""
    gram: Matrix
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.gram:
            raise DimensionError("a lattice needs rank at least 1")
        require_positive_definite(self.gram)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> Fraction:
        return det_exact(self.gram)

    @cached_property
    def inverse_gram(self) -> Matrix:
        return inverse(self.gram)

    def norm(self, v: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, vi in enumerate(v):
            if vi:
                total += vi * sum((self.gram[i][j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
        return total

    def canonical_key(self) -> Dict[str, Any]:
        """Serialization used for cache keys and batch result keys."""
        return {"rank": self.rank, "gram": format_matrix(self.gram)}

    def named(self, label: str) -> "GramLattice":
        return GramLattice(self.gram, label)

    def __repr__(self) -> str:
        name = self.label or "GramLattice"
        return f"{name}({format_matrix(self.gram)})"


@dataclass(frozen=True)
class Sublattice:
    """Saturated sublattice of `ambient`, stored by its Hermite basis."""
    ambient: GramLattice
    basis: IntMatrix

    @cached_property
    def induced_gram(self) -> Matrix:
        return congruence(self.basis, self.ambient.gram)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def det(self) -> Fraction:
        return det_exact(self.induced_gram) if self.basis else Fraction(1)

    def contains(self, v: Sequence[int]) -> bool:
        coords = solve_left(self.basis, v)
        return coords is not None and all(c.denominator == 1 for c in coords)

    def is_subgroup_of(self, other: "Sublattice") -> bool:
        return all(other.contains(row) for row in self.basis)

    def coordinates(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Integer coordinates of a member vector in `basis`."""
        coords = solve_left(self.basis, v)
        if coords is None or any(c.denominator != 1 for c in coords):
            raise DomainError(f"{tuple(v)} is not in the sublattice")
        return tuple(int(c) for c in coords)

    def __repr__(self) -> str:
        return f"Sublattice(rank={self.rank}, basis={[list(r) for r in self.basis]})"


@dataclass(frozen=True)
class SqHeight:
    """H² (the Gram determinant) of a rank-`rank` lattice; rank 0 is the zero space."""
    value: ExactPosReal
    rank: int

    @property
    def sq_reduced(self) -> ExactPosReal:
        """H_r² = value^(1/rank)."""
        if self.rank == 0:
            return ONE
        return epr_pow(self.value, Fraction(1, self.rank))

    def scaled(self, s: ExactPosReal) -> "SqHeight":
        """Height after multiplying the form by s (s = t²)."""
        return SqHeight(self.value * epr_pow(s, self.rank), self.rank)


ZERO_SPACE = SqHeight(ONE, 0)


def make_lattice(gram: Sequence[Sequence[RatLike]], label: Optional[str] = None) -> GramLattice:
    """
    Validate a Gram matrix and build the lattice.

    Raises:
        ShapeError: non-square or asymmetric
        DefinitenessError: not positive definite (names the failing minor)
    """
    return GramLattice(to_matrix(gram), label)


def diagonal_lattice(*entries: RatLike, label: Optional[str] = None) -> GramLattice:
    n = len(entries)
    return make_lattice([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], label)


def height(x) -> SqHeight:
    """H² of a lattice or sublattice, exactly."""
    if isinstance(x, Sublattice):
        if x.rank == 0:
            return ZERO_SPACE
        return SqHeight(epr_from_rat(x.det), x.rank)
    return SqHeight(epr_from_rat(x.det), x.rank)


def cmp_reduced(a: SqHeight, b: SqHeight) -> int:
    """Order of H_r values: compare a.value^b.rank with b.value^a.rank."""
    if a.rank == 0 or b.rank == 0:
        return epr_cmp(a.sq_reduced, b.sq_reduced)
    return epr_cmp(epr_pow(a.value, b.rank), epr_pow(b.value, a.rank))


def dual(lattice: GramLattice) -> GramLattice:
    """Dual lattice in the dual basis: Gram = inverse Gram."""
    label = f"{lattice.label}^v" if lattice.label else None
    return GramLattice(lattice.inverse_gram, label)


def scale(lattice: GramLattice, s: RatLike) -> GramLattice:
    """E[t] with s = t²: every inner product multiplied by s."""
    s = rat(s)
    if s <= 0:
        raise DomainError(f"scale factor must be positive, got {s}")
    label = f"{lattice.label}[{s}]" if lattice.label else None
    return GramLattice(scalar_mul(s, lattice.gram), label)


def direct_product(e: GramLattice, f: GramLattice) -> GramLattice:
    label = f"{e.label}x{f.label}" if e.label and f.label else None
    return GramLattice(block_diag(e.gram, f.gram), label)


def tensor_product(e: GramLattice, f: GramLattice) -> GramLattice:
    """Kronecker Gram; basis e_i ⊗ f_j has index i·rank(F) + j."""
    label = f"{e.label}(x){f.label}" if e.label and f.label else None
    return GramLattice(to_matrix(kron(e.gram, f.gram)), label)


def tensor_vector(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    return tuple(x * y for x in a for y in b)


def sublattice(lattice: GramLattice, gens: Sequence[Sequence[int]]) -> Sublattice:
    """
    Saturated sublattice spanned by independent generators.

    Raises:
        RankError: generators are dependent
    """
    rows = to_int_matrix(gens)
    if any(len(r) != lattice.rank for r in rows):
        raise DimensionError(f"generators must have length {lattice.rank}")
    if rank_exact(rows) != len(rows):
        raise RankError("sublattice generators are linearly dependent")
    return Sublattice(lattice, saturate(rows, lattice.rank))


def span_sublattice(lattice: GramLattice, gens: Sequence[Sequence[int]]) -> Sublattice:
    """Saturation of the span of arbitrary (possibly dependent) generators."""
    return Sublattice(lattice, saturate(to_int_matrix(gens), lattice.rank))


def whole(lattice: GramLattice) -> Sublattice:
    return Sublattice(lattice, tuple(tuple(int(i == j) for j in range(lattice.rank)) for i in range(lattice.rank)))


def zero(lattice: GramLattice) -> Sublattice:
    return Sublattice(lattice, ())


def as_lattice(sub: Sublattice, label: Optional[str] = None) -> GramLattice:
    if sub.rank == 0:
        raise DimensionError("the zero space is not a lattice")
    return GramLattice(sub.induced_gram, label)


def _require_proper(lattice: GramLattice, sub: Sublattice) -> None:
    if sub.ambient.gram != lattice.gram:
        raise DimensionError("sublattice belongs to another lattice")
    if sub.rank == 0 or sub.rank == lattice.rank:
        raise DimensionError(f"quotient needs 0 < rank F < {lattice.rank}, got {sub.rank}")


def quotient_data(lattice: GramLattice, sub: Sublattice) -> Tuple[GramLattice, IntMatrix]:
    """
    Quotient lattice and the complement rows whose images form its basis.

    The quotient Gram is the Schur complement G_CC − G_CB·G_BB⁻¹·G_BC, i.e.
    the Gram of the complement projected orthogonally away from span(F).
    """
    _require_proper(lattice, sub)
    complement = complete_basis(sub.basis, lattice.rank)
    g = lattice.gram
    g_bb_inv = inverse(sub.induced_gram)
    g_cb = matmul(matmul(complement, g), transpose(sub.basis))
    g_cc = congruence(complement, g)
    correction = matmul(matmul(g_cb, g_bb_inv), transpose(g_cb))
    q = tuple(
        tuple(g_cc[i][j] - correction[i][j] for j in range(len(complement)))
        for i in range(len(complement))
    )
    result = GramLattice(q)
    if sub.det * result.det != lattice.det:
        raise InvariantViolation("det(L) != det(F)·det(L/F)")
    return result, complement


def quotient(lattice: GramLattice, sub: Sublattice) -> GramLattice:
    """L/F with the quotient metric."""
    return quotient_data(lattice, sub)[0]


def pullback(lattice: GramLattice, sub: Sublattice, coords: Sequence[Sequence[int]]) -> Sublattice:
    """
    Preimage in L of the sublattice of L/F spanned by `coords` (quotient coordinates).

    The result is F + span(coords·C), saturated.
    """
    if sub.rank == 0:
        return span_sublattice(lattice, coords) if coords else sub
    if sub.rank == lattice.rank:
        return sub
    _, complement = quotient_data(lattice, sub)
    lifted = [tuple(sum(c * row[j] for c, row in zip(vec, complement)) for j in range(lattice.rank))
              for vec in coords]
    return span_sublattice(lattice, list(sub.basis) + lifted)


def relative_sublattice(outer: Sublattice, inner: Sublattice) -> Sublattice:
    """`inner` expressed as a sublattice of the lattice of `outer`."""
    if not inner.is_subgroup_of(outer):
        raise DomainError("inner sublattice is not contained in outer")
    outer_lattice = as_lattice(outer)
    if inner.rank == 0:
        return zero(outer_lattice)
    return span_sublattice(outer_lattice, [outer.coordinates(row) for row in inner.basis])


def subquotient(lattice: GramLattice, lower: Sublattice, upper: Sublattice) -> GramLattice:
    """upper / lower for saturated lower ⊂ upper ⊂ L."""
    if lower.rank == 0:
        return as_lattice(upper)
    outer = as_lattice(upper)
    return quotient(outer, relative_sublattice(upper, lower))


def perp(sub: Sublattice) -> Sublattice:
    """
    F^⊥ = {φ ∈ L^∨ : φ(F) = 0}, as a sublattice of dual(L) in the dual basis.

    A functional with dual coordinates y vanishes on F iff basis(F)·y = 0.
    """
    lattice = sub.ambient
    dual_lattice = dual(lattice)
    if sub.rank == 0:
        return whole(dual_lattice)
    return Sublattice(dual_lattice, integer_kernel(sub.basis))


def image(sub: Sublattice, u: Sequence[Sequence[int]], target: GramLattice) -> Sublattice:
    """Image of a sublattice under x ↦ U·x (columns of U are images of basis vectors)."""
    rows = matmul(sub.basis, transpose(u)) if sub.basis else ()
    return Sublattice(target, hnf_rows(rows))


def check_dual_quotient(lattice: GramLattice, sub: Sublattice) -> bool:
    """quotient(dual L, F^⊥) is isometric to dual(F)."""
    from src.symmetry.isometry import are_isometric

    annihilator = perp(sub)
    q = quotient(annihilator.ambient, annihilator)
    target = dual(as_lattice(sub))
    return q.det == target.det and are_isometric(q, target)


def sq_height_from_det(det: RatLike, rank: int) -> SqHeight:
    return SqHeight(epr_from_rat(det), rank) if rank else ZERO_SPACE


def min_reduced(*heights: SqHeight) -> SqHeight:
    """Smallest H_r among the arguments (first one on ties)."""
    best = heights[0]
    for h in heights[1:]:
        if cmp_reduced(h, best) < 0:
            best = h
    return best
