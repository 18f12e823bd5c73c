"""
Tensor multiplicativity of the minimal height, and the two constructions the
reduction arguments rely on: the product E × E^∨ and the balancing scale.

Heights are compared as squared reduced heights H_r² in ExactPosReal
arithmetic, so irrational scales never need a Gram matrix.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

import sympy

from src.core.checks import CheckReport
from src.core.posreal import ExactPosReal, epr_format, epr_is_rational, epr_pow, epr_to_rat
from src.lattice.gram import (
    GramLattice,
    SqHeight,
    Sublattice,
    cmp_reduced,
    direct_product,
    dual,
    height,
    scale,
    span_sublattice,
    tensor_product,
    tensor_vector,
)
from src.lattice.rankin import MinFlag, h_min
from src.symmetry.isoduality import IsodualityWitness, verify_witness, witness_from_maps
from src.utils.budget_tracker import SearchBudget
from src.utils.config import get_config
from src.utils.errors import InvariantViolation, RankCapExceeded

logger = logging.getLogger(__name__)


def require_rank_cap(rank: int) -> None:
    """
    Raises:
        RankCapExceeded: rank above the configured cap outside uncertified mode
    """
    enumeration = get_config().enumeration
    if rank > enumeration.rank_cap and enumeration.uncertified_radius is None:
        raise RankCapExceeded(
            f"tensor rank {rank} exceeds the rank cap {enumeration.rank_cap}; "
            f"raise --rank-cap or pass --uncertified-radius"
        )


def tensor_height(e: SqHeight, f: SqHeight) -> SqHeight:
    """Height of E₁ ⊗ F₁ from the heights of its factors: det(E₁)^rk F₁ · det(F₁)^rk E₁."""
    return SqHeight(epr_pow(e.value, f.rank) * epr_pow(f.value, e.rank), e.rank * f.rank)


def tensor_sublattice(product: GramLattice, a: Sublattice, b: Sublattice) -> Sublattice:
    """a ⊗ b inside E ⊗ F."""
    return span_sublattice(product, [tensor_vector(x, y) for x in a.basis for y in b.basis])


@dataclass
class MultiplicativityVerdict:
    """H_min(E⊗F) against H_min(E)·H_min(F), exactly."""
    e: GramLattice
    f: GramLattice
    lhs: SqHeight
    rhs: SqHeight
    equal: bool
    violating_witness: Optional[Sublattice] = None
    certified: bool = True
    reverification: Optional[CheckReport] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "lhs_sq_reduced": epr_format(self.lhs.sq_reduced),
            "rhs_sq_reduced": epr_format(self.rhs.sq_reduced),
            "lhs_rank": self.lhs.rank,
            "equal": self.equal,
            "certified": self.certified,
            "violating_witness": (
                [list(r) for r in self.violating_witness.basis] if self.violating_witness else None
            ),
        }


def check_multiplicativity(
    e: GramLattice,
    f: GramLattice,
    budget: Optional[SearchBudget] = None,
    flags: Optional[Dict[str, MinFlag]] = None
) -> MultiplicativityVerdict:
    """
    Compare H_min(E⊗F)² with H_min(E)²·H_min(F)².

    The inequality lhs ≤ rhs is witnessed by E₁⊗F₁ and asserted. A strictly
    smaller lhs is reverified independently before it is reported.

    Raises:
        RankCapExceeded: rank(E)·rank(F) above the cap
        InvariantViolation: the one-sided bound fails
    """
    require_rank_cap(e.rank * f.rank)
    flags = flags or {}
    flag_e = flags.get("e") or h_min(e, budget=budget)
    flag_f = flags.get("f") or h_min(f, budget=budget)
    product = tensor_product(e, f)
    flag_t = h_min(product, budget=budget)

    rhs = tensor_height(flag_e.h_min, flag_f.h_min)
    pure = tensor_sublattice(product, flag_e.destabilizer, flag_f.destabilizer)
    if cmp_reduced(height(pure), rhs) != 0:
        raise InvariantViolation("height of E1 (x) F1 differs from the product of heights")
    order = cmp_reduced(flag_t.h_min, rhs)
    if order > 0:
        raise InvariantViolation("H_min(E (x) F) exceeds H_min(E) H_min(F)")

    verdict = MultiplicativityVerdict(
        e=e,
        f=f,
        lhs=flag_t.h_min,
        rhs=rhs,
        equal=order == 0,
        certified=flag_e.certified and flag_f.certified and flag_t.certified,
    )
    if order < 0:
        verdict.violating_witness = flag_t.destabilizer
        verdict.reverification = reverify_witness(e, f, flag_t.destabilizer, rhs)
        logger.error(
            f"multiplicativity fails for {e!r} (x) {f!r}: "
            f"{epr_format(flag_t.h_min.sq_reduced)} < {epr_format(rhs.sq_reduced)}; "
            f"reverification {verdict.reverification.status}"
        )
    else:
        logger.info(f"{e!r} (x) {f!r}: H_min multiplicative ({epr_format(rhs.sq_reduced)})")
    return verdict


def reverify_witness(e: GramLattice, f: GramLattice, witness: Sublattice, rhs: SqHeight) -> CheckReport:
    """
    Recompute det of the witness from scratch with sympy and compare
    det^(rank rhs) < rhs^(rank witness) in integers.
    """
    report = CheckReport(title="independent reverification")
    m = f.rank
    ge = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in e.gram])
    gf = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in f.gram])
    gram = sympy.Matrix(e.rank * m, e.rank * m, lambda i, j: ge[i // m, j // m] * gf[i % m, j % m])
    basis = sympy.Matrix([list(r) for r in witness.basis])
    det = (basis * gram * basis.T).det()
    report.add("witness det matches", sympy.Rational(witness.det.numerator, witness.det.denominator) == det,
               str(det))
    if not epr_is_rational(rhs.value):
        report.add("product height rational", False)
        return report
    bound = epr_to_rat(rhs.value)
    bound = sympy.Rational(bound.numerator, bound.denominator)
    report.add("witness below the product", det ** rhs.rank < bound ** witness.rank)
    return report


@dataclass
class DoubleDual:
    """E × E^∨ with its swap witnesses."""
    base: GramLattice
    lattice: GramLattice
    orthogonal: IsodualityWitness
    symplectic: IsodualityWitness


def double_dual_product(e: GramLattice) -> DoubleDual:
    """
    E × E^∨ with σ(x, φ) = (φ, x) (symmetric pairing) and
    σ′(x, φ) = (−φ, x) (alternating pairing); both have ratio 1.
    """
    n = e.rank
    lattice = direct_product(e, dual(e))
    swap = tuple(tuple(int(j == (i + n) % (2 * n)) for j in range(2 * n)) for i in range(2 * n))
    signed = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        signed[i][n + i] = -1
        signed[n + i][i] = 1
    signed = tuple(tuple(r) for r in signed)
    for u in (swap, signed):
        if verify_witness(lattice, u) != 1:
            raise InvariantViolation("swap map of E x E^v is not a similarity of ratio 1")
    return DoubleDual(
        base=e,
        lattice=lattice,
        orthogonal=witness_from_maps(lattice, [swap], complete=False),
        symplectic=witness_from_maps(lattice, [signed], complete=False),
    )


@dataclass
class BalancedPair:
    """E with s = t² making H_min(E[t]) = H_min(E[t]^∨)."""
    base: GramLattice
    scale_sq: ExactPosReal
    symbolic: bool
    h_min_sq: ExactPosReal
    dual_h_min_sq: ExactPosReal
    scaled: Optional[GramLattice] = None

    @property
    def balanced_sq(self) -> ExactPosReal:
        """H_min(E[t])², equal to H_min(E[t]^∨)²."""
        return self.h_min_sq * self.scale_sq

    def scale_rational(self) -> Optional[Fraction]:
        return None if self.symbolic else epr_to_rat(self.scale_sq)


def balance(e: GramLattice, budget: Optional[SearchBudget] = None) -> BalancedPair:
    """
    s = (H_min(E^∨)² / H_min(E)²)^(1/2); scale(E, s) is materialized when s is rational.

    Raises:
        InvariantViolation: the balancing identity fails
    """
    a = h_min(e, budget=budget).h_min.sq_reduced
    b = h_min(dual(e), budget=budget).h_min.sq_reduced
    s = epr_pow(b / a, Fraction(1, 2))
    if a * s != b / s:
        raise InvariantViolation("balancing scale does not equalize the heights")
    symbolic = not epr_is_rational(s)
    scaled = None if symbolic else scale(e, epr_to_rat(s))
    return BalancedPair(e, s, symbolic, a, b, scaled)
