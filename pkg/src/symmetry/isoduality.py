"""
Isoduality witnesses and the pairing forms they induce.

A similarity σ: L → L^∨ is an integer matrix U (columns are the images of
the basis vectors, in the dual basis) with Uᵀ·G⁻¹·U = c·G. Taking
determinants forces cⁿ·det(G)² = 1, so c is rational or L is not isodual
over Q. The pairing b_σ(x, y) = σ(x)(y) has matrix S = Uᵀ, and the
similarity of L itself is τ = G⁻¹·U.

Any two witnesses differ by an automorphism of L, so types and signatures
are collected over the whole coset σ∘Aut(L).
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence

from src.core.checks import CheckReport, not_applicable
from src.core.integer import hnf_rows
from src.core.posreal import epr_from_rat, epr_is_rational, epr_pow, epr_to_rat
from src.core.rational import (
    IntMatrix,
    Matrix,
    bilinear,
    identity,
    is_antisymmetric,
    is_symmetric,
    is_zero,
    matmul,
    scalar_mul,
    signature_value,
    to_int_matrix,
    to_matrix,
    transpose,
)
from src.lattice.enumeration import reduced_form, short_vectors
from src.lattice.filtration import Filtration, gs_filtration, is_semistable
from src.lattice.gram import GramLattice, direct_product, dual, image, perp, scale, subquotient
from src.lattice.rankin import h_min
from src.utils.budget_tracker import SearchBudget
from src.utils.errors import BudgetExhausted
from .isometry import AutGroup, automorphisms, group_elements, isometries

logger = logging.getLogger(__name__)

ORTHOGONAL = "orthogonal"
SYMPLECTIC = "symplectic"
NEITHER = "neither"

# automorphism groups up to this order are swept element by element
SWEEP_LIMIT = 4096


@dataclass
class IsodualityWitness:
    """A similarity L → L^∨ with ratio c and what the coset σ∘Aut(L) realizes."""
    lattice: GramLattice
    ratio: Fraction
    map_u: IntMatrix
    types_realizable: FrozenSet[str]
    signature: Optional[int] = None
    witt_index: Optional[int] = None
    orthogonal_map: Optional[IntMatrix] = None
    symplectic_map: Optional[IntMatrix] = None
    witnesses: List[IntMatrix] = field(default_factory=list, repr=False)
    complete: bool = True

    @property
    def pairing_s(self) -> Matrix:
        return pairing_matrix(self.map_u)

    @property
    def tau(self) -> Matrix:
        return similarity_matrix(self.lattice, self.map_u)

    @property
    def orthogonal(self) -> bool:
        return ORTHOGONAL in self.types_realizable

    @property
    def symplectic(self) -> bool:
        return SYMPLECTIC in self.types_realizable

    def to_dict(self) -> Dict[str, object]:
        return {
            "ratio": str(self.ratio),
            "map_u": [list(r) for r in self.map_u],
            "pairing_s": [[str(x) for x in r] for r in self.pairing_s],
            "types": sorted(self.types_realizable),
            "signature": self.signature,
            "witt_index": self.witt_index,
            "witnesses_swept": len(self.witnesses),
            "complete": self.complete,
        }


def pairing_matrix(u: Sequence[Sequence[int]]) -> Matrix:
    """S with S[i][j] = b_σ(b_i, b_j) = σ(b_i)(b_j)."""
    return to_matrix(transpose(u))


def similarity_matrix(lattice: GramLattice, u: Sequence[Sequence[int]]) -> Matrix:
    """τ = G⁻¹·U, the similarity of L with σ = H∘τ."""
    return to_matrix(matmul(lattice.inverse_gram, u))


def isoduality_ratio(lattice: GramLattice) -> Optional[Fraction]:
    """c = det(G)^(−2/n) when rational, else None."""
    c = epr_pow(epr_from_rat(lattice.det), Fraction(-2, lattice.rank))
    return epr_to_rat(c) if epr_is_rational(c) else None


def verify_witness(lattice: GramLattice, u: Sequence[Sequence[int]]) -> Optional[Fraction]:
    """The ratio c if Uᵀ·G⁻¹·U = c·G exactly with U unimodular, else None."""
    u = to_int_matrix(u)
    if len(u) != lattice.rank or any(len(r) != lattice.rank for r in u):
        return None
    m = to_matrix(matmul(matmul(transpose(u), lattice.inverse_gram), u))
    g = lattice.gram
    c = m[0][0] / g[0][0]
    if c <= 0 or m != scalar_mul(c, g):
        return None
    if c ** lattice.rank * lattice.det ** 2 != 1:
        return None
    return c


def _fast_witnesses(lattice: GramLattice, c: Fraction) -> List[IntMatrix]:
    found: List[IntMatrix] = []
    # U = λ·G with λ² = c
    root = epr_pow(epr_from_rat(c), Fraction(1, 2))
    if epr_is_rational(root):
        lam = epr_to_rat(root)
        u = scalar_mul(lam, lattice.gram)
        if all(x.denominator == 1 for row in u for x in row):
            candidate = to_int_matrix(u)
            if verify_witness(lattice, candidate) == c:
                found.append(candidate)
    if lattice.rank == 2:
        # x₁e₁ + x₂e₂ ↦ x₁e₂* − x₂e₁*
        candidate = ((0, -1), (1, 0))
        if verify_witness(lattice, candidate) == c:
            found.append(candidate)
    return found


def _seed_witness(lattice: GramLattice, c: Fraction, budget: Optional[SearchBudget]) -> Optional[IntMatrix]:
    fast = _fast_witnesses(lattice, c)
    if fast:
        return fast[0]
    target = scale(dual(lattice), 1 / c)
    found = isometries(lattice, target, first_only=True, budget=budget)
    if found.found:
        return found.maps[0]
    if not found.complete:
        raise BudgetExhausted("isoduality_witness", budget.nodes if budget else 0)
    return None


def witness_from_maps(lattice: GramLattice, maps: Sequence[IntMatrix], complete: bool = True) -> IsodualityWitness:
    """Classify a set of verified witnesses by pairing type and signature."""
    maps = sorted(set(maps))
    ratio = verify_witness(lattice, maps[0])
    symmetric = [u for u in maps if is_symmetric(u)]
    antisymmetric = [u for u in maps if is_antisymmetric(u)]

    types = set()
    signature = witt = None
    orthogonal_map = symplectic_map = None
    if symmetric:
        types.add(ORTHOGONAL)
        orthogonal_map = max(symmetric, key=lambda u: abs(signature_value(pairing_matrix(u))))
        signature = signature_value(pairing_matrix(orthogonal_map))
        witt = (lattice.rank - abs(signature)) // 2
    if antisymmetric:
        types.add(SYMPLECTIC)
        symplectic_map = antisymmetric[0]
    if not types:
        types.add(NEITHER)

    preferred = orthogonal_map or symplectic_map or maps[0]
    return IsodualityWitness(
        lattice=lattice,
        ratio=ratio,
        map_u=preferred,
        types_realizable=frozenset(types),
        signature=signature,
        witt_index=witt,
        orthogonal_map=orthogonal_map,
        symplectic_map=symplectic_map,
        witnesses=maps,
        complete=complete,
    )


def isoduality_witness(
    lattice: GramLattice,
    sweep: bool = True,
    group: Optional[AutGroup] = None,
    budget: Optional[SearchBudget] = None
) -> Optional[IsodualityWitness]:
    """
    Find a similarity L → L^∨ and sweep the coset σ∘Aut(L).

    Returns None when L is certainly not isodual. The sweep is marked
    incomplete when Aut(L) is too large to enumerate; the seed and the fast
    path witnesses are still classified.

    Raises:
        BudgetExhausted: no witness found before the budget ran out
    """
    c = isoduality_ratio(lattice)
    if c is None:
        logger.debug(f"{lattice!r}: det^(2/n) irrational, not isodual")
        return None
    seed = _seed_witness(lattice, c, budget)
    if seed is None:
        return None

    maps = [seed] + _fast_witnesses(lattice, c)
    complete = False
    if sweep:
        group = group or automorphisms(lattice, budget=budget)
        elements = None
        if group.complete and group.order is not None and group.order <= SWEEP_LIMIT:
            elements = group_elements(group, SWEEP_LIMIT)
        if elements is not None:
            maps.extend(to_int_matrix(matmul(seed, g)) for g in elements)
            complete = True
        else:
            maps.extend(to_int_matrix(matmul(seed, g)) for g in group.generators)
            logger.info(f"{lattice!r}: automorphism group too large to sweep, types may be partial")
    witness = witness_from_maps(lattice, maps, complete)
    logger.info(f"{lattice!r}: isodual with ratio {c}, types {sorted(witness.types_realizable)}")
    return witness


def is_isodual(lattice: GramLattice) -> Optional[bool]:
    """True/False, or None when the search budget ran out."""
    try:
        return isoduality_witness(lattice, sweep=False) is not None
    except BudgetExhausted:
        return None


def verify_tau_square_law(witness: IsodualityWitness) -> CheckReport:
    """τ² = c·Id exactly for symmetric pairings and τ² = −c·Id for antisymmetric ones."""
    report = CheckReport(title="similarity square law")
    lattice, c = witness.lattice, witness.ratio
    n = lattice.rank
    plus = scalar_mul(c, identity(n))
    minus = scalar_mul(-c, identity(n))
    report.add("c^n * det^2 = 1", c ** n * lattice.det ** 2 == 1, f"c = {c}")

    orthogonal_ok = symplectic_ok = True
    for u in witness.witnesses:
        tau = similarity_matrix(lattice, u)
        square = to_matrix(matmul(tau, tau))
        orthogonal_ok &= is_symmetric(u) == (square == plus)
        symplectic_ok &= is_antisymmetric(u) == (square == minus)
    report.add("S symmetric <=> tau^2 = c Id", orthogonal_ok, f"{len(witness.witnesses)} witnesses")
    report.add("S antisymmetric <=> tau^2 = -c Id", symplectic_ok)

    if witness.orthogonal_map is not None:
        tau = similarity_matrix(lattice, witness.orthogonal_map)
        report.add("orthogonal witness: tau^2 = c Id", to_matrix(matmul(tau, tau)) == plus)
    if witness.symplectic_map is not None:
        tau = similarity_matrix(lattice, witness.symplectic_map)
        report.add("symplectic witness: tau^2 = -c Id", to_matrix(matmul(tau, tau)) == minus)
    return report


def _isodual_check(report: CheckReport, name: str, lattice: GramLattice) -> None:
    result = is_isodual(lattice)
    report.add(name, result, "budget exhausted" if result is None else f"rank {lattice.rank}")


def verify_isodual_filtration(
    lattice: GramLattice,
    witness: IsodualityWitness,
    filtration: Optional[Filtration] = None
) -> CheckReport:
    """
    σ(E_i) = E_(ℓ−i)^⊥, E_i totally isotropic for i ≤ ℓ/2, dim E_1 ≤ n/2 when
    unstable, and isoduality of the symmetric subquotients and products.
    """
    report = CheckReport(title="filtration of an isodual lattice")
    filtration = filtration or gs_filtration(lattice)
    ell = filtration.length
    u = witness.map_u
    s = witness.pairing_s
    dual_lattice = dual(lattice)

    for i in range(ell + 1):
        step = filtration.step(i)
        mapped = image(step, u, dual_lattice)
        expected = perp(filtration.step(ell - i))
        report.add(f"sigma(E_{i}) = E_{ell - i}^perp", mapped.basis == hnf_rows(expected.basis))

    for i in range(1, ell // 2 + 1):
        b = filtration.step(i).basis
        report.add(f"E_{i} totally isotropic", is_zero(matmul(matmul(b, s), transpose(b))))

    if ell >= 2:
        report.add("dim E_1 <= n/2", 2 * filtration.step(1).rank <= lattice.rank,
                   f"dim E_1 = {filtration.step(1).rank}")

    for i in range(1, (ell + 1) // 2):
        q = subquotient(lattice, filtration.step(i), filtration.step(ell - i))
        _isodual_check(report, f"E_{ell - i}/E_{i} isodual", q)
    for i, j in itertools.combinations(range(ell // 2 + 1), 2):
        left = subquotient(lattice, filtration.step(i), filtration.step(j))
        right = subquotient(lattice, filtration.step(ell - j), filtration.step(ell - i))
        _isodual_check(report, f"E_{j}/E_{i} x E_{ell - i}/E_{ell - j} isodual", direct_product(left, right))
    return report


@dataclass
class SemistabilityCertificate:
    """Destabilizer bound from the signature of a symmetric pairing."""
    signature: int
    bound: int
    semistable: bool
    witness_map: IntMatrix
    cross_check: Optional[CheckReport] = None


def signature_certificate(
    lattice: GramLattice,
    witness: Optional[IsodualityWitness],
    cross_validate: bool = False
) -> Optional[SemistabilityCertificate]:
    """
    For an orthogonal witness with signature s, an unstable L has a
    destabilizer of rank at most (n − |s|)/2; a definite pairing certifies
    semistability without any enumeration. None without an orthogonal witness.
    """
    if witness is None or witness.orthogonal_map is None:
        return None
    n = lattice.rank
    s = witness.signature
    bound = (n - abs(s)) // 2
    certificate = SemistabilityCertificate(s, bound, abs(s) == n, witness.orthogonal_map)
    if cross_validate:
        report = CheckReport(title="signature certificate")
        destabilizer = h_min(lattice).destabilizer
        unstable = destabilizer.rank < n
        report.add("destabilizer rank within bound", not unstable or destabilizer.rank <= bound,
                   f"rank {destabilizer.rank}, bound {bound}")
        if certificate.semistable:
            report.add("definite pairing implies semistable", not unstable)
        certificate.cross_check = report
    return certificate


def verify_aut_invariance(
    lattice: GramLattice,
    filtration: Optional[Filtration] = None,
    group: Optional[AutGroup] = None
) -> CheckReport:
    """Every automorphism generator maps every step E_i onto itself."""
    report = CheckReport(title="automorphism invariance")
    filtration = filtration or gs_filtration(lattice)
    group = group or automorphisms(lattice)
    if not group.complete:
        report.add("automorphism group", None, "budget exhausted")
    for k, g in enumerate(group.generators):
        stable = all(image(step, g, lattice) == step for step in filtration.steps)
        report.add(f"generator {k} preserves every step", stable)
    report.data["order"] = group.order
    return report


@dataclass
class MultiplicityFreeClaim:
    """User-supplied decomposition data for a K[G]-module structure on L."""
    dimensions: List[int]
    pairwise_non_isomorphic: bool
    absolutely_irreducible: bool
    self_dual: bool = True


def check_multiplicity_free(lattice: GramLattice, claim: MultiplicityFreeClaim) -> CheckReport:
    """
    An isodual lattice whose module is self-dual and a sum of pairwise
    non-isomorphic absolutely irreducible parts must be semistable; an
    unstable enumeration result is reported as a contradiction.
    """
    title = "multiplicity-free semistability"
    if sum(claim.dimensions) != lattice.rank:
        return not_applicable(title, f"component dimensions sum to {sum(claim.dimensions)}, not {lattice.rank}")
    if not (claim.pairwise_non_isomorphic and claim.absolutely_irreducible and claim.self_dual):
        return not_applicable(title, "decomposition is not multiplicity free")
    if not is_isodual(lattice):
        return not_applicable(title, "lattice is not isodual")
    report = CheckReport(title=title)
    semistable = is_semistable(lattice)
    report.add("semistable", semistable, "" if semistable else "contradiction: enumeration found a destabilizer")
    if not semistable:
        logger.error(f"{lattice!r}: multiplicity-free claim contradicted by enumeration")
    return report


def totally_isotropic_rank(
    lattice: GramLattice,
    pairing: Sequence[Sequence[Fraction]],
    radius: Fraction,
    budget: Optional[SearchBudget] = None
) -> int:
    """
    Largest rank of a subgroup spanned by short vectors (norm ≤ radius) on
    which the pairing vanishes identically.
    """
    from src.lattice.rankin import RowEchelon

    own_budget = budget is None
    if own_budget:
        budget = SearchBudget("totally_isotropic_rank")
    vectors = [v for v in short_vectors(lattice, radius, budget) if bilinear(v, pairing, v) == 0]
    best = 0

    def extend(start: int, chosen: List, echelon: RowEchelon) -> None:
        nonlocal best
        best = max(best, len(chosen))
        for index in range(start, len(vectors)):
            budget.tick()
            v = vectors[index]
            if any(bilinear(v, pairing, w) != 0 or bilinear(w, pairing, v) != 0 for w in chosen):
                continue
            entry = echelon.reduce(v)
            if entry is None:
                continue
            extend(index + 1, chosen + [v], echelon.extended(entry))

    try:
        extend(0, [], RowEchelon())
    finally:
        if own_budget:
            budget.finish()
    return best


def check_witt_index(
    lattice: GramLattice,
    witness: IsodualityWitness,
    radius: Optional[Fraction] = None
) -> CheckReport:
    """Totally isotropic subgroups found by enumeration have rank ≤ the Witt index."""
    if witness.orthogonal_map is None:
        return not_applicable("witt index", "no orthogonal witness")
    report = CheckReport(title="witt index")
    if radius is None:
        reduced, _ = reduced_form(lattice.gram)
        radius = 2 * max(reduced[i][i] for i in range(lattice.rank))
    s = pairing_matrix(witness.orthogonal_map)
    found = totally_isotropic_rank(lattice, s, radius)
    report.add("witt index = (n - |s|)/2",
               witness.witt_index * 2 == lattice.rank - abs(witness.signature))
    report.add("isotropic rank <= witt index", found <= witness.witt_index,
               f"found {found}, witt index {witness.witt_index}", radius=str(radius))
    return report
