"""
Isometries between Gram lattices and automorphism groups.

An isometry A → B is an integer matrix U whose columns are the images of
the basis vectors of A, with Uᵀ·G_B·U = G_A. The search LLL-reduces the
source, then assigns images of the reduced basis vectors one at a time from
the short vectors of B of the right norm, checking inner products against
every image already chosen. Positions with the fewest candidates go first.
"""
import logging
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.integer import int_inverse
from src.core.rational import IntMatrix, Matrix, congruence, matmul, to_int_matrix, transpose
from src.lattice.enumeration import Vector, reduced_form, short_vectors_with_norms
from src.lattice.gram import GramLattice
from src.utils.budget_tracker import SearchBudget
from src.utils.config import get_config
from src.utils.errors import BudgetExhausted, InvariantViolation

logger = logging.getLogger(__name__)

# groups up to this order are closed explicitly to cross-check the stabilizer chain
CLOSURE_LIMIT = 2048


@dataclass
class IsometryList:
    """Isometries source → target; `complete` is False when the budget ran out."""
    source: GramLattice
    target: GramLattice
    maps: List[IntMatrix] = field(default_factory=list)
    complete: bool = True

    def __len__(self) -> int:
        return len(self.maps)

    @property
    def found(self) -> bool:
        return bool(self.maps)


@dataclass
class AutGroup:
    """Automorphism group given by generators; order is None when the search was cut short."""
    lattice: GramLattice
    generators: List[IntMatrix]
    order: Optional[int]
    orbit_sizes: List[int] = field(default_factory=list)
    complete: bool = True


def is_isometry(u: Sequence[Sequence[int]], source: GramLattice, target: GramLattice) -> bool:
    """Uᵀ·G_target·U == G_source exactly."""
    return congruence(transpose(u), target.gram) == source.gram


class _Backtrack:
    """Assign images of a reduced source basis among target short vectors."""

    def __init__(self, gram: Matrix, target: GramLattice, budget: SearchBudget):
        self.gram = gram
        self.target = target
        self.budget = budget
        n = len(gram)
        bound = max(gram[i][i] for i in range(n))
        by_norm: Dict[Fraction, List[Vector]] = {}
        for norm, v in short_vectors_with_norms(target, bound, budget):
            by_norm.setdefault(norm, []).extend([v, tuple(-x for x in v)])
        self.by_norm = by_norm
        self.candidates = [by_norm.get(gram[i][i], []) for i in range(n)]
        self.order = sorted(range(n), key=lambda i: (len(self.candidates[i]), i))
        self.found: List[Tuple[Vector, ...]] = []
        self.stop = threading.Event()
        self.lock = threading.Lock()

    def row_of(self, v: Vector) -> Tuple[Fraction, ...]:
        # vᵀ·G_target, reused for every later inner product with v
        g = self.target.gram
        return tuple(sum((v[k] * g[k][j] for k in range(len(v)) if v[k]), Fraction(0)) for j in range(len(v)))

    def compatible(self, position: int, c: Vector, assigned: Dict[int, Tuple[Vector, Tuple]]) -> bool:
        for q, (_, row) in assigned.items():
            if sum((r * x for r, x in zip(row, c) if x), Fraction(0)) != self.gram[position][q]:
                return False
        return True

    def extend(self, level: int, assigned: Dict[int, Tuple[Vector, Tuple]], first_only: bool) -> None:
        if self.stop.is_set():
            return
        if level == len(self.order):
            images = tuple(assigned[i][0] for i in range(len(self.order)))
            with self.lock:
                self.found.append(images)
            if first_only:
                self.stop.set()
            return
        position = self.order[level]
        if position in assigned:
            self.extend(level + 1, assigned, first_only)
            return
        for c in self.candidates[position]:
            self.budget.tick()
            if not self.compatible(position, c, assigned):
                continue
            assigned[position] = (c, self.row_of(c))
            self.extend(level + 1, assigned, first_only)
            del assigned[position]
            if self.stop.is_set():
                return

    def run(self, fixed: Dict[int, Vector], first_only: bool, threads: int = 1) -> None:
        assigned = {p: (v, self.row_of(v)) for p, v in fixed.items()}
        free = [p for p in self.order if p not in assigned]
        if not free:
            self.extend(len(self.order), assigned, first_only)
            return
        head = free[0]
        branches = [c for c in self.candidates[head] if self.compatible(head, c, assigned)]

        def branch(c: Vector) -> None:
            local = dict(assigned)
            local[head] = (c, self.row_of(c))
            self.extend(0, local, first_only)

        if threads <= 1 or first_only:
            for c in branches:
                branch(c)
                if self.stop.is_set():
                    break
            return
        with ThreadPoolExecutor(max_workers=threads) as executor:
            list(executor.map(branch, branches))


def _columns(images: Sequence[Vector]) -> IntMatrix:
    return tuple(tuple(images[j][i] for j in range(len(images))) for i in range(len(images)))


class _Engine:
    """Isometry search from `source` (via its LLL basis) into `target`."""

    def __init__(self, source: GramLattice, target: GramLattice, budget: SearchBudget):
        self.source = source
        self.target = target
        self.reduced, self.t = reduced_form(source.gram)
        # U = U'·(T⁻¹)ᵀ turns images of the reduced basis into images of the original one
        self.back = transpose(int_inverse(self.t))
        self.search = _Backtrack(self.reduced, target, budget)

    def to_map(self, images: Sequence[Vector]) -> IntMatrix:
        u = to_int_matrix(matmul(_columns(images), self.back))
        if not is_isometry(u, self.source, self.target):
            raise InvariantViolation("isometry search produced a map that is not an isometry")
        return u

    def identity_images(self) -> Dict[int, Vector]:
        return {i: tuple(row) for i, row in enumerate(self.t)}

    def find(self, fixed: Dict[int, Vector], first_only: bool, threads: int = 1) -> List[IntMatrix]:
        self.search.found = []
        self.search.stop.clear()
        self.search.run(fixed, first_only, threads)
        return [self.to_map(images) for images in self.search.found]


def _norm_profile(lattice: GramLattice, bound: Fraction, budget: SearchBudget) -> Counter:
    return Counter(norm for norm, _ in short_vectors_with_norms(lattice, bound, budget))


def isometries(
    source: GramLattice,
    target: GramLattice,
    first_only: bool = False,
    budget: Optional[SearchBudget] = None
) -> IsometryList:
    """
    Every isometry source → target (or the first one found).

    Determinants and short-vector norm counts are compared before the
    backtracking starts. Budget exhaustion yields complete=False with the
    maps found so far.
    """
    result = IsometryList(source, target)
    if source.rank != target.rank or source.det != target.det:
        return result

    own_budget = budget is None
    if own_budget:
        budget = SearchBudget("isometries")
    engine: Optional[_Engine] = None
    try:
        reduced, _ = reduced_form(source.gram)
        bound = max(reduced[i][i] for i in range(source.rank))
        if _norm_profile(source, bound, budget) != _norm_profile(target, bound, budget):
            logger.debug(f"isometries: short-vector norms of {source!r} and {target!r} differ")
            if own_budget:
                budget.finish()
            return result
        engine = _Engine(source, target, budget)
        threads = get_config().batch.threads
        result.maps = sorted(set(engine.find({}, first_only, threads)))
    except BudgetExhausted:
        result.complete = False
        if engine is not None:
            result.maps = sorted({engine.to_map(images) for images in engine.search.found})
        if own_budget:
            budget.finish(exhausted=True)
        logger.warning(f"isometries {source!r} -> {target!r}: budget exhausted")
        return result
    if own_budget:
        budget.finish()
    return result


def are_isometric(a: GramLattice, b: GramLattice, budget: Optional[SearchBudget] = None) -> bool:
    """
    Raises:
        BudgetExhausted: no isometry found before the budget ran out
    """
    found = isometries(a, b, first_only=True, budget=budget)
    if not found.found and not found.complete:
        raise BudgetExhausted("isometries", budget.nodes if budget else 0)
    return found.found


def automorphisms(lattice: GramLattice, budget: Optional[SearchBudget] = None) -> AutGroup:
    """
    Automorphism group by a stabilizer chain on the reduced basis.

    At each level the orbit of the next basis vector under the pointwise
    stabilizer of the earlier ones is the set of compatible candidates that
    extend to a full automorphism; |Aut| is the product of orbit sizes and the
    extending maps are the generators.
    """
    own_budget = budget is None
    if own_budget:
        budget = SearchBudget("automorphisms")
    generators: List[IntMatrix] = []
    orbit_sizes: List[int] = []
    try:
        engine = _Engine(lattice, lattice, budget)
        search = engine.search
        identity = engine.identity_images()
        fixed: Dict[int, Vector] = {}
        for position in search.order:
            orbit = 0
            rows = {p: (v, search.row_of(v)) for p, v in fixed.items()}
            for c in search.candidates[position]:
                if not search.compatible(position, c, rows):
                    continue
                if c == identity[position]:
                    orbit += 1
                    continue
                maps = engine.find({**fixed, position: c}, first_only=True)
                if maps:
                    orbit += 1
                    generators.append(maps[0])
            orbit_sizes.append(orbit)
            fixed[position] = identity[position]
    except BudgetExhausted:
        if own_budget:
            budget.finish(exhausted=True)
        logger.warning(f"automorphisms of {lattice!r}: budget exhausted")
        return AutGroup(lattice, sorted(set(generators)), None, orbit_sizes, complete=False)
    if own_budget:
        budget.finish()

    order = 1
    for size in orbit_sizes:
        order *= size
    group = AutGroup(lattice, sorted(set(generators)), order, orbit_sizes)
    if order <= CLOSURE_LIMIT:
        closed = group_elements(group, CLOSURE_LIMIT)
        if closed is None or len(closed) != order:
            raise InvariantViolation(f"automorphism closure disagrees with order {order}")
    logger.info(f"automorphisms of {lattice!r}: order {order}, {len(group.generators)} generators")
    return group


def group_elements(group: AutGroup, limit: int) -> Optional[List[IntMatrix]]:
    """All elements by closure under the generators; None past `limit`."""
    n = group.lattice.rank
    identity = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    seen = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for g in frontier:
            for h in group.generators:
                product = to_int_matrix(matmul(g, h))
                if product not in seen:
                    if len(seen) >= limit:
                        return None
                    seen.add(product)
                    new.append(product)
        frontier = new
    return sorted(seen)
