"""
Exact integer lattice algebra: Hermite forms, kernels, saturation, basis
completion and Gram-matrix LLL.

Row conventions throughout: a subgroup of Zⁿ is given by the rows of an
integer matrix. Hermite forms come from sympy's column HNF; the row form
used here has each pivot at the first nonzero entry of its row, positive,
with the entries above it reduced into [0, pivot).
"""
import math
from fractions import Fraction
from typing import List, Sequence, Tuple

from sympy import ZZ
from sympy.polys.matrices.normalforms import hermite_normal_form

from src.utils.errors import DimensionError, InvariantViolation
from .rational import (
    IntMatrix, Matrix, det_exact, gram_ldl, int_identity, inverse, solve_left, to_domain, transpose
)


def hnf_rows(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Canonical Hermite basis of the subgroup spanned by `rows` (zero rows dropped)."""
    nonzero = [[int(x) for x in row] for row in rows if any(row)]
    if not nonzero:
        return ()
    n = len(nonzero[0])
    # column HNF of the coordinate-reversed generators puts each pivot in the
    # last nonzero coordinate; undoing the reversal moves it to the first
    w = hermite_normal_form(to_domain([row[::-1] for row in nonzero], ZZ).transpose()).to_list()
    columns = len(w[0]) if w else 0
    basis = [tuple(int(w[n - 1 - j][c]) for j in range(n)) for c in range(columns)]
    return tuple(reversed(basis))


def _with_identity(m: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    # row j is (column j of m, e_j)
    return [[int(row[j]) for row in m] + [int(j == c) for c in range(n)] for j in range(n)]


def integer_kernel(m: Sequence[Sequence[int]], ncols: int = None) -> IntMatrix:
    """Saturated basis (Hermite form) of {x ∈ Zⁿ : m·xᵀ = 0}."""
    n = len(m[0]) if m else ncols
    if n is None:
        raise DimensionError("integer_kernel of an empty matrix needs ncols")
    if not m:
        return int_identity(n)
    r = len(m)
    h = hnf_rows(_with_identity(m, n))
    return hnf_rows([row[r:] for row in h if not any(row[:r])])


def saturate(gens: Sequence[Sequence[int]], ambient_rank: int) -> IntMatrix:
    """
    Saturation of the subgroup spanned by `gens`: all integer vectors in its
    rational span. Returns the Hermite basis (empty when the span is zero).
    """
    rows = [tuple(int(x) for x in g) for g in gens if any(g)]
    if not rows:
        return ()
    if any(len(g) != ambient_rank for g in rows):
        raise DimensionError(f"generators must have length {ambient_rank}")
    kernel = integer_kernel(rows)
    if not kernel:
        return int_identity(ambient_rank)
    return integer_kernel(kernel)


def is_saturated(basis: Sequence[Sequence[int]], ambient_rank: int) -> bool:
    return hnf_rows(basis) == saturate(basis, ambient_rank)


def saturation_index(gens: Sequence[Sequence[int]], ambient_rank: int) -> int:
    """Index of span(gens) in its saturation (gens independent)."""
    sat = saturate(gens, ambient_rank)
    if not sat:
        return 1
    # coordinates of gens in the saturated basis form an integer matrix of det ±index
    coords = [solve_left(sat, g) for g in gens]
    return abs(int(det_exact(coords)))


def int_inverse(u: Sequence[Sequence[int]]) -> IntMatrix:
    inv = inverse(u)
    if any(x.denominator != 1 for row in inv for x in row):
        raise InvariantViolation("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def complete_basis(basis: Sequence[Sequence[int]], ambient_rank: int) -> IntMatrix:
    """
    Integer rows C such that [basis; C] is a basis of Z^ambient_rank.

    Raises:
        InvariantViolation: basis does not span a saturated subgroup
    """
    k = len(basis)
    if k == 0:
        return int_identity(ambient_rank)
    if k == ambient_rank:
        return ()
    # Hermite form of [basisᵀ | I] is [U·basisᵀ | U] with U unimodular; for a
    # saturated basis U·basisᵀ = [I; 0], so basis is the top of (U⁻¹)ᵀ
    h = hnf_rows(_with_identity(basis, ambient_rank))
    left = [row[:k] for row in h]
    if tuple(tuple(row) for row in left[:k]) != int_identity(k) or any(any(row) for row in left[k:]):
        raise InvariantViolation("cannot complete a non-saturated basis")
    completion = transpose(int_inverse([row[k:] for row in h]))[k:]
    full = [tuple(row) for row in basis] + [tuple(row) for row in completion]
    if abs(det_exact(full)) != 1:
        raise InvariantViolation("cannot complete a non-saturated basis")
    return tuple(tuple(int(x) for x in row) for row in completion)


def _round(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def lll_reduce_gram(
    gram: Sequence[Sequence[Fraction]],
    delta: Fraction = Fraction(3, 4)
) -> Tuple[Matrix, IntMatrix]:
    """
    Exact LLL reduction of a positive-definite Gram matrix.

    Returns (reduced_gram, T) with T unimodular and reduced_gram = T·G·Tᵀ;
    rows of T express the reduced basis in the original one.
    """
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    t = [list(row) for row in int_identity(n)]

    def subtract(k: int, j: int, q: int) -> None:
        # b_k ← b_k − q·b_j
        t[k] = [a - q * b for a, b in zip(t[k], t[j])]
        gkk = g[k][k] - 2 * q * g[k][j] + q * q * g[j][j]
        for i in range(n):
            g[k][i] -= q * g[j][i]
        for i in range(n):
            g[i][k] = g[k][i]
        g[k][k] = gkk

    def swap(k: int) -> None:
        t[k], t[k - 1] = t[k - 1], t[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]

    k = 1
    while k < n:
        mu, _ = gram_ldl(g)
        for j in range(k - 1, -1, -1):
            q = _round(mu[k][j])
            if q:
                subtract(k, j, q)
                mu, _ = gram_ldl(g)
        mu, bstar = gram_ldl(g)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k)
            k = max(k - 1, 1)
    return tuple(tuple(row) for row in g), tuple(tuple(row) for row in t)
