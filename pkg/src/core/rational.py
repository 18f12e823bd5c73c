"""
Exact rational matrices.

Matrices are immutable tuples of row tuples of `fractions.Fraction`; integer
matrices use the same layout with `int` entries. Elimination (determinants,
inverses, echelon forms) is delegated to sympy's DomainMatrix over QQ; the
functions here only convert to and from that representation.
"""
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from src.utils.errors import DefinitenessError, DimensionError, DomainError, ShapeError

Rat = Fraction
Matrix = Tuple[Tuple[Fraction, ...], ...]
IntMatrix = Tuple[Tuple[int, ...], ...]
RatLike = Union[int, str, Fraction]


def rat(value: RatLike) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction (floats are refused)."""
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, float):
        raise DomainError(f"refusing inexact float {value!r}; pass a string or Fraction")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"malformed rational {value!r}") from e
    raise DomainError(f"cannot interpret {value!r} as a rational")


def to_matrix(rows: Iterable[Iterable[RatLike]]) -> Matrix:
    """Build a rational matrix, checking that rows have equal length."""
    matrix = tuple(tuple(rat(x) for x in row) for row in rows)
    if matrix and any(len(row) != len(matrix[0]) for row in matrix):
        raise ShapeError("ragged matrix rows")
    return matrix


def to_int_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    matrix = []
    for row in rows:
        out = []
        for x in row:
            q = Fraction(x)
            if q.denominator != 1:
                raise DomainError(f"non-integer entry {x!r} in integer matrix")
            out.append(int(q))
        matrix.append(tuple(out))
    if matrix and any(len(row) != len(matrix[0]) for row in matrix):
        raise ShapeError("ragged matrix rows")
    return tuple(matrix)


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def int_identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> tuple:
    if not m:
        return ()
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    if a and len(a[0]) != len(b):
        raise DimensionError(f"cannot multiply {shape(a)} by {shape(b)}")
    columns = transpose(b)
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), 0) for col in columns)
        for row in a
    )


def vecmat(v: Sequence, m: Sequence[Sequence]) -> tuple:
    """Row vector times matrix."""
    return matmul((tuple(v),), m)[0]


def bilinear(x: Sequence, gram: Sequence[Sequence], y: Sequence) -> Fraction:
    """x · gram · yᵀ."""
    total = Fraction(0)
    for i, xi in enumerate(x):
        if xi:
            row = gram[i]
            total += xi * sum((row[j] * yj for j, yj in enumerate(y) if yj), Fraction(0))
    return total


def congruence(basis: Sequence[Sequence], gram: Sequence[Sequence]) -> Matrix:
    """basis · gram · basisᵀ."""
    return to_matrix(matmul(matmul(basis, gram), transpose(basis)))


def scalar_mul(s: Fraction, m: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(s * x for x in row) for row in m)


def add(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if shape(a) != shape(b):
        raise DimensionError(f"cannot add {shape(a)} and {shape(b)}")
    return tuple(tuple(Fraction(x) + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def neg(m: Sequence[Sequence]) -> tuple:
    return tuple(tuple(-x for x in row) for row in m)


def kron(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    """Kronecker product; index (i, j) of the result is i_a * rows(b) + i_b."""
    return tuple(
        tuple(x * y for x in row_a for y in row_b)
        for row_a in a
        for row_b in b
    )


def block_diag(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    na, nb = len(a), len(b)
    rows: List[Tuple[Fraction, ...]] = []
    for row in a:
        rows.append(tuple(Fraction(x) for x in row) + (Fraction(0),) * nb)
    for row in b:
        rows.append((Fraction(0),) * na + tuple(Fraction(x) for x in row))
    return tuple(rows)


def is_square(m: Sequence[Sequence]) -> bool:
    return all(len(row) == len(m) for row in m)


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return is_square(m) and all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def is_antisymmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return is_square(m) and all(m[i][j] == -m[j][i] for i in range(n) for j in range(i, n))


def is_zero(m: Sequence[Sequence]) -> bool:
    return all(x == 0 for row in m for x in row)


def to_domain(m: Sequence[Sequence], domain=QQ) -> DomainMatrix:
    """DomainMatrix over QQ (or ZZ) with the entries of m."""
    if domain == ZZ:
        return DomainMatrix.from_list([[int(x) for x in row] for row in m], ZZ)
    entries = [[Fraction(x) for x in row] for row in m]
    return DomainMatrix.from_list([[(x.numerator, x.denominator) for x in row] for row in entries], QQ)


def _fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def from_domain(dm: DomainMatrix) -> Matrix:
    if dm.domain == ZZ:
        return tuple(tuple(Fraction(int(x)) for x in row) for row in dm.to_list())
    return tuple(tuple(_fraction(x) for x in row) for row in dm.to_list())


def det_exact(m: Sequence[Sequence]) -> Fraction:
    """
    Exact determinant.

    Raises:
        DimensionError: if m is not square
    """
    if not is_square(m):
        raise DimensionError(f"determinant of non-square {shape(m)} matrix")
    if not m:
        return Fraction(1)
    return _fraction(to_domain(m).det())


def inverse(m: Sequence[Sequence]) -> Matrix:
    if not is_square(m):
        raise DimensionError(f"inverse of non-square {shape(m)} matrix")
    try:
        return from_domain(to_domain(m).inv())
    except DMNonInvertibleMatrixError as e:
        raise DomainError("matrix is singular") from e


def rref(rows: Sequence[Sequence]) -> Matrix:
    """Reduced row echelon form with zero rows dropped (canonical key of a rational span)."""
    if not rows:
        return ()
    reduced, pivots = to_domain(rows).rref()
    return from_domain(reduced)[:len(pivots)]


def rank_exact(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return to_domain(rows).rank()


def solve_left(a: Sequence[Sequence], b: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """Solve x · a = b for x (a has independent rows); None when b is outside the row span."""
    k = len(a)
    if k == 0:
        return () if all(x == 0 for x in b) else None
    # columns of the augmented system aᵀ x = bᵀ
    augmented = [[a[i][j] for i in range(k)] + [b[j]] for j in range(len(a[0]))]
    reduced, pivots = to_domain(augmented).rref()
    if k in pivots:
        return None
    work = from_domain(reduced)
    x = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        x[col] = work[r][k]
    return tuple(x)


def gram_ldl(gram: Sequence[Sequence]) -> Tuple[Matrix, List[Fraction]]:
    """
    Unit lower-triangular L and diagonal D with gram = L·D·Lᵀ.

    For a positive-definite Gram matrix LU needs no row exchanges and U = D·Lᵀ.
    """
    if not gram:
        return (), []
    low, up, exchanges = to_domain(gram).lu()
    if exchanges:
        raise DomainError("LDL decomposition needs a positive-definite Gram matrix")
    upper = from_domain(up)
    return from_domain(low), [upper[i][i] for i in range(len(upper))]


def require_positive_definite(m: Sequence[Sequence]) -> None:
    """Raise DefinitenessError naming the first failing leading minor."""
    if not is_square(m):
        raise ShapeError(f"Gram matrix must be square, got {shape(m)}")
    if not is_symmetric(m):
        raise ShapeError("Gram matrix is not symmetric")
    for k in range(1, len(m) + 1):
        minor = det_exact([row[:k] for row in m[:k]])
        if minor <= 0:
            raise DefinitenessError(
                f"Gram matrix is not positive definite: leading minor {k} equals {minor}",
                minor=k
            )


def signature_exact(m: Sequence[Sequence]) -> Tuple[int, int, int]:
    """
    Inertia (plus, minus, zero) of a symmetric rational matrix.

    Symmetric elimination by congruence: a nonzero diagonal pivot contributes
    its sign; when every remaining diagonal entry vanishes but an off-diagonal
    entry a does not, the hyperbolic block [[0,a],[a,0]] contributes one
    positive and one negative square and is eliminated as a 2×2 block.

    Raises:
        ShapeError: if m is not symmetric
    """
    if not is_symmetric(m):
        raise ShapeError("signature of a non-symmetric matrix")
    work = [[Fraction(x) for x in row] for row in m]
    plus = minus = 0
    while work:
        size = len(work)
        i = next((k for k in range(size) if work[k][k] != 0), None)
        if i is not None:
            p = work[i][i]
            if p > 0:
                plus += 1
            else:
                minus += 1
            keep = [k for k in range(size) if k != i]
            work = [[work[r][c] - work[r][i] * work[i][c] / p for c in keep] for r in keep]
            continue
        pair = next(((r, c) for r in range(size) for c in range(r + 1, size) if work[r][c] != 0), None)
        if pair is None:
            break
        r0, c0 = pair
        a = work[r0][c0]
        plus += 1
        minus += 1
        keep = [k for k in range(size) if k not in pair]
        # Schur complement of the block [[0,a],[a,0]], inverse [[0,1/a],[1/a,0]]
        work = [
            [work[r][c] - (work[r][r0] * work[c0][c] + work[r][c0] * work[r0][c]) / a for c in keep]
            for r in keep
        ]
    return plus, minus, len(m) - plus - minus


def signature_value(m: Sequence[Sequence]) -> int:
    plus, minus, _ = signature_exact(m)
    return plus - minus


def format_matrix(m: Sequence[Sequence]) -> List[List[str]]:
    """String form used by reports and lattice files."""
    return [[str(Fraction(x)) for x in row] for row in m]
