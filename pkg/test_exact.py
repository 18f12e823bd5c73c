"""
Tests for exact arithmetic: factoring, exact positive reals, integer
lattice algebra and rational matrices.
"""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.core.integer import (
    complete_basis,
    hnf_rows,
    integer_kernel,
    is_saturated,
    lll_reduce_gram,
    saturate,
    saturation_index,
)
from src.core.posreal import (
    ONE,
    epr_cmp,
    epr_format,
    epr_from_json,
    epr_from_rat,
    epr_is_rational,
    epr_log,
    epr_mul,
    epr_pow,
    epr_to_float,
    epr_to_json,
    epr_to_rat,
    factor_integer,
)
from src.core.rational import (
    congruence,
    det_exact,
    gram_ldl,
    inverse,
    matmul,
    rank_exact,
    rat,
    require_positive_definite,
    rref,
    signature_exact,
    signature_value,
    solve_left,
    to_matrix,
    transpose,
)
from src.utils.errors import DefinitenessError, DomainError, InvariantViolation, ShapeError


def test_factor_integer():
    """Trial division and the sympy fallback agree on small and large inputs."""
    assert factor_integer(1) == ()
    assert factor_integer(360) == ((2, 3), (3, 2), (5, 1))
    big = (10 ** 9 + 7) * (10 ** 9 + 9)
    assert factor_integer(big) == ((10 ** 9 + 7, 1), (10 ** 9 + 9, 1))


def test_rat_refuses_floats():
    assert rat("3/4") == Fraction(3, 4)
    assert rat(5) == Fraction(5)
    with pytest.raises(DomainError):
        rat(0.5)
    with pytest.raises(DomainError):
        rat("1/0")
    with pytest.raises(DomainError):
        rat(True)


def test_exact_positive_real_canonical_form():
    x = epr_from_rat(Fraction(12, 5))
    assert x.as_dict() == {2: 2, 3: 1, 5: -1}
    assert epr_from_rat(1) == ONE
    assert epr_mul(x, epr_pow(x, -1)) == ONE
    with pytest.raises(DomainError):
        epr_from_rat(0)


def test_format_and_json():
    root3 = epr_pow(epr_from_rat(3), Fraction(1, 2))
    assert epr_format(root3) == "3^(1/2)"
    assert epr_format(epr_from_rat(Fraction(1, 4))) == "1/4"
    assert not epr_is_rational(root3)
    assert epr_to_rat(epr_pow(root3, 2)) == 3
    assert epr_from_json(epr_to_json(root3)) == root3


def test_float_rendering():
    x = epr_mul(epr_from_rat(Fraction(1, 2)), epr_pow(epr_from_rat(3), Fraction(1, 2)))
    assert epr_to_float(x) == pytest.approx(3 ** 0.5 / 2)
    assert epr_log(ONE) == 0
    assert epr_log(epr_from_rat(4)) == pytest.approx(2 * epr_log(epr_from_rat(2)))


def test_cmp_matches_high_precision():
    """Exact comparison agrees with 60-digit floating point on random products of powers."""
    mpmath.mp.dps = 60
    rng = np.random.default_rng(7)
    primes = [2, 3, 5, 7, 11]
    for _ in range(200):
        values = []
        for _ in range(2):
            x = ONE
            approx = mpmath.mpf(1)
            for p in rng.choice(primes, size=2, replace=False):
                e = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
                x = epr_mul(x, epr_pow(epr_from_rat(int(p)), e))
                approx *= mpmath.power(int(p), mpmath.mpf(e.numerator) / e.denominator)
            values.append((x, approx))
        (x, ax), (y, ay) = values
        got = epr_cmp(x, y)
        if x == y:
            assert got == 0
        else:
            assert got == (1 if ax > ay else -1)


def test_cmp_of_close_roots():
    """2^(1/2) < 3^(1/3) < 5^(1/4) and 2^(1/2) = 4^(1/4)."""
    a = epr_pow(epr_from_rat(2), Fraction(1, 2))
    b = epr_pow(epr_from_rat(3), Fraction(1, 3))
    c = epr_pow(epr_from_rat(5), Fraction(1, 4))
    assert epr_cmp(a, b) == -1
    assert epr_cmp(b, c) == -1
    assert epr_cmp(c, a) == 1
    assert epr_cmp(a, epr_pow(epr_from_rat(4), Fraction(1, 4))) == 0
    assert sorted([b, c, a]) == [a, b, c]


def test_saturate():
    assert saturate([[2, 2], [0, 4]], 2) == ((1, 0), (0, 1))
    assert saturate([[2, 4, 6]], 3) == ((1, 2, 3),)
    assert saturate([], 3) == ()
    assert saturation_index([[2, 4, 6]], 3) == 2
    assert is_saturated([[1, 2, 3]], 3)
    assert not is_saturated([[2, 0]], 2)


def test_hnf_and_kernel():
    assert hnf_rows([[2, 4], [1, 2]]) == hnf_rows([[1, 2]])
    kernel = integer_kernel([[1, 1, 1]])
    assert len(kernel) == 2
    for v in kernel:
        assert sum(v) == 0


def test_hermite_form_is_canonical():
    expected = ((2, 1, 0), (0, 3, 1))
    assert hnf_rows([[0, 3, 1], [2, 1, 0]]) == expected
    assert hnf_rows([[2, 4, 1], [0, 3, 1], [2, 7, 2]]) == expected
    assert hnf_rows([[0, 0], [0, 0]]) == ()


def test_integer_kernel_is_saturated():
    assert integer_kernel([[1, 2, 3], [4, 5, 6]]) == ((1, -2, 1),)
    assert integer_kernel([[2, 4]]) == ((2, -1),)
    assert integer_kernel([[1, 0], [0, 1]]) == ()


def test_complete_basis():
    basis = [[1, 2, 3]]
    completion = complete_basis(basis, 3)
    full = [tuple(basis[0])] + list(completion)
    assert abs(det_exact(full)) == 1
    with pytest.raises(InvariantViolation):
        complete_basis([[2, 0]], 2)


def test_rational_elimination():
    assert solve_left([[1, 0, 1], [0, 1, 1]], [2, 3, 5]) == (2, 3)
    assert solve_left([[1, 0, 1], [0, 1, 1]], [1, 1, 1]) is None
    assert rank_exact([[1, 2], [2, 4]]) == 1
    assert rref([[2, 4], [1, 3]]) == ((1, 0), (0, 1))
    assert rref([["1/2", 1], [1, 2]]) == ((1, 2),)
    with pytest.raises(DomainError):
        inverse([[1, 2], [2, 4]])


def test_gram_ldl():
    low, d = gram_ldl([[4, 2], [2, 3]])
    assert low == ((1, 0), (Fraction(1, 2), 1))
    assert d == [4, 2]
    assert gram_ldl([]) == ((), [])
    with pytest.raises(DomainError):
        gram_ldl([[0, 1], [1, 0]])


def test_lll_reduces_skewed_basis():
    """A sheared basis of Z² reduces back to unit norms."""
    t0 = [[1, 5], [0, 1]]
    gram = congruence(t0, to_matrix([[1, 0], [0, 1]]))
    reduced, t = lll_reduce_gram(gram)
    assert sorted(reduced[i][i] for i in range(2)) == [1, 1]
    assert reduced == congruence(t, gram)
    assert abs(det_exact(t)) == 1


def test_positive_definite_check():
    require_positive_definite(to_matrix([[2, 1], [1, 2]]))
    with pytest.raises(DefinitenessError) as info:
        require_positive_definite(to_matrix([[1, 2], [2, 1]]))
    assert info.value.minor == 2
    with pytest.raises(ShapeError):
        require_positive_definite(to_matrix([[1, 2], [0, 1]]))


def test_signature_invariant_under_congruence():
    s = to_matrix([[0, 1, 0], [1, 0, 0], [0, 0, -3]])
    assert signature_exact(s) == (1, 2, 0)
    rng = np.random.default_rng(3)
    for _ in range(20):
        while True:
            p = rng.integers(-3, 4, size=(3, 3)).tolist()
            if det_exact(p) != 0:
                break
        moved = to_matrix(matmul(matmul(p, s), transpose(p)))
        assert signature_value(moved) == -1


def test_inverse_and_det():
    m = to_matrix([["1/2", 1], [1, 4]])
    assert det_exact(m) == 1
    assert matmul(m, inverse(m)) == ((1, 0), (0, 1))
