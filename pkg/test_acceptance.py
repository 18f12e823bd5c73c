"""
Randomized acceptance runs: oracle equivalence, dual reversal, rank-two
isoduality, tensor multiplicativity and the exact comparison infrastructure.

Every instance count here is the full one; the whole module is marked slow.
"""
import itertools
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.core.posreal import ONE, epr_cmp, epr_from_rat, epr_mul, epr_pow
from src.core.rational import matmul, signature_exact, to_matrix, transpose
from src.experiments.multiplicativity import check_multiplicativity
from src.lattice.filtration import brute_force_filtration, gs_filtration, verify_dual_reversal
from src.lattice.gram import make_lattice
from src.symmetry.isoduality import isoduality_witness, verify_tau_square_law, verify_witness
from src.utils.config import reset_config

pytestmark = pytest.mark.slow


@pytest.fixture(autouse=True)
def fresh_config():
    reset_config()
    yield
    reset_config()


def _random_gram(rng, n):
    """Symmetric entries in −3..3, diagonally loaded until strictly dominant."""
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = int(rng.integers(-3, 4))
    for i in range(n):
        m[i][i] = sum(abs(x) for x in m[i]) + int(rng.integers(1, 4))
    denominator = int(rng.integers(1, 3))
    return [[Fraction(x, denominator) for x in row] for row in m]


def _random_lattice(rng, n):
    return make_lattice(_random_gram(rng, n))


def _ranks(rng, count, low=1, high=4):
    return [int(n) for n in rng.integers(low, high + 1, size=count)]


def test_filtration_matches_oracle():
    """100 lattices of rank ≤ 4 agree with unpruned enumeration at four times the radius."""
    rng = np.random.default_rng(2024)
    for n in _ranks(rng, 100):
        lattice = _random_lattice(rng, n)
        fast = gs_filtration(lattice)
        slow = brute_force_filtration(lattice)
        assert [s.basis for s in fast.steps] == [s.basis for s in slow.steps], lattice
        assert fast.step_sq_heights == slow.step_sq_heights, lattice


def test_dual_reverses_filtration():
    rng = np.random.default_rng(11)
    for n in _ranks(rng, 50):
        lattice = _random_lattice(rng, n)
        report = verify_dual_reversal(lattice)
        assert report.passed, (lattice, [c.name for c in report.failures()])


def test_every_rank_two_lattice_is_isodual():
    rng = np.random.default_rng(5)
    for _ in range(50):
        lattice = _random_lattice(rng, 2)
        witness = isoduality_witness(lattice)
        assert witness is not None, lattice
        assert verify_witness(lattice, witness.map_u) == witness.ratio
        assert verify_tau_square_law(witness).passed, lattice


def test_multiplicativity_two_by_two():
    rng = np.random.default_rng(17)
    for _ in range(50):
        e, f = _random_lattice(rng, 2), _random_lattice(rng, 2)
        verdict = check_multiplicativity(e, f)
        assert verdict.equal, (e, f)
        assert verdict.violating_witness is None


def test_multiplicativity_two_by_three():
    rng = np.random.default_rng(19)
    for _ in range(10):
        e, f = _random_lattice(rng, 2), _random_lattice(rng, 3)
        assert check_multiplicativity(e, f).equal, (e, f)


def _random_power_product(rng, primes):
    x = ONE
    approx = mpmath.mpf(1)
    for p in rng.choice(primes, size=int(rng.integers(1, 4)), replace=False):
        e = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
        x = epr_mul(x, epr_pow(epr_from_rat(int(p)), e))
        approx *= mpmath.power(int(p), mpmath.mpf(e.numerator) / e.denominator)
    return x, approx


def test_cmp_agrees_with_200_digits():
    rng = np.random.default_rng(7)
    primes = [2, 3, 5, 7, 11, 13]
    with mpmath.workdps(200):
        for _ in range(10_000):
            (x, ax), (y, ay) = _random_power_product(rng, primes), _random_power_product(rng, primes)
            got = epr_cmp(x, y)
            assert epr_cmp(y, x) == -got
            if x == y:
                assert got == 0
            else:
                assert got == (1 if ax > ay else -1), (x, y)


def test_cmp_is_a_total_order():
    rng = np.random.default_rng(8)
    values = [_random_power_product(rng, [2, 3, 5])[0] for _ in range(14)]
    for a, b, c in itertools.permutations(values, 3):
        if epr_cmp(a, b) <= 0 and epr_cmp(b, c) <= 0:
            assert epr_cmp(a, c) <= 0, (a, b, c)


def _random_unimodular(rng, n):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(int(rng.integers(2, 9))):
        i, j = (int(k) for k in rng.choice(n, size=2, replace=False))
        q = int(rng.integers(-2, 3))
        u[i] = [a + q * b for a, b in zip(u[i], u[j])]
        if rng.integers(0, 4) == 0:
            u[j] = [-a for a in u[j]]
    return u


@pytest.mark.parametrize("form", [
    [[0, 1, 0], [1, 0, 0], [0, 0, -3]],
    [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 0, 5], [0, 0, 5, 0]],
    [["1/2", 0, 0, 0], [0, -1, 1, 0], [0, 1, -1, 0], [0, 0, 0, 7]],
])
def test_signature_invariant_under_unimodular_congruence(form):
    s = to_matrix(form)
    expected = signature_exact(s)
    rng = np.random.default_rng(len(form))
    for _ in range(1000 // 3 + 1):
        u = _random_unimodular(rng, len(form))
        moved = to_matrix(matmul(matmul(transpose(u), s), u))
        assert signature_exact(moved) == expected
