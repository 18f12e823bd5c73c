"""
Exact positive reals of the form ∏ p^(e_p) with rational exponents.

Heights, reduced heights and scaling factors of rational lattices are all
rational powers of rationals, so they live exactly in this multiplicative
group. Comparison clears the exponent denominators and compares an exact
rational against 1.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Dict, Iterable, Mapping, Tuple, Union

from sympy import factorint, isprime, perfect_power, pollard_rho

from src.utils.errors import DomainError, UnfactoredError
from .rational import RatLike, rat

logger = logging.getLogger(__name__)

TRIAL_DIVISION_LIMIT = 10 ** 6
RHO_SEEDS = (1234, 4321, 2718, 3141, 1618)
RHO_RETRIES = 8


def _split_composite(m: int, out: Dict[int, int], multiplicity: int) -> None:
    if m == 1:
        return
    if isprime(m):
        out[m] = out.get(m, 0) + multiplicity
        return
    power = perfect_power(m)
    if power:
        base, exponent = power
        _split_composite(int(base), out, multiplicity * int(exponent))
        return
    for seed in RHO_SEEDS:
        divisor = pollard_rho(m, seed=seed, retries=RHO_RETRIES)
        if divisor:
            divisor = int(divisor)
            _split_composite(divisor, out, multiplicity)
            _split_composite(m // divisor, out, multiplicity)
            return
    logger.error(f"Pollard rho exhausted its retries on {m}")
    raise UnfactoredError(m)


@lru_cache(maxsize=4096)
def factor_integer(n: int) -> Tuple[Tuple[int, int], ...]:
    """
    Prime factorization of a positive integer.

    Trial division up to 10^6 first, then Pollard rho with seeded retries on
    any cofactor that is not prime.

    Raises:
        UnfactoredError: a composite cofactor resisted every retry
    """
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    partial = factorint(n, limit=TRIAL_DIVISION_LIMIT)
    result: Dict[int, int] = {}
    for base, exponent in partial.items():
        _split_composite(int(base), result, int(exponent))
    return tuple(sorted(result.items()))


@total_ordering
@dataclass(frozen=True)
class ExactPosReal:
    """A positive real ∏ p^(e_p); `factors` is sorted by prime with no zero exponent."""
    factors: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def from_map(cls, mapping: Mapping[int, RatLike]) -> "ExactPosReal":
        cleaned = {}
        for p, e in mapping.items():
            p = int(p)
            e = rat(e)
            if e != 0:
                if p < 2 or not isprime(p):
                    raise DomainError(f"{p} is not a prime")
                cleaned[p] = e
        return cls(tuple(sorted(cleaned.items())))

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.factors)

    def __mul__(self, other: "ExactPosReal") -> "ExactPosReal":
        return epr_mul(self, other)

    def __truediv__(self, other: "ExactPosReal") -> "ExactPosReal":
        return epr_mul(self, epr_pow(other, -1))

    def __pow__(self, exponent: RatLike) -> "ExactPosReal":
        return epr_pow(self, exponent)

    def __lt__(self, other: "ExactPosReal") -> bool:
        return epr_cmp(self, other) < 0

    def is_one(self) -> bool:
        return not self.factors

    def __str__(self) -> str:
        return epr_format(self)


ONE = ExactPosReal()


def epr_from_rat(q: RatLike) -> ExactPosReal:
    """
    Factor a positive rational.

    Raises:
        DomainError: q ≤ 0
        UnfactoredError: factorization failed
    """
    q = rat(q)
    if q <= 0:
        raise DomainError(f"ExactPosReal needs a positive rational, got {q}")
    factors: Dict[int, Fraction] = {}
    for p, e in factor_integer(q.numerator):
        factors[p] = factors.get(p, Fraction(0)) + e
    for p, e in factor_integer(q.denominator):
        factors[p] = factors.get(p, Fraction(0)) - e
    return ExactPosReal(tuple(sorted((p, Fraction(e)) for p, e in factors.items() if e != 0)))


def epr_mul(*values: ExactPosReal) -> ExactPosReal:
    factors: Dict[int, Fraction] = {}
    for value in values:
        for p, e in value.factors:
            factors[p] = factors.get(p, Fraction(0)) + e
    return ExactPosReal(tuple(sorted((p, e) for p, e in factors.items() if e != 0)))


def epr_pow(x: ExactPosReal, exponent: RatLike) -> ExactPosReal:
    e = rat(exponent)
    if e == 0:
        return ONE
    return ExactPosReal(tuple((p, f * e) for p, f in x.factors))


def epr_prod(values: Iterable[ExactPosReal]) -> ExactPosReal:
    return epr_mul(*values)


def _clear_exponents(factors: Iterable[Tuple[int, Fraction]]) -> Fraction:
    factors = list(factors)
    common = math.lcm(*(e.denominator for _, e in factors)) if factors else 1
    value = Fraction(1)
    for p, e in factors:
        n = int(e * common)
        value *= Fraction(p) ** n
    return value


def epr_cmp(x: ExactPosReal, y: ExactPosReal) -> int:
    """Return -1, 0 or 1 according to the real order of x and y."""
    ratio = epr_mul(x, epr_pow(y, -1))
    if ratio.is_one():
        return 0
    value = _clear_exponents(ratio.factors)
    if value == 1:
        # distinct primes with nonzero exponents cannot multiply to 1
        return 0
    return 1 if value > 1 else -1


def epr_is_rational(x: ExactPosReal) -> bool:
    return all(e.denominator == 1 for _, e in x.factors)


def epr_to_rat(x: ExactPosReal) -> Fraction:
    if not epr_is_rational(x):
        raise DomainError(f"{epr_format(x)} is irrational")
    return _clear_exponents(x.factors)


def epr_log(x: ExactPosReal) -> float:
    """Natural logarithm in double precision (rendering only)."""
    return sum(float(e) * math.log(p) for p, e in x.factors)


def epr_to_float(x: ExactPosReal) -> float:
    return math.exp(epr_log(x))


def epr_format(x: ExactPosReal) -> str:
    """Render as "3^(1/2)", "2^(-1) * 3^(1/2)", or a plain rational when rational."""
    if epr_is_rational(x):
        return str(epr_to_rat(x))
    parts = []
    for p, e in x.factors:
        if e == 1:
            parts.append(str(p))
        elif e.denominator == 1:
            parts.append(f"{p}^{e}" if e > 0 else f"{p}^({e})")
        else:
            parts.append(f"{p}^({e})")
    return " * ".join(parts)


def epr_to_json(x: ExactPosReal) -> Dict[str, Dict[str, str]]:
    return {"factors": {str(p): str(e) for p, e in x.factors}}


def epr_from_json(data: Mapping[str, Mapping[str, str]]) -> ExactPosReal:
    try:
        return ExactPosReal.from_map({int(p): Fraction(e) for p, e in data["factors"].items()})
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"malformed exact height {data!r}") from e


Number = Union[ExactPosReal, RatLike]


def as_epr(value: Number) -> ExactPosReal:
    return value if isinstance(value, ExactPosReal) else epr_from_rat(value)


if __name__ == "__main__":
    a = epr_pow(epr_from_rat(2), Fraction(1, 2))
    b = epr_pow(epr_from_rat(3), Fraction(1, 4))
    print(f"{a} vs {b}: {epr_cmp(a, b)}")
