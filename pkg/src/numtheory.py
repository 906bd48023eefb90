"""
Exact integer number theory shared by the rest of the package: factorization,
Moebius function, aperiodic word counts, multiplicative orders and the Euler
polynomial sequence. Rationals are fractions.Fraction throughout.
"""
import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, List

from sympy import divisors, factorint, n_order

from src.models import Factorization

Rational = Fraction


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    return Factorization(tuple(sorted(factorint(n).items())))


def divisors_of(n: int) -> List[int]:
    """Positive divisors of n in increasing order."""
    return [int(d) for d in divisors(n)]


def lcm_all(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def mobius(n: int) -> int:
    fact = factorize(n)
    if any(m > 1 for _, m in fact.factors):
        return 0
    return -1 if len(fact.factors) % 2 else 1


def aperiodic_count(sigma: int, n: int) -> int:
    """T(sigma, n): number of length-sigma words over n letters with exact spatial period sigma."""
    if sigma < 1 or n < 2:
        raise ValueError(f"aperiodic_count needs sigma >= 1 and n >= 2, got ({sigma}, {n})")
    return sum(mobius(sigma // d) * n ** d for d in divisors_of(sigma))


def mult_order_mod(p: int, sigma: int) -> int:
    """Smallest t >= 1 with p^t = 1 (mod sigma)."""
    if sigma < 2:
        raise ValueError(f"modulus must be >= 2, got {sigma}")
    if math.gcd(p, sigma) != 1:
        raise ValueError(f"{p} is not invertible modulo {sigma}")
    return int(n_order(p % sigma, sigma))


@lru_cache(maxsize=None)
def euler_polynomial_value(m: int, x: Fraction) -> Fraction:
    """E_m(x) via E_m(x) = x^m - 1/2 * sum_{j<m} C(m, j) E_j(x)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    x = Fraction(x)
    values: List[Fraction] = []
    for k in range(m + 1):
        acc = sum((math.comb(k, j) * values[j] for j in range(k)), Fraction(0))
        values.append(x ** k - acc / 2)
    return values[m]


def euler_sequence(k: int) -> int:
    """(-1)^k 7^{2k} E_{2k}(3/7): 1, 12, 732, 109332, ..."""
    if k < 0:
        raise ValueError("k must be >= 0")
    value = (-1) ** k * 7 ** (2 * k) * euler_polynomial_value(2 * k, Fraction(3, 7))
    if value.denominator != 1:
        raise AssertionError(f"euler_sequence({k}) = {value} is not an integer")
    return int(value)
