"""
Arithmetic in Z_n, Z_n[i] and Z_n[omega] (omega^2 = -1 - omega): units, element
orders, unit group exponents by closed formula and by exhaustive enumeration.
Elements are always (a, b) residue pairs, never complex floats.
"""
import logging
import math
from typing import Dict, List, Tuple, Type

import numpy as np
from sympy import totient

from src.errors import UsageError
from src.interfaces import KummerRing
from src.models import GroupExponentResult, KummerElement, RingTag
from src.numtheory import factorize, lcm_all

logger = logging.getLogger(__name__)


class _QuadraticRing(KummerRing):
    """Operations shared by the three rings; subclasses supply norm and product."""

    def element(self, a: int, b: int = 0) -> KummerElement:
        return KummerElement.of(self.tag, self.modulus, a, b)

    def one(self) -> KummerElement:
        return self.element(1, 0)

    def _check(self, x: KummerElement) -> None:
        if x.ring is not self.tag or x.modulus != self.modulus:
            raise ValueError(
                f"element of {x.ring.value} mod {x.modulus} used in {self.tag.value} mod {self.modulus}"
            )

    def mul(self, x: KummerElement, y: KummerElement) -> KummerElement:
        self._check(x)
        self._check(y)
        a, b = self.mul_pairs(x.a, x.b, y.a, y.b)
        return self.element(a, b)

    def power(self, x: KummerElement, e: int) -> KummerElement:
        if e < 0:
            raise ValueError("negative exponents are not supported")
        self._check(x)
        n = self.modulus
        ra, rb = 1 % n, 0
        ba, bb = x.a, x.b
        while e:
            if e & 1:
                ra, rb = (v % n for v in self.mul_pairs(ra, rb, ba, bb))
            ba, bb = (v % n for v in self.mul_pairs(ba, bb, ba, bb))
            e >>= 1
        return self.element(ra, rb)

    def is_unit(self, x: KummerElement) -> bool:
        self._check(x)
        return math.gcd(int(self.norm(x.a, x.b)) % self.modulus, self.modulus) == 1

    def unit_group_order(self) -> int:
        out = 1
        for p, m in factorize(self.modulus).factors:
            out *= self.prime_power_unit_count(p, m)
        return out

    def prime_power_unit_count(self, p: int, m: int) -> int:
        return p ** (2 * (m - 1)) * self.prime_unit_count(p)

    def order(self, x: KummerElement) -> int:
        """Multiplicative order of a unit by descent through the group cardinality; 1 for non-units."""
        if not self.is_unit(x):
            return 1
        one = self.one()
        result = self.unit_group_order()
        for q, _ in factorize(result).factors:
            while result % q == 0 and self.power(x, result // q) == one:
                result //= q
        return result

    def order_by_iteration(self, x: KummerElement) -> int:
        if not self.is_unit(x):
            return 1
        one = self.one()
        k, y = 1, x
        while y != one:
            y = self.mul(y, x)
            k += 1
        return k

    def lambda_formula(self) -> int:
        return lcm_all(self.lambda_prime_power(p, m) for p, m in factorize(self.modulus).factors)

    def elements(self) -> Tuple[np.ndarray, np.ndarray]:
        n = self.modulus
        a, b = np.divmod(np.arange(n * n, dtype=np.int64), n)
        return a, b

    def unit_mask(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.gcd(self.norm(a, b) % self.modulus, self.modulus) == 1

    def power_arrays(self, a: np.ndarray, b: np.ndarray, e: int) -> Tuple[np.ndarray, np.ndarray]:
        n = self.modulus
        ra = np.full_like(a, 1 % n)
        rb = np.zeros_like(b)
        ba, bb = a % n, b % n
        while e:
            if e & 1:
                ra, rb = (v % n for v in self.mul_pairs(ra, rb, ba, bb))
            ba, bb = (v % n for v in self.mul_pairs(ba, bb, ba, bb))
            e >>= 1
        return ra, rb

    def unit_orders(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(a, b, order) for every unit, orders found by vectorised iteration."""
        a, b = self.elements()
        mask = self.unit_mask(a, b)
        a, b = a[mask], b[mask]
        n = self.modulus
        orders = np.zeros(a.shape, dtype=np.int64)
        ca, cb = a.copy(), b.copy()
        k = 1
        while True:
            hit = (orders == 0) & (ca == 1 % n) & (cb == 0)
            orders[hit] = k
            if (orders > 0).all():
                break
            ca, cb = (v % n for v in self.mul_pairs(ca, cb, a, b))
            k += 1
        return a, b, orders


class IntegersRing(_QuadraticRing):
    tag = RingTag.INTEGERS

    def norm(self, a, b):
        return a

    def mul_pairs(self, a1, b1, a2, b2):
        return a1 * a2, b1 * 0

    def prime_unit_count(self, p: int) -> int:
        return p - 1

    def prime_power_unit_count(self, p: int, m: int) -> int:
        return int(totient(p ** m))

    def lambda_prime_power(self, p: int, m: int) -> int:
        if p == 2:
            return 2 ** (m - 1) if m <= 2 else 2 ** (m - 2)
        return p ** (m - 1) * (p - 1)

    def prime_structure(self, p: int) -> List[int]:
        return [p - 1]

    def elements(self) -> Tuple[np.ndarray, np.ndarray]:
        a = np.arange(self.modulus, dtype=np.int64)
        return a, np.zeros_like(a)


class GaussianRing(_QuadraticRing):
    """Z_n[i], i^2 = -1."""
    tag = RingTag.GAUSSIAN

    def norm(self, a, b):
        return a * a + b * b

    def mul_pairs(self, a1, b1, a2, b2):
        return a1 * a2 - b1 * b2, a1 * b2 + a2 * b1

    def prime_unit_count(self, p: int) -> int:
        if p == 2:
            return 2
        return (p - 1) ** 2 if p % 4 == 1 else p * p - 1

    def lambda_prime_power(self, p: int, m: int) -> int:
        if p == 2:
            return 2 ** m if m <= 2 else 2 ** (m - 1)
        if p % 4 == 1:
            return p ** (m - 1) * (p - 1)
        return p ** (m - 1) * (p * p - 1)

    def prime_structure(self, p: int) -> List[int]:
        if p == 2:
            return [2]
        return [p - 1, p - 1] if p % 4 == 1 else [p * p - 1]


class EisensteinRing(_QuadraticRing):
    """Z_n[omega], omega^2 = -1 - omega."""
    tag = RingTag.EISENSTEIN

    def norm(self, a, b):
        return a * a + b * b - a * b

    def mul_pairs(self, a1, b1, a2, b2):
        bd = b1 * b2
        return a1 * a2 - bd, a1 * b2 + a2 * b1 - bd

    def prime_unit_count(self, p: int) -> int:
        if p == 3:
            return 6
        return (p - 1) ** 2 if p % 3 == 1 else p * p - 1

    def lambda_prime_power(self, p: int, m: int) -> int:
        if p == 3:
            return 6 if m == 1 else 2 * 3 ** (m - 1)
        if p % 3 == 1:
            return p ** (m - 1) * (p - 1)
        return p ** (m - 1) * (p * p - 1)

    def prime_structure(self, p: int) -> List[int]:
        if p == 3:
            return [6]
        return [p - 1, p - 1] if p % 3 == 1 else [p * p - 1]


class RingFactory:
    _RINGS: Dict[RingTag, Type[_QuadraticRing]] = {
        RingTag.INTEGERS: IntegersRing,
        RingTag.GAUSSIAN: GaussianRing,
        RingTag.EISENSTEIN: EisensteinRing,
    }
    _SIGMA_TAGS = {2: RingTag.INTEGERS, 3: RingTag.EISENSTEIN, 4: RingTag.GAUSSIAN}

    @staticmethod
    def get_ring(tag: RingTag, modulus: int) -> _QuadraticRing:
        tag = RingTag(tag)
        return RingFactory._RINGS[tag](modulus)

    @staticmethod
    def tag_for_sigma(sigma: int) -> RingTag:
        """Ring whose unit exponent is lambda_sigma: Z_n (2), Z_n[omega] (3), Z_n[i] (4)."""
        if sigma not in RingFactory._SIGMA_TAGS:
            raise UsageError(f"lambda_sigma is defined for sigma in {{2, 3, 4}}, got {sigma}")
        return RingFactory._SIGMA_TAGS[sigma]


def _ring_of(x: KummerElement) -> _QuadraticRing:
    return RingFactory.get_ring(x.ring, x.modulus)


def mul(x: KummerElement, y: KummerElement) -> KummerElement:
    if x.ring is not y.ring or x.modulus != y.modulus:
        raise ValueError("mul needs operands from the same ring and modulus")
    return _ring_of(x).mul(x, y)


def is_unit(x: KummerElement) -> bool:
    return _ring_of(x).is_unit(x)


def order(x: KummerElement) -> int:
    return _ring_of(x).order(x)


def order_by_iteration(x: KummerElement) -> int:
    return _ring_of(x).order_by_iteration(x)


def unit_group_order(tag: RingTag, n: int) -> int:
    return RingFactory.get_ring(tag, n).unit_group_order()


def exponent_brute(tag: RingTag, n: int) -> GroupExponentResult:
    """Exponent of the unit group by enumerating every element; witness is the first unit attaining it."""
    ring = RingFactory.get_ring(tag, n)
    a, b, orders = ring.unit_orders()
    value = lcm_all(int(o) for o in np.unique(orders))
    first = int(np.flatnonzero(orders == value)[0])
    logger.debug("exponent_brute(%s, %d) = %d over %d units", ring.tag.value, n, value, len(orders))
    return GroupExponentResult(value=value, witness=ring.element(int(a[first]), int(b[first])))


def lambda_formula(sigma: int, n: int) -> int:
    """lambda_sigma(n) as the lcm of the closed-form prime-power exponents."""
    if n < 2:
        raise ValueError(f"lambda needs n >= 2, got {n}")
    return RingFactory.get_ring(RingFactory.tag_for_sigma(sigma), n).lambda_formula()


def unity_root_census(tag: RingTag, n: int, e: int) -> int:
    """Number of ring elements x with x^e = 1."""
    if e < 1:
        raise ValueError("e must be positive")
    ring = RingFactory.get_ring(tag, n)
    a, b = ring.elements()
    ra, rb = ring.power_arrays(a, b, e)
    return int(np.count_nonzero((ra == 1 % n) & (rb == 0)))


def appendix_prime_structure(tag: RingTag, p: int) -> List[int]:
    """Cyclic factor orders of Z_p[zeta]^x for a prime p."""
    return RingFactory.get_ring(tag, p).prime_structure(p)
