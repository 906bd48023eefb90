"""
Additive rules f(c0, c1) = b*c0 + a*c1 (mod n) viewed as multiplication by
T(x) = a + b*x in Z_n[x]/(x^sigma - 1).
"""
import logging
from functools import lru_cache
from multiprocessing import Pool
from typing import List, Tuple

from src.errors import UsageError
from src.models import AdditiveRule, EventualPeriod, Orientation, QuotientPoly, RingTag, RuleTable
from src.numtheory import factorize, lcm_all, mult_order_mod
from src.rings import RingFactory, lambda_formula

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]

# primitive sigma-th roots of unity as (ring, a, b)
_ROOTS = {
    2: (RingTag.INTEGERS, -1, 0),
    3: (RingTag.EISENSTEIN, 0, 1),
    4: (RingTag.GAUSSIAN, 0, 1),
    6: (RingTag.EISENSTEIN, 1, 1),
}


def poly_mul(u: QuotientPoly, v: QuotientPoly) -> QuotientPoly:
    """Cyclic convolution modulo n (x^sigma = 1)."""
    if u.modulus != v.modulus or u.sigma != v.sigma:
        raise ValueError(
            f"cannot multiply Z_{u.modulus}[x]/(x^{u.sigma}-1) by Z_{v.modulus}[x]/(x^{v.sigma}-1)"
        )
    n, sigma = u.modulus, u.sigma
    out = [0] * sigma
    for i, ui in enumerate(u.coeffs):
        if not ui:
            continue
        for j, vj in enumerate(v.coeffs):
            out[(i + j) % sigma] += ui * vj
    return QuotientPoly(n, sigma, tuple(c % n for c in out))


def poly_power(base: QuotientPoly, t: int) -> QuotientPoly:
    result = QuotientPoly.one(base.modulus, base.sigma)
    while t:
        if t & 1:
            result = poly_mul(result, base)
        base = poly_mul(base, base)
        t >>= 1
    return result


def _times_t(c: Tuple[int, ...], a: int, b: int, n: int) -> Tuple[int, ...]:
    # c'_j = a c_j + b c_{j-1}; c[-1] wraps
    return tuple((a * c[j] + b * c[j - 1]) % n for j in range(len(c)))


def _eventual_period(n: int, sigma: int, a: int, b: int) -> EventualPeriod:
    state = QuotientPoly.one(n, sigma).coeffs
    seen = {}
    t = 0
    while state not in seen:
        seen[state] = t
        state = _times_t(state, a, b, n)
        t += 1
    return EventualPeriod(period=t - seen[state], preperiod=seen[state])


def additive_period(rule: AdditiveRule) -> EventualPeriod:
    """Eventual period and preperiod of t -> T(x)^t, i.e. the orbit of 1 0^(sigma-1)."""
    return _eventual_period(rule.n, rule.sigma, rule.a, rule.b)


def _best_for_row(args: Tuple[int, int, int]) -> Tuple[int, Pair]:
    sigma, n, a = args
    best, arg = 0, (a, 0)
    for b in range(n):
        period = _eventual_period(n, sigma, a, b).period
        if period > best:
            best, arg = period, (a, b)
    return best, arg


@lru_cache(maxsize=None)
def pi_brute(sigma: int, n: int, threads: int = 1) -> Tuple[int, Pair]:
    """max over (a, b) of the eventual period; ties go to the lexicographically smallest (a, b)."""
    if sigma < 1 or n < 2:
        raise ValueError(f"pi_brute needs sigma >= 1 and n >= 2, got ({sigma}, {n})")
    jobs = [(sigma, n, a) for a in range(n)]
    if threads > 1:
        with Pool(threads) as pool:
            rows = pool.map(_best_for_row, jobs)
    else:
        rows = [_best_for_row(job) for job in jobs]
    # rows are in increasing a, so the first maximum is the lexicographic one
    value, arg = max(rows, key=lambda row: row[0])
    logger.debug("pi_brute(%d, %d) = %d at (a, b) = %s", sigma, n, value, arg)
    return value, arg


def _pi3_prime_power(q: int) -> int:
    # Z_2[x]/(x^3 - 1) has unit exponent 3; the Eisenstein exponent mod 6 overshoots to 6
    return 3 if q == 2 else lambda_formula(3, 3 * q)


def pi_formula(sigma: int, n: int) -> int:
    if sigma not in (2, 3, 4, 6):
        raise UsageError(f"closed form for pi_sigma exists for sigma in {{2, 3, 4, 6}}, got {sigma}")
    if n < 2:
        raise ValueError(f"pi_formula needs n >= 2, got {n}")
    if sigma == 2:
        return lambda_formula(2, 2 * n)
    if sigma == 3:
        return lcm_all(_pi3_prime_power(q) for q in factorize(n).prime_powers())
    if sigma == 4:
        return 4 if n == 2 else lambda_formula(4, n)
    return lambda_formula(3, 6 * n)


def explicit_power(sigma: int, n: int, a: int, b: int, t: int) -> QuotientPoly:
    """
    Coefficients of (a + b x)^t in Z_n[x]/(x^sigma - 1) without iterating:
    c_j = sigma^-1 * sum over sigma-th roots zeta of zeta^-j (a + b zeta)^t,
    evaluated in the ring of the roots modulo sigma*n, then divided by sigma.
    """
    if sigma not in _ROOTS:
        raise UsageError(f"explicit powers exist for sigma in {{2, 3, 4, 6}}, got {sigma}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    tag, za, zb = _ROOTS[sigma]
    ring = RingFactory.get_ring(tag, sigma * n)
    zeta = ring.element(za, zb)
    roots = [ring.power(zeta, k) for k in range(sigma)]
    values = [ring.power(ring.element(a + b * r.a, b * r.b), t) for r in roots]
    coeffs = []
    for j in range(sigma):
        total = ring.element(0)
        for k in range(sigma):
            term = ring.mul(roots[(-j * k) % sigma], values[k])
            total = ring.element(total.a + term.a, total.b + term.b)
        if total.b != 0 or total.a % sigma != 0:
            raise AssertionError(
                f"bracket for c_{j} of ({a} + {b}x)^{t} mod {n} is {total.a} + {total.b}zeta, "
                f"not divisible by {sigma}"
            )
        coeffs.append((total.a // sigma) % n)
    return QuotientPoly(n, sigma, tuple(coeffs))


@lru_cache(maxsize=None)
def ub(sigma: int, p: int, m: int) -> int:
    """Recursive divisibility bound on Pi_sigma(a, b; p^m)."""
    if m < 1 or sigma < 1:
        raise ValueError(f"ub needs sigma >= 1 and m >= 1, got ({sigma}, {m})")
    if m >= 2:
        return p * pi_brute(sigma, p ** (m - 1))[0]
    if sigma == 1:
        return p - 1
    if sigma % p:
        return p ** mult_order_mod(p, sigma) - 1
    k = 0
    rest = sigma
    while rest % p == 0:
        rest //= p
        k += 1
    return p ** k * ub(rest, p, 1)


def additive_rule_table(rule: AdditiveRule) -> RuleTable:
    """Left-oriented table of f(c0, c1) = b*c0 + a*c1."""
    n = rule.n
    table = tuple((rule.b * c0 + rule.a * c1) % n for c0 in range(n) for c1 in range(n))
    return RuleTable(n=n, orientation=Orientation.LEFT, table=table)


def prime_power_components(rule: AdditiveRule) -> List[AdditiveRule]:
    """The rule reduced modulo each prime power of n."""
    out = []
    for q in factorize(rule.n).prime_powers():
        out.append(AdditiveRule(n=q, sigma=rule.sigma, a=rule.a % q, b=rule.b % q))
    return out
