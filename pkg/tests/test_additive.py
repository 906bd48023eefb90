import math
import random

import pytest

from src.additive import (
    additive_period,
    additive_rule_table,
    explicit_power,
    pi_brute,
    pi_formula,
    poly_mul,
    poly_power,
    prime_power_components,
    ub,
)
from src.errors import UsageError
from src.models import AdditiveRule, Orientation, QuotientPoly

PI2 = [2, 2, 2, 4, 2, 6, 4, 6, 4, 10, 2, 12, 6, 4, 8, 16, 6, 18, 4]
PI3 = [3, 6, 6, 24, 6, 6, 12, 18, 24, 120, 6, 12, 6, 24, 24, 288, 18, 18, 24]


def qp(n, *coeffs):
    return QuotientPoly(n, len(coeffs), tuple(coeffs))


class TestPolyMul:
    def test_square(self):
        assert poly_mul(qp(3, 1, 1, 0, 0), qp(3, 1, 1, 0, 0)) == qp(3, 1, 2, 1, 0)

    def test_identity(self):
        u = qp(7, 3, 0, 5, 6)
        assert poly_mul(u, QuotientPoly.one(7, 4)) == u

    def test_wraparound(self):
        assert poly_mul(QuotientPoly.monomial(5, 4, 3), QuotientPoly.monomial(5, 4, 1)) == QuotientPoly.one(5, 4)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            poly_mul(qp(3, 1, 1), qp(5, 1, 1))


class TestAdditivePeriod:
    def test_sum_rule_mod_three(self):
        assert additive_period(AdditiveRule(n=3, sigma=4, a=1, b=1)).period == 8

    def test_pure_shift(self):
        for n in (2, 5, 9):
            for sigma in (1, 3, 6):
                result = additive_period(AdditiveRule(n=n, sigma=sigma, a=0, b=1))
                assert (result.period, result.preperiod) == (sigma, 0)

    def test_nilpotent_then_fixed(self):
        result = additive_period(AdditiveRule(n=2, sigma=2, a=1, b=1))
        assert result.period == 1
        assert result.preperiod == 2

    def test_crt_lcm(self):
        rng = random.Random(7)
        for n in (6, 10, 12, 15, 18, 20, 30, 36):
            for _ in range(10):
                sigma = rng.randint(2, 5)
                rule = AdditiveRule(n=n, sigma=sigma, a=rng.randrange(n), b=rng.randrange(n))
                parts = [additive_period(r).period for r in prime_power_components(rule)]
                assert additive_period(rule).period == math.lcm(*parts)

    def test_prime_power_lifting(self):
        for p, m in ((2, 2), (2, 3), (3, 2), (5, 2)):
            for sigma in (2, 3, 4):
                for a in range(p ** m):
                    for b in range(p ** m):
                        high = additive_period(AdditiveRule(p ** m, sigma, a, b)).period
                        low = additive_period(AdditiveRule(p ** (m - 1), sigma, a % p ** (m - 1), b % p ** (m - 1))).period
                        assert high in (low, p * low)

    def test_division_by_prime_of_sigma(self):
        for p, sigma in ((2, 2), (2, 4), (2, 6), (3, 3), (3, 6), (5, 5)):
            for a in range(p):
                for b in range(p):
                    big = additive_period(AdditiveRule(p, sigma, a, b)).period
                    small = additive_period(AdditiveRule(p, sigma // p, a, b)).period
                    assert (p * small) % big == 0

    def test_direct_verification_claims(self):
        for a in range(4):
            for b in range(4):
                assert 2 % additive_period(AdditiveRule(4, 2, a, b)).period == 0
        for a in range(3):
            for b in range(3):
                assert 6 % additive_period(AdditiveRule(3, 3, a, b)).period == 0
        for m in (1, 2, 3):
            for a in range(2 ** m):
                for b in range(2 ** m):
                    assert 4 % additive_period(AdditiveRule(2 ** m, 4, a, b)).period == 0


class TestPi:
    def test_examples(self):
        assert pi_brute(2, 8)[0] == 4
        assert pi_brute(3, 16)[0] == 24
        assert pi_brute(3, 11)[0] == 120

    def test_argmax_attains_value(self):
        value, (a, b) = pi_brute(3, 7)
        assert additive_period(AdditiveRule(7, 3, a, b)).period == value

    def test_argmax_is_lexicographically_first(self):
        value, arg = pi_brute(2, 5)
        firsts = [(a, b) for a in range(5) for b in range(5)
                  if additive_period(AdditiveRule(5, 2, a, b)).period == value]
        assert arg == firsts[0]

    def test_formula_examples(self):
        assert pi_formula(2, 9) == 6
        assert pi_formula(4, 2) == 4
        assert pi_formula(6, 2) == 6

    @pytest.mark.parametrize("sigma, n, value", [(3, 2, 3), (3, 4, 6), (3, 6, 6), (3, 10, 24), (3, 14, 6)])
    def test_three_sites_even_n(self, sigma, n, value):
        assert pi_formula(sigma, n) == value == pi_brute(sigma, n)[0]

    def test_formula_rejects_sigma(self):
        with pytest.raises(UsageError):
            pi_formula(5, 7)

    def test_table_rows(self):
        for n, p2, p3 in zip(range(2, 21), PI2, PI3):
            assert pi_formula(2, n) == p2
            assert pi_formula(3, n) == p3

    @pytest.mark.parametrize("sigma, n_max", [(2, 20), (3, 20), (4, 12), (6, 12)])
    def test_formula_matches_brute(self, sigma, n_max):
        for n in range(2, n_max + 1):
            assert pi_formula(sigma, n) == pi_brute(sigma, n)[0]

    def test_bounded_by_power_of_n(self):
        for sigma in range(2, 7):
            for n in range(2, 9):
                assert pi_brute(sigma, n)[0] <= n ** (sigma - 1)

    @pytest.mark.slow
    @pytest.mark.parametrize("sigma", [2, 3, 4, 5, 6])
    def test_bounded_by_power_of_n_to_twenty(self, sigma):
        for n in range(9, 21):
            assert pi_brute(sigma, n)[0] <= n ** (sigma - 1)

    def test_powers_of_two(self):
        for k in (1, 2, 3):
            sigma = 2 ** k
            for m in range(1, k + 2):
                assert pi_brute(sigma, 2 ** m)[0] == sigma
            assert pi_brute(sigma, 2 ** (k + 2))[0] == 2 * sigma


class TestExplicitPower:
    def test_first_power(self):
        assert explicit_power(4, 7, 3, 5, 1).coeffs == (3, 5, 0, 0)

    def test_square_sigma_two(self):
        for n in (5, 8, 9):
            for a in range(n):
                for b in range(n):
                    assert explicit_power(2, n, a, b, 2).coeffs == ((a * a + b * b) % n, (2 * a * b) % n)

    @pytest.mark.parametrize("sigma", [2, 3, 4, 6])
    def test_matches_repeated_multiplication(self, sigma):
        rng = random.Random(sigma)
        for _ in range(200):
            n = rng.randint(2, 30)
            a, b, t = rng.randrange(n), rng.randrange(n), rng.randint(0, 50)
            base = QuotientPoly(n, sigma, (a, b) + (0,) * (sigma - 2))
            assert explicit_power(sigma, n, a, b, t) == poly_power(base, t)

    def test_rejects_sigma(self):
        with pytest.raises(UsageError):
            explicit_power(5, 7, 1, 1, 3)


class TestUpperBound:
    @pytest.mark.parametrize("sigma, p, m, expected", [
        (7, 3, 1, 728), (11, 2, 1, 1023), (2, 2, 2, 4), (14, 3, 1, 728), (22, 2, 1, 2046),
        (42, 3, 1, 2184), (44, 2, 1, 4092), (1, 5, 1, 4),
    ])
    def test_values(self, sigma, p, m, expected):
        assert ub(sigma, p, m) == expected

    def test_bounds_pi_at_prime_powers(self):
        for sigma in range(1, 7):
            for q, p, m in ((2, 2, 1), (3, 3, 1), (4, 2, 2), (5, 5, 1), (7, 7, 1), (8, 2, 3), (9, 3, 2)):
                assert pi_brute(sigma, q)[0] <= ub(sigma, p, m)


class TestRuleTable:
    def test_sum_rule_table(self):
        table = additive_rule_table(AdditiveRule(n=3, sigma=4, a=1, b=1))
        assert table.orientation is Orientation.LEFT
        assert table(2, 2) == 1
        assert table(0, 1) == 1

    def test_components(self):
        parts = prime_power_components(AdditiveRule(n=12, sigma=3, a=7, b=5))
        assert [(r.n, r.a, r.b) for r in parts] == [(4, 3, 1), (3, 1, 2)]
