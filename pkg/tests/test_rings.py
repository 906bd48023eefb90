import math

import pytest
import sympy

from src.errors import UsageError
from src.models import KummerElement, RingTag
from src.rings import (
    RingFactory,
    appendix_prime_structure,
    exponent_brute,
    is_unit,
    lambda_formula,
    mul,
    order,
    order_by_iteration,
    unit_group_order,
    unity_root_census,
)

E, G, Z = RingTag.EISENSTEIN, RingTag.GAUSSIAN, RingTag.INTEGERS


def el(tag, n, a, b=0):
    return KummerElement.of(tag, n, a, b)


class TestArithmetic:
    def test_eisenstein_square(self):
        assert mul(el(E, 9, 1, 1), el(E, 9, 1, 1)) == el(E, 9, 0, 1)

    def test_gaussian_norm_product(self):
        assert mul(el(G, 5, 1, 1), el(G, 5, 1, -1)) == el(G, 5, 2, 0)

    def test_identity(self):
        x = el(E, 7, 3, 5)
        assert mul(x, el(E, 7, 1)) == x

    def test_omega_cubed_is_one(self):
        w = el(E, 11, 0, 1)
        assert mul(mul(w, w), w) == el(E, 11, 1)

    def test_mismatched_rings_rejected(self):
        with pytest.raises(ValueError):
            mul(el(E, 7, 1), el(G, 7, 1))
        with pytest.raises(ValueError):
            mul(el(E, 7, 1), el(E, 9, 1))

    def test_element_range_checked(self):
        with pytest.raises(ValueError):
            KummerElement(E, 5, 5, 0)
        with pytest.raises(ValueError):
            KummerElement(Z, 5, 1, 1)


class TestUnitsAndOrders:
    def test_is_unit(self):
        assert not is_unit(el(E, 9, 1, 2))
        assert is_unit(el(E, 7, 1, 2))
        assert not is_unit(el(Z, 6, 0))

    def test_orders(self):
        assert order(el(E, 13, 1)) == 1
        assert order(el(Z, 5, 2)) == 4
        assert order(el(Z, 6, 2)) == 1

    def test_descent_matches_iteration(self):
        for tag in (Z, G, E):
            for n in (4, 6, 7, 9, 12):
                ring = RingFactory.get_ring(tag, n)
                a, b = ring.elements()
                for x, y in zip(a.tolist(), b.tolist()):
                    x = ring.element(x, y)
                    assert order(x) == order_by_iteration(x)

    def test_unit_group_order_counts_units(self):
        for tag in (Z, G, E):
            for n in range(2, 30):
                ring = RingFactory.get_ring(tag, n)
                a, b = ring.elements()
                assert unit_group_order(tag, n) == int(ring.unit_mask(a, b).sum())

    def test_order_of_powers(self):
        ring = RingFactory.get_ring(E, 13)
        x = ring.element(2, 5)
        k = order(x)
        for j in range(1, 20):
            assert order(ring.power(x, j)) == k // math.gcd(k, j)

    def test_orders_divide_exponent(self):
        for tag in (G, E):
            for n in (5, 8, 9, 10):
                value = exponent_brute(tag, n).value
                ring = RingFactory.get_ring(tag, n)
                _, _, orders = ring.unit_orders()
                assert all(value % int(o) == 0 for o in orders)


class TestExponents:
    def test_examples(self):
        assert exponent_brute(Z, 8).value == 2
        assert exponent_brute(E, 3).value == 6
        assert exponent_brute(G, 3).value == 8

    def test_witness_attains_exponent(self):
        result = exponent_brute(E, 15)
        assert is_unit(result.witness)
        assert order(result.witness) == result.value

    def test_lambda_examples(self):
        assert lambda_formula(2, 18) == 6
        assert lambda_formula(3, 15) == 24
        assert lambda_formula(4, 8) == 4

    def test_lambda_rejects_other_sigma(self):
        with pytest.raises(UsageError):
            lambda_formula(5, 10)

    def test_lambda_integers_matches_carmichael(self):
        for n in range(2, 200):
            assert lambda_formula(2, n) == int(sympy.reduced_totient(n))

    def test_lambda_integers_matches_brute(self):
        for n in range(2, 80):
            assert lambda_formula(2, n) == exponent_brute(Z, n).value

    @pytest.mark.parametrize("sigma, tag", [(3, E), (4, G)])
    def test_lambda_quadratic_matches_brute(self, sigma, tag):
        for n in range(2, 31):
            assert lambda_formula(sigma, n) == exponent_brute(tag, n).value

    @pytest.mark.slow
    @pytest.mark.parametrize("sigma, tag", [(3, E), (4, G)])
    def test_lambda_quadratic_matches_brute_to_sixty(self, sigma, tag):
        for n in range(31, 61):
            assert lambda_formula(sigma, n) == exponent_brute(tag, n).value


class TestUnityRoots:
    def test_eisenstein_square_roots_mod_powers_of_two(self):
        for m in (3, 4, 5):
            assert unity_root_census(E, 2 ** m, 2) == 8

    def test_integers_mod_odd_prime(self):
        for p in (3, 5, 7, 11, 13):
            assert unity_root_census(Z, p, 2) == 2

    def test_first_power(self):
        for tag in (Z, G, E):
            assert unity_root_census(tag, 12, 1) == 1

    def test_prime_structure_observables(self):
        for tag in (G, E):
            for p in sympy.primerange(2, 20):
                factors = appendix_prime_structure(tag, p)
                assert math.prod(factors) == unit_group_order(tag, p)
                assert math.lcm(*factors) == exponent_brute(tag, p).value
                involutions = math.prod(math.gcd(2, d) for d in factors)
                assert unity_root_census(tag, p, 2) == involutions
