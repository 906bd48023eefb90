"""
Named reproduction and property checks behind `cli.py verify`.

Each check returns a CheckResult; a check that raises is reported as a failure
with the exception text, so one broken check never hides the others.
"""
import logging
import math
import random
from typing import Callable, Dict, List, Tuple

from src.additive import additive_period, explicit_power, pi_brute, pi_formula, poly_power, prime_power_components, ub
from src.constructions import (
    is_regular,
    odometer_automata_rule,
    odometer_orbit_period,
    odometer_period_formula,
    prime_partition_rule,
)
from src.engine import cycle_census, extremal_from_census, rotate, spatial_period, step
from src.errors import CaPeriodsError
from src.models import AdditiveRule, CheckResult, Orientation, QuotientPoly, RingConfig, RingTag, RuleTable
from src.numtheory import euler_sequence
from src.rings import exponent_brute, lambda_formula, unity_root_census
from src.search import additive_rows, extremal_row, mcl_count, pi_ub_cases, pi_ub_rows, powers_of_two_check

logger = logging.getLogger(__name__)

SUITES = ("quick", "full")

EXTREMAL_N3 = {
    1: (3, 1458, 3, 1458, 3),
    2: (6, 216, 6, 216, 6),
    3: (24, 12, 24, 12, 24),
    4: (40, 12, 32, 72, 72),
    5: (120, 2, 120, 2, 240),
    6: (111, 6, 84, 42, 696),
    7: (1967, 12, 546, 2, 2184),
}

ADDITIVE_EXTREMES = {
    "rho_2": [2, 2, 2, 4, 2, 6, 2, 2, 4, 10, 2, 12, 6, 4, 2, 16, 2, 18, 4],
    "pi_2": [2, 2, 2, 4, 2, 6, 4, 6, 4, 10, 2, 12, 6, 4, 8, 16, 6, 18, 4],
    "rho_3": [3, 6, 3, 24, 6, 6, 3, 6, 24, 120, 6, 12, 6, 24, 3, 288, 6, 18, 24],
    "pi_3": [3, 6, 6, 24, 6, 6, 12, 18, 24, 120, 6, 12, 6, 24, 24, 288, 18, 18, 24],
}

PI_BELOW_UB = {
    (2, 2, 2): (2, 4),
    (4, 2, 2): (4, 8), (4, 2, 3): (4, 8),
    (7, 3, 1): (364, 728),
    (8, 2, 2): (8, 16), (8, 2, 3): (8, 16), (8, 2, 4): (8, 16),
    (11, 2, 1): (341, 1023),
    (13, 2, 1): (819, 4095),
    (14, 3, 1): (364, 728),
    (16, 2, 2): (16, 32), (16, 2, 3): (16, 32), (16, 2, 4): (16, 32), (16, 2, 5): (16, 32),
    (21, 3, 1): (1092, 2184),
    (22, 2, 1): (682, 2046),
    (26, 2, 1): (1638, 8190),
    (32, 2, 2): (32, 64), (32, 2, 3): (32, 64), (32, 2, 4): (32, 64), (32, 2, 5): (32, 64), (32, 2, 6): (32, 64),
    (42, 3, 1): (1092, 2184),
    (44, 2, 1): (1364, 4092),
}

# (sigma, largest n) pairs for pi_formula == pi_brute
PI_RANGES = {
    "quick": {2: 12, 3: 12, 4: 12, 6: 12},
    "full": {2: 20, 3: 20, 4: 12, 6: 12},
}

# largest n for pi_brute(sigma, n) <= n^(sigma - 1), sigma = 2..6
PI_BOUND_N = {"quick": 10, "full": 20}

LAMBDA_RANGES = {2: 200, 3: 60, 4: 60}


def _mismatches(pairs: List[Tuple[object, object, object]]) -> List[str]:
    return [f"{key}: got {got}, expected {want}" for key, got, want in pairs if got != want]


class PeriodsVerifier:
    """Runs the named checks of a suite, optionally reporting progress through a ConsoleView."""

    def __init__(self, view=None, threads: int = 1, seed: int = 0):
        self.view = view
        self.threads = threads
        self.seed = seed

    def checks(self, suite: str) -> Dict[str, Callable[[], Tuple[bool, str]]]:
        if suite not in SUITES:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        full = suite == "full"
        return {
            "additive-extremes": lambda: self.check_additive_extremes(20 if full else 10),
            "extremal-n3": lambda: self.check_extremal(7 if full else 4),
            "mcl": self.check_mcl,
            "pi-formula": lambda: self.check_pi_formula(PI_RANGES[suite]),
            "pi-vs-ub": lambda: self.check_pi_ub(full),
            "powers-of-two": self.check_powers_of_two,
            "odometer": self.check_odometer,
            "prime-partition": self.check_prime_partition,
            "odometer-automata": lambda: self.check_odometer_automata(4 if full else 3),
            "shift-equivariance": self.check_shift_equivariance,
            "spatial-period": self.check_spatial_period,
            "census-conservation": self.check_census_conservation,
            "lambda": lambda: self.check_lambda(LAMBDA_RANGES),
            "explicit-power": self.check_explicit_power,
            "crt-lcm": self.check_crt_lcm,
            "pi-bound": lambda: self.check_pi_bound(PI_BOUND_N[suite]),
            "eisenstein-involutions": self.check_eisenstein_involutions,
        }

    def run(self, suite: str = "quick") -> List[CheckResult]:
        results = []
        for name, check in self.checks(suite).items():
            logger.info("running check %s", name)
            try:
                if self.view is not None:
                    with self.view.show_status(f"Checking [cyan]{name}[/cyan]…"):
                        passed, detail = check()
                else:
                    passed, detail = check()
            except (CaPeriodsError, ValueError, AssertionError) as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            results.append(CheckResult(name=name, passed=passed, detail=detail))
        return results

    # ------------------------------------------------------------------ reproductions

    def check_additive_extremes(self, n_max: int) -> Tuple[bool, str]:
        rows = additive_rows(range(2, n_max + 1), self.threads)
        bad = _mismatches([
            (f"n={row.parameters['n']} {col}", row.values[col], ADDITIVE_EXTREMES[col][row.parameters["n"] - 2])
            for row in rows for col in ADDITIVE_EXTREMES
        ])
        return not bad, "; ".join(bad) or f"n = 2..{n_max}, {4 * len(rows)} values"

    def check_extremal(self, sigma_max: int) -> Tuple[bool, str]:
        bad = []
        for sigma in range(1, sigma_max + 1):
            v = extremal_row(3, sigma, threads=self.threads).values
            got = (v["maxX"], v["N_X"], v["maxY"], v["N_Y"], v["T"])
            bad += _mismatches([(f"sigma={sigma}", got, EXTREMAL_N3[sigma])])
        return not bad, "; ".join(bad) or f"n = 3, sigma = 1..{sigma_max}"

    def check_mcl(self) -> Tuple[bool, str]:
        bad = _mismatches([
            ("mcl(3, 2)", mcl_count(3, 2)[0], 1),
            ("mcl(3, 3)", mcl_count(3, 3)[0], 12),
            ("euler_sequence(0..3)", [euler_sequence(k) for k in range(4)], [1, 12, 732, 109332]),
        ])
        return not bad, "; ".join(bad) or "1, 12; Euler terms 1, 12, 732, 109332"

    def check_pi_formula(self, ranges: Dict[int, int]) -> Tuple[bool, str]:
        bad = _mismatches([
            (f"sigma={sigma} n={n}", pi_brute(sigma, n, self.threads)[0], pi_formula(sigma, n))
            for sigma, n_max in ranges.items() for n in range(2, n_max + 1)
        ])
        return not bad, "; ".join(bad) or ", ".join(f"sigma={s}: n <= {m}" for s, m in ranges.items())

    def check_pi_ub(self, full: bool) -> Tuple[bool, str]:
        cases = pi_ub_cases() if full else [c for c in pi_ub_cases() if c[0] <= 16 and c[1] ** c[2] <= 16]
        found = {
            (r.parameters["sigma"], r.parameters["p"], r.parameters["m"]): (r.values["pi"], r.values["ub"])
            for r in pi_ub_rows(cases, self.threads)
        }
        expected = {case: PI_BELOW_UB[case] for case in cases}
        bad = _mismatches([(case, found.get(case), want) for case, want in expected.items()])
        return not bad, "; ".join(bad) or f"{len(cases)} cases, all pi < ub as listed"

    def check_powers_of_two(self) -> Tuple[bool, str]:
        bad = []
        for k in (1, 2, 3):
            for row in powers_of_two_check(k, self.threads):
                bad += _mismatches([(f"sigma={row.parameters['sigma']} m={row.parameters['m']}",
                                     row.values["pi"], row.values["expected"])])
        return not bad, "; ".join(bad) or "sigma = 2, 4, 8"

    def check_odometer(self) -> Tuple[bool, str]:
        got = odometer_orbit_period(3, 10)
        want = odometer_period_formula(3, 10)
        return got == want, f"sigma=3 k=10: orbit period {got}, closed form {want}"

    def check_prime_partition(self) -> Tuple[bool, str]:
        rule, spec = prime_partition_rule(2, 6)
        census = cycle_census(rule, 2)
        ext = extremal_from_census(census)
        sinks = [rec for rec in census.cycles if rec.spatial_period < 2]
        sink_ok = len(sinks) == 1 and sinks[0].representative.word == (0, 0) and sinks[0].count == 1
        exact = [rec for rec in census.cycles if rec.spatial_period == 2]
        regular_ok = all(is_regular(rec.representative, spec) for rec in exact)
        passed = ext.X == 6 and ext.Y == 6 and sink_ok and regular_ok
        return passed, f"sigma=2 n=6: X={ext.X} Y={ext.Y}, sinks={len(sinks)}"

    def check_odometer_automata(self, k: int) -> Tuple[bool, str]:
        rule = odometer_automata_rule(2, k)
        census = cycle_census(rule, 2)
        lengths = sorted({rec.length for rec in census.cycles if rec.spatial_period == 2})
        want = odometer_period_formula(2, k)
        return lengths == [want], f"sigma=2 k={k} n={rule.n}: exact lengths {lengths}"

    # ------------------------------------------------------------------ properties

    def _random_rule(self, rng: random.Random, n: int, orientation: Orientation) -> RuleTable:
        return RuleTable(n=n, orientation=orientation, table=tuple(rng.randrange(n) for _ in range(n * n)))

    def check_shift_equivariance(self) -> Tuple[bool, str]:
        rng = random.Random(self.seed)
        for _ in range(200):
            n, sigma = rng.randint(2, 5), rng.randint(1, 10)
            rule = self._random_rule(rng, n, rng.choice(list(Orientation)))
            c = RingConfig(sigma, tuple(rng.randrange(n) for _ in range(sigma)))
            d = rng.randrange(sigma)
            if step(rule, rotate(c, d)) != rotate(step(rule, c), d):
                return False, f"rule {rule.table} on {c} shifted by {d}"
        return True, "200 random rules"

    def check_spatial_period(self) -> Tuple[bool, str]:
        rng = random.Random(self.seed + 1)
        for _ in range(200):
            n, sigma = rng.randint(2, 4), rng.randint(1, 9)
            rule = self._random_rule(rng, n, Orientation.LEFT)
            c = RingConfig(sigma, tuple(rng.randrange(n) for _ in range(sigma)))
            if spatial_period(c) % spatial_period(step(rule, c)) != 0:
                return False, f"rule {rule.table} on {c}"
        return True, "200 random steps"

    def check_census_conservation(self) -> Tuple[bool, str]:
        rng = random.Random(self.seed + 2)
        for _ in range(50):
            n, sigma = rng.randint(2, 4), rng.randint(1, 6)
            census = cycle_census(self._random_rule(rng, n, Orientation.LEFT), sigma)
            if census.total != n ** sigma:
                return False, f"n={n} sigma={sigma}: {census.total} != {n ** sigma}"
            if any(sigma % rec.spatial_period for rec in census.cycles):
                return False, f"n={n} sigma={sigma}: cycle spatial period does not divide sigma"
        return True, "50 random censuses"

    def check_lambda(self, ranges: Dict[int, int]) -> Tuple[bool, str]:
        tags = {2: RingTag.INTEGERS, 3: RingTag.EISENSTEIN, 4: RingTag.GAUSSIAN}
        for sigma, n_max in ranges.items():
            for n in range(2, n_max + 1):
                got, want = exponent_brute(tags[sigma], n).value, lambda_formula(sigma, n)
                if got != want:
                    return False, f"sigma={sigma} n={n}: brute {got}, formula {want}"
        return True, ", ".join(f"sigma={s}: n <= {m}" for s, m in ranges.items())

    def check_explicit_power(self) -> Tuple[bool, str]:
        rng = random.Random(self.seed + 3)
        for sigma in (2, 3, 4, 6):
            for _ in range(200):
                n = rng.randint(2, 30)
                a, b, t = rng.randrange(n), rng.randrange(n), rng.randint(0, 50)
                base = QuotientPoly(n, sigma, (a, b) + (0,) * (sigma - 2))
                if explicit_power(sigma, n, a, b, t) != poly_power(base, t):
                    return False, f"sigma={sigma} n={n} (a, b)=({a}, {b}) t={t}"
        return True, "200 random cases per sigma"

    def check_crt_lcm(self) -> Tuple[bool, str]:
        rng = random.Random(self.seed + 4)
        for _ in range(200):
            sigma, n = rng.randint(1, 6), rng.randint(2, 60)
            rule = AdditiveRule(n=n, sigma=sigma, a=rng.randrange(n), b=rng.randrange(n))
            parts = [additive_period(r).period for r in prime_power_components(rule)]
            if additive_period(rule).period != math.lcm(*parts):
                return False, f"{rule}"
        return True, "200 random additive rules"

    def check_pi_bound(self, n_max: int) -> Tuple[bool, str]:
        for sigma in range(2, 7):
            for n in range(2, n_max + 1):
                if pi_brute(sigma, n, self.threads)[0] > n ** (sigma - 1):
                    return False, f"sigma={sigma} n={n}"
        for sigma, p, m in ((3, 5, 1), (5, 2, 3), (6, 3, 2)):
            if pi_brute(sigma, p ** m, self.threads)[0] > ub(sigma, p, m):
                return False, f"sigma={sigma} q={p}^{m} exceeds ub"
        return True, f"sigma = 2..6, n <= {n_max}"

    def check_eisenstein_involutions(self) -> Tuple[bool, str]:
        counts = [unity_root_census(RingTag.EISENSTEIN, 2 ** m, 2) for m in (3, 4, 5)]
        return counts == [8, 8, 8], f"square roots of 1 in Z_2^m[w], m = 3, 4, 5: {counts}"


def failed_checks(results: List[CheckResult]) -> List[str]:
    return [r.name for r in results if not r.passed]
