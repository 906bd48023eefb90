import itertools
import random

import pytest

from src.constructions import (
    AutomataEncoding,
    OdometerEncoding,
    aperiodic_tour_rule,
    arrow_reader_step,
    automata_start,
    automata_step,
    construction_bound,
    diagonal_cycle_rule,
    encoding_sidecar,
    end_reader_step,
    is_legitimate,
    is_regular,
    matching_assignments,
    odometer_automata_rule,
    odometer_orbit_period,
    odometer_period_formula,
    odometer_rule,
    odometer_start,
    odometer_step,
    prime_partition_rule,
    select_primes,
)
from src.engine import cycle_census, extremal_from_census, extremal_periods, mirror, orbit, rotate, step
from src.errors import InfeasibleParameters
from src.models import T1, T2, AutomataCell, OdometerCell, Orientation, RingConfig


def cycle_words(rule, c):
    result = orbit(rule, c)
    for _ in range(result.preperiod):
        c = step(rule, c)
    words = set()
    for _ in range(result.period):
        words.add(c.word)
        c = step(rule, c)
    return result, words


def exact_lengths(census):
    return {rec.length for rec in census.cycles if rec.spatial_period == census.sigma}


@pytest.fixture(scope="module")
def small_automata():
    # sigma = 2, k = 3: n = 16 * 2 * 4 * 3 + 1 = 385
    return odometer_automata_rule(2, 3)


class TestOdometerAssignments:
    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_patterns_disjoint(self, k):
        cells = OdometerEncoding(k).states()
        for s, r in itertools.product(cells, cells):
            assert len(matching_assignments(k, s, r)) <= 1

    def test_arrow_moves_left(self):
        out = odometer_step(10, OdometerCell(4), OdometerCell(7, arrow=True))
        assert out == OdometerCell(4, arrow=True)

    def test_carry_marks_star(self):
        out = odometer_step(10, OdometerCell(4), OdometerCell(9, arrow=True, end=True))
        assert out == OdometerCell(4, arrow=True, star=True)

    def test_star_increments(self):
        assert odometer_step(10, OdometerCell(9, arrow=True, star=True), OdometerCell(0)) == OdometerCell(0)

    def test_end_counter_wraps(self):
        assert odometer_step(10, OdometerCell(9, arrow=True, end=True), OdometerCell(3)) == OdometerCell(0, end=True)

    def test_default_is_identity(self):
        cell = OdometerCell(2, star=True)
        assert odometer_step(4, cell, OdometerCell(1)) == cell

    def test_table_independent_of_sigma(self):
        assert odometer_rule(2, 3) == odometer_rule(5, 3)
        assert odometer_rule(2, 3).orientation is Orientation.RIGHT
        assert odometer_rule(2, 3).n == 24

    def test_rejects_small_parameters(self):
        with pytest.raises(InfeasibleParameters):
            odometer_rule(1, 3)
        with pytest.raises(InfeasibleParameters):
            odometer_rule(2, 1)


class TestOdometerOrbit:
    def test_first_steps_count_at_end(self):
        rule = odometer_rule(3, 10)
        enc = OdometerEncoding(10)
        c = step(rule, odometer_start(3, 10))
        assert [enc.decode(s) for s in c.word] == [OdometerCell(0), OdometerCell(0), OdometerCell(1, arrow=True, end=True)]

    def test_ten_digit_three_sites(self):
        period = odometer_orbit_period(3, 10)
        assert period == 1200
        assert period > 10 ** 3

    @pytest.mark.parametrize("sigma, k", [(2, 2), (2, 3), (2, 5), (3, 3), (3, 4), (4, 2)])
    def test_closed_form(self, sigma, k):
        assert odometer_orbit_period(sigma, k) == odometer_period_formula(sigma, k)
        assert odometer_period_formula(sigma, k) >= k ** sigma

    def test_start_is_on_cycle(self):
        result = orbit(odometer_rule(2, 3), odometer_start(2, 3))
        assert (result.period, result.preperiod) == (12, 0)

    def test_legitimate_configs_enter_odometer_cycle(self):
        sigma, k = 2, 3
        rule = odometer_rule(sigma, k)
        _, canonical = cycle_words(rule, odometer_start(sigma, k))
        targets = {rotate(RingConfig(sigma, w), d).word for w in canonical for d in range(sigma)}
        legit = [RingConfig(sigma, w) for w in itertools.product(range(8 * k), repeat=sigma)]
        legit = [c for c in legit if is_legitimate(c, k)]
        assert legit
        for c in legit:
            result, words = cycle_words(rule, c)
            assert result.period == odometer_period_formula(sigma, k)
            assert words & targets

    def test_random_legitimate_configs_three_sites(self):
        sigma, k = 3, 4
        rule = odometer_rule(sigma, k)
        _, canonical = cycle_words(rule, odometer_start(sigma, k))
        targets = {rotate(RingConfig(sigma, w), d).word for w in canonical for d in range(sigma)}
        rng = random.Random(3)
        checked = 0
        while checked < 60:
            c = RingConfig(sigma, tuple(rng.randrange(8 * k) for _ in range(sigma)))
            if not is_legitimate(c, k):
                continue
            _, words = cycle_words(rule, c)
            assert words & targets
            checked += 1


class TestLegitimacy:
    def encode(self, k, cells):
        enc = OdometerEncoding(k)
        return RingConfig(len(cells), tuple(enc.encode(c) for c in cells))

    def test_start(self):
        assert is_legitimate(odometer_start(3, 10), 10)

    def test_two_arrows(self):
        c = self.encode(5, [OdometerCell(1, arrow=True), OdometerCell(0), OdometerCell(2, arrow=True, end=True)])
        assert not is_legitimate(c, 5)

    def test_star_at_end(self):
        c = self.encode(5, [OdometerCell(1), OdometerCell(0, arrow=True, star=True, end=True)])
        assert not is_legitimate(c, 5)

    def test_star_without_arrow(self):
        c = self.encode(5, [OdometerCell(1, star=True), OdometerCell(0, arrow=True, end=True)])
        assert not is_legitimate(c, 5)

    def test_automata_start(self):
        assert is_legitimate(automata_start(2, 3), 3, automata=True)

    def test_terminator_is_not_legitimate(self):
        enc = AutomataEncoding(2, 3)
        c = RingConfig(2, (enc.terminator, automata_start(2, 3).word[1]))
        assert not is_legitimate(c, 3, automata=True)


class TestReaders:
    def test_end_reader_examples(self):
        assert end_reader_step(3, (0, 0), False) == (1, 0)
        assert end_reader_step(3, (0, 0), True) == (1, 1)
        assert end_reader_step(3, (2, 1), True) == T1
        assert end_reader_step(3, T1, False) == T1

    def test_end_reader_wraps(self):
        assert end_reader_step(3, (2, 0), True) == (0, 0)
        assert end_reader_step(3, (2, 0), False) == T1
        assert end_reader_step(3, (2, 1), False) == (0, 0)

    @pytest.mark.parametrize("sigma", [2, 3, 5])
    def test_end_reader_one_end_per_window(self, sigma):
        for pos in range(sigma):
            state = (0, 0)
            for _ in range(3):
                for x in range(sigma):
                    state = end_reader_step(sigma, state, x == pos)
                assert state == (0, 0)

    @pytest.mark.parametrize("ends", [0, 2])
    def test_end_reader_wrong_count_terminates(self, ends):
        sigma = 4
        state = (0, 0)
        for x in range(sigma):
            state = end_reader_step(sigma, state, x < ends)
        assert state == T1

    def test_arrow_reader_examples(self):
        assert arrow_reader_step(3, 0, (False, True)) == 1
        assert arrow_reader_step(3, 3, (False, True)) == T2
        assert arrow_reader_step(3, 3, (True, True)) == 0
        assert arrow_reader_step(3, 2, (False, False)) == 0
        assert arrow_reader_step(3, T2, (True, False)) == T2


class TestAutomataStep:
    def cell(self, first, er=(0, 0), ar=0):
        return AutomataCell(first, er, ar)

    def test_terminator_propagates(self):
        assert automata_step(2, 3, self.cell(OdometerCell(0)), AutomataCell()).is_terminator
        assert automata_step(2, 3, self.cell(OdometerCell(0), er=T1), self.cell(OdometerCell(1))).is_terminator
        assert automata_step(2, 3, self.cell(OdometerCell(0)), self.cell(OdometerCell(1), ar=T2)).is_terminator

    def test_stray_star(self):
        assert automata_step(2, 3, self.cell(OdometerCell(0, star=True)), self.cell(OdometerCell(1))).is_terminator
        star_end = self.cell(OdometerCell(0, arrow=True, star=True, end=True))
        assert automata_step(2, 3, star_end, self.cell(OdometerCell(1))).is_terminator

    def test_double_arrow(self):
        s = self.cell(OdometerCell(0, arrow=True))
        r = self.cell(OdometerCell(1, arrow=True, end=True))
        assert automata_step(2, 3, s, r).is_terminator

    def test_readers_move(self):
        s = self.cell(OdometerCell(1), er=(1, 1), ar=2)
        r = self.cell(OdometerCell(2, end=True), er=(0, 0), ar=0)
        out = automata_step(3, 4, s, r)
        assert out.first == OdometerCell(1)
        assert out.end_reader == (1, 1)
        assert out.arrow_reader == 0


class TestOdometerAutomata:
    def test_state_count(self):
        assert AutomataEncoding(2, 4).n == 513
        assert AutomataEncoding(3, 4).n == 16 * 3 * 5 * 4 + 1

    def test_encoding_is_bijective(self):
        enc = AutomataEncoding(2, 3)
        cells = [enc.decode(i) for i in range(enc.terminator)]
        assert len(set(cells)) == enc.terminator
        assert all(enc.encode(c) == i for i, c in enumerate(cells))

    def test_preconditions(self):
        with pytest.raises(InfeasibleParameters):
            odometer_automata_rule(3, 3)
        with pytest.raises(InfeasibleParameters):
            odometer_automata_rule(2, 3, n=100)

    def test_minimum_state_count(self, small_automata):
        assert small_automata.n == 385
        assert AutomataEncoding(2, 3).terminator == 384

    def test_bound_counts_full_digits(self):
        assert construction_bound("odometer-automata", 2, 384) == 25
        assert construction_bound("odometer-automata", 2, 385) == 36
        assert construction_bound("odometer-automata", 2, 385, k=3) == 9

    def test_leftover_states_terminate(self):
        rule = odometer_automata_rule(2, 3, n=400)
        enc = AutomataEncoding(2, 3, 400)
        start = automata_start(2, 3).word[0]
        assert rule(399, start) == enc.terminator
        assert rule(start, 399) == enc.terminator

    def test_canonical_orbit_never_terminates(self, small_automata):
        enc = AutomataEncoding(2, 3)
        c = automata_start(2, 3)
        result = orbit(small_automata, c)
        assert result.period == odometer_period_formula(2, 3)
        for _ in range(result.period):
            assert not any(enc.decode(s).is_terminated for s in c.word)
            c = step(small_automata, c)

    def test_terminated_configs_collapse(self, small_automata):
        sigma = 2
        enc = AutomataEncoding(sigma, 3)
        rng = random.Random(5)
        dying = [enc.terminator] + [
            i for i in range(enc.terminator) if enc.decode(i).is_terminated
        ]
        for _ in range(200):
            word = [rng.randrange(enc.n) for _ in range(sigma)]
            word[rng.randrange(sigma)] = rng.choice(dying)
            c = RingConfig(sigma, tuple(word))
            for _ in range(2 * sigma):
                c = step(small_automata, c)
            assert c.word == (enc.terminator,) * sigma

    def test_one_exact_length(self, small_automata):
        census = cycle_census(small_automata, 2)
        assert exact_lengths(census) == {odometer_period_formula(2, 3)}
        result = extremal_from_census(census)
        assert result.X == result.Y == 12 >= construction_bound("odometer-automata", 2, small_automata.n, k=3)

    @pytest.mark.slow
    def test_four_digits_two_sites(self):
        rule = odometer_automata_rule(2, 4, n=513)
        census = cycle_census(rule, 2)
        assert exact_lengths(census) == {20}
        result = extremal_from_census(census)
        assert result.X == result.Y >= 16


class TestPrimePartition:
    def test_two_sites_six_states(self):
        rule, spec = prime_partition_rule(2, 6)
        assert spec.primes == (2, 3)
        assert spec.fallback
        census = cycle_census(rule, 2)
        result = extremal_from_census(census)
        assert (result.X, result.Y) == (6, 6)
        sinks = [rec for rec in census.cycles if rec.spatial_period < 2]
        assert len(sinks) == 1
        assert sinks[0].representative.word == (0, 0) and sinks[0].count == 1

    def test_non_regular_configs_die(self):
        rule, spec = prime_partition_rule(2, 6)
        for word in itertools.product(range(6), repeat=2):
            c = RingConfig(2, word)
            if is_regular(c, spec):
                continue
            result, words = cycle_words(rule, c)
            assert words == {(0, 0)}

    def test_three_sites_fallback(self):
        rule, spec = prime_partition_rule(3, 16)
        assert spec.primes == (3, 5, 7)
        assert spec.fallback
        result = extremal_periods(rule, 3)
        assert (result.X, result.Y) == (105, 105)

    def test_regularity_preserved(self):
        rule, spec = prime_partition_rule(3, 16)
        rng = random.Random(2)
        for _ in range(100):
            offset = rng.randrange(3)
            word = tuple(rng.choice(spec.blocks[(offset + i) % 3]) for i in range(3))
            c = RingConfig(3, word)
            assert is_regular(c, spec)
            assert is_regular(step(rule, c), spec)

    def test_interval_selection(self):
        assert select_primes(2, 30) == ([11, 13], False)

    def test_infeasible(self):
        with pytest.raises(InfeasibleParameters):
            prime_partition_rule(5, 7)

    def test_mirror_keeps_periods(self):
        rule, _ = prime_partition_rule(2, 6)
        result = extremal_periods(mirror(rule), 2)
        assert (result.X, result.Y) == (6, 6)


class TestSmallConstructions:
    @pytest.mark.parametrize("n", [2, 3, 7])
    def test_diagonal_cycle(self, n):
        result = extremal_periods(diagonal_cycle_rule(n), 1)
        assert (result.X, result.Y) == (n, n)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_aperiodic_tour(self, n):
        result = extremal_periods(aperiodic_tour_rule(n), 2)
        assert (result.X, result.Y) == (n * n - n, n * n - n)


class TestSidecar:
    def test_odometer(self):
        sidecar = encoding_sidecar("odometer", 3, k=4)
        assert sidecar["n"] == 32
        assert sidecar["states"][0 + 4 * 5]["state"] == {"digit": 0, "arrow": True, "star": False, "end": True}

    def test_automata(self):
        sidecar = encoding_sidecar("odometer-automata", 2, k=3, n=387)
        assert len(sidecar["states"]) == 387
        assert sidecar["states"][384]["state"] == "T"
        assert sidecar["states"][386]["state"] == "leftover"
        assert sidecar["states"][0]["end_reader"] == [0, 0]

    def test_prime_partition(self):
        _, spec = prime_partition_rule(2, 6)
        sidecar = encoding_sidecar("prime-partition", 2, spec=spec)
        assert sidecar["blocks"] == [[1, 2], [3, 4, 5]]
        assert sidecar["fallback"] is True
