"""
Evaluation of two-neighbour rules on a ring of sigma sites and exact cycle
census of the configuration functional graph.

Configurations are index-encoded big-endian in base n, so the word
c_0 ... c_{sigma-1} has index sum c_j n^(sigma-1-j).
"""
import logging
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import BudgetExceeded, UsageError
from src.interfaces import CycleFinder
from src.models import (
    CycleCensus,
    CycleRecord,
    EventualPeriod,
    ExtremalPeriods,
    Orientation,
    RingConfig,
    RuleTable,
)
from src.numtheory import divisors_of
from src.utils import check_budget, default_budget, default_cycle_finder, index_to_word, word_to_index

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- single configurations

def step(rule: RuleTable, c: RingConfig) -> RingConfig:
    n, word, sigma = rule.n, c.word, c.sigma
    if any(s >= n for s in word):
        raise ValueError(f"configuration {c} uses states outside Z_{n}")
    table = rule.table
    if rule.orientation is Orientation.LEFT:
        new = tuple(table[word[x - 1] * n + word[x]] for x in range(sigma))
    else:
        new = tuple(table[word[x] * n + word[(x + 1) % sigma]] for x in range(sigma))
    return RingConfig(sigma, new)


def rotate(c: RingConfig, d: int) -> RingConfig:
    """Shift the ring so that site i of the result holds site i + d of c."""
    d %= c.sigma
    return RingConfig(c.sigma, c.word[d:] + c.word[:d])


def spatial_period(c: RingConfig) -> int:
    for d in divisors_of(c.sigma):
        if rotate(c, d) == c:
            return d
    return c.sigma


def mirror(rule: RuleTable) -> RuleTable:
    """Vertical reflection: table'(c0, c1) = table(c1, c0) with the orientation flipped."""
    n = rule.n
    table = tuple(rule.table[c1 * n + c0] for c0 in range(n) for c1 in range(n))
    return RuleTable(n=n, orientation=rule.orientation.flipped(), table=table)


def config_index(c: RingConfig, n: int) -> int:
    return word_to_index(c.word, n)


def config_from_index(idx: int, n: int, sigma: int) -> RingConfig:
    return RingConfig(sigma, tuple(index_to_word(idx, n, sigma)))


def orbit(rule: RuleTable, c: RingConfig, max_steps: Optional[int] = None) -> EventualPeriod:
    """Period and preperiod of the orbit of one configuration."""
    seen: Dict[Tuple[int, ...], int] = {}
    t = 0
    while c.word not in seen:
        if max_steps is not None and t > max_steps:
            raise BudgetExceeded(t, max_steps, "orbit")
        seen[c.word] = t
        c = step(rule, c)
        t += 1
    return EventualPeriod(period=t - seen[c.word], preperiod=seen[c.word])


# --------------------------------------------------------------------------- whole index space

def all_digits(n: int, sigma: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """(stop - start, sigma) array; row i is the word with index start + i."""
    idx = np.arange(start, n ** sigma if stop is None else stop, dtype=np.int64)
    digits = np.empty((idx.size, sigma), dtype=np.int64)
    for j in range(sigma - 1, -1, -1):
        idx, digits[:, j] = np.divmod(idx, n)
    return digits


def pair_indices(n: int, sigma: int, orientation: Orientation,
                 start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Table index read by each site of each configuration in [start, stop)."""
    digits = all_digits(n, sigma, start, stop)
    if orientation is Orientation.LEFT:
        return np.roll(digits, 1, axis=1) * n + digits
    return digits * n + np.roll(digits, -1, axis=1)


def spatial_period_array(n: int, sigma: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    digits = all_digits(n, sigma, start, stop)
    out = np.zeros(digits.shape[0], dtype=np.int64)
    for d in divisors_of(sigma):
        fixed = (digits == np.roll(digits, -d, axis=1)).all(axis=1)
        out[(out == 0) & fixed] = d
    return out


def batch_successors(tables: np.ndarray, n: int, sigma: int, orientation: Orientation,
                     pairs: Optional[np.ndarray] = None) -> np.ndarray:
    """Successor arrays for a (B, n^2) stack of rule tables, shape (B, n^sigma)."""
    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    if pairs is None:
        pairs = pair_indices(n, sigma, orientation)
    succ = np.zeros((tables.shape[0], pairs.shape[0]), dtype=np.int64)
    for x in range(sigma):
        succ = succ * n + tables[:, pairs[:, x]]
    return succ


def successor_array(rule: RuleTable, sigma: int) -> np.ndarray:
    return batch_successors(np.asarray(rule.table), rule.n, sigma, rule.orientation)[0]


def doubling_labels(succ: np.ndarray) -> np.ndarray:
    """
    Pointer doubling over a (B, N) stack of functional graphs: cyclic nodes are
    the image of succ^(2^K) with 2^K >= N, and each gets the minimum index of its
    cycle after K min-propagation rounds. Transient nodes get -1.
    """
    succ = np.atleast_2d(succ)
    batch, size = succ.shape
    rounds = max(1, (size - 1).bit_length())
    image = succ.copy()
    for _ in range(rounds):
        image = np.take_along_axis(image, image, axis=1)
    cyclic = np.zeros((batch, size), dtype=bool)
    np.put_along_axis(cyclic, image, True, axis=1)

    labels = np.where(cyclic, np.arange(size, dtype=np.int64)[None, :], size)
    jump = succ.copy()
    for _ in range(rounds):
        labels = np.minimum(labels, np.take_along_axis(labels, jump, axis=1))
        jump = np.take_along_axis(jump, jump, axis=1)
    return np.where(cyclic, labels, -1)


class WalkCycleFinder(CycleFinder):
    """Iterative three-colour walk: 0 unvisited, 1 on the current path, 2 finished."""

    def cycle_labels(self, successors: np.ndarray) -> np.ndarray:
        succ = np.asarray(successors).tolist()
        size = len(succ)
        colour = bytearray(size)
        labels = [-1] * size
        for start in range(size):
            if colour[start]:
                continue
            path = []
            v = start
            while colour[v] == 0:
                colour[v] = 1
                path.append(v)
                v = succ[v]
            if colour[v] == 1:
                cycle = path[path.index(v):]
                low = min(cycle)
                for u in cycle:
                    labels[u] = low
            for u in path:
                colour[u] = 2
        return np.asarray(labels, dtype=np.int64)


class DoublingCycleFinder(CycleFinder):
    def cycle_labels(self, successors: np.ndarray) -> np.ndarray:
        return doubling_labels(np.asarray(successors, dtype=np.int64)[None, :])[0]


class CycleFinderFactory:
    @staticmethod
    def get_finder(name: Optional[str] = None) -> CycleFinder:
        finder_type = (name or default_cycle_finder()).lower()

        if finder_type == "walk":
            return WalkCycleFinder()
        elif finder_type == "doubling":
            return DoublingCycleFinder()
        else:
            raise UsageError(f"Unsupported CA_PERIODS_CYCLE_FINDER: {finder_type}")


# --------------------------------------------------------------------------- census

def _census_block(args: Tuple[Tuple[int, ...], int, int, Orientation, int, int]) -> Tuple[np.ndarray, np.ndarray]:
    table, n, sigma, orientation, start, stop = args
    pairs = pair_indices(n, sigma, orientation, start, stop)
    succ = batch_successors(np.asarray(table), n, sigma, orientation, pairs)[0]
    return succ, spatial_period_array(n, sigma, start, stop)


def census_arrays(rule: RuleTable, sigma: int, threads: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Successor and spatial-period arrays over the whole index space, split into index ranges per worker."""
    size = rule.n ** sigma
    shards = max(1, min(threads, size))
    bounds = np.linspace(0, size, shards + 1, dtype=np.int64).tolist()
    jobs = [(rule.table, rule.n, sigma, rule.orientation, lo, hi) for lo, hi in zip(bounds, bounds[1:])]
    if shards > 1:
        with Pool(shards) as pool:
            parts = pool.map(_census_block, jobs)
    else:
        parts = [_census_block(job) for job in jobs]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def cycle_census(rule: RuleTable, sigma: int, budget: Optional[int] = None,
                 finder: Optional[CycleFinder] = None, threads: int = 1) -> CycleCensus:
    """Every cycle of the functional graph on the n^sigma ring configurations."""
    n = rule.n
    size = n ** sigma
    check_budget(size, budget if budget is not None else default_budget(), "cycle census")
    finder = finder or CycleFinderFactory.get_finder()

    succ, periods = census_arrays(rule, sigma, threads)
    labels = finder.cycle_labels(succ)

    cyclic = labels >= 0
    nodes = np.flatnonzero(cyclic)
    if (periods[nodes] != periods[labels[nodes]]).any():
        raise AssertionError("spatial period changes along a cycle")

    reps = np.unique(labels[nodes])
    lengths = np.bincount(labels[nodes], minlength=size)[reps]
    groups: Dict[Tuple[int, int], List[int]] = {}
    for rep, length in zip(reps.tolist(), lengths.tolist()):
        key = (length, int(periods[rep]))
        groups.setdefault(key, []).append(rep)

    cycles = [
        CycleRecord(length=length, spatial_period=sp,
                    representative=config_from_index(members[0], n, sigma), count=len(members))
        for (length, sp), members in sorted(groups.items())
    ]
    census = CycleCensus(n=n, sigma=sigma, cycles=cycles, transient=int(size - nodes.size))
    logger.debug("census n=%d sigma=%d: %d cycle classes, %d transient", n, sigma, len(cycles), census.transient)
    return census


def extremal_from_census(census: CycleCensus) -> ExtremalPeriods:
    lengths = [c.length for c in census.cycles if c.spatial_period == census.sigma]
    if not lengths:
        return ExtremalPeriods()
    return ExtremalPeriods(X=max(lengths), Y=min(lengths))


def extremal_periods(rule: RuleTable, sigma: int, budget: Optional[int] = None,
                     finder: Optional[CycleFinder] = None) -> ExtremalPeriods:
    return extremal_from_census(cycle_census(rule, sigma, budget=budget, finder=finder))


def batch_extremal_periods(tables: np.ndarray, n: int, sigma: int, orientation: Orientation = Orientation.LEFT,
                           pairs: Optional[np.ndarray] = None,
                           periods: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    X and Y for a (B, n^2) stack of rules at once. Returns (X, Y, defined);
    X and Y are 0 where no cycle of exact spatial period sigma exists.
    """
    if periods is None:
        periods = spatial_period_array(n, sigma)
    succ = batch_successors(tables, n, sigma, orientation, pairs)
    batch, size = succ.shape
    labels = doubling_labels(succ)

    cyclic = labels >= 0
    offsets = (np.arange(batch, dtype=np.int64) * size)[:, None]
    flat = np.where(cyclic, labels + offsets, 0)
    counts = np.bincount(flat[cyclic], minlength=batch * size).reshape(batch, size)
    lengths = np.take_along_axis(counts, np.where(cyclic, labels, 0), axis=1)

    exact = cyclic & (periods[None, :] == sigma)
    defined = exact.any(axis=1)
    x = np.where(exact, lengths, 0).max(axis=1)
    y = np.where(exact, lengths, np.iinfo(np.int64).max).min(axis=1)
    y = np.where(defined, y, 0)
    if (y > x).any():
        raise AssertionError("Y exceeds X for some rule")
    return x, y, defined


def rules_to_array(rules: Sequence[RuleTable]) -> np.ndarray:
    return np.asarray([r.table for r in rules], dtype=np.int64)
