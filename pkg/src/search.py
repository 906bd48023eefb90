"""
Exhaustive and structured searches over rule spaces: MCL counts, extremal
X / Y over every n-state rule, additive rho / pi, and the pi-versus-ub scan.

Rules are enumerated lexicographically by their n^2-digit base-n table,
most significant digit first, and processed in fixed chunks so that results
do not depend on the worker count.
"""
import itertools
import logging
from multiprocessing import Pool
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import primerange

from src.additive import additive_rule_table, pi_brute, ub
from src.engine import (
    batch_extremal_periods,
    pair_indices,
    spatial_period,
    spatial_period_array,
)
from src.errors import BudgetExceeded
from src.models import AdditiveRule, Orientation, RingConfig, TableRow
from src.numtheory import aperiodic_count
from src.storage import CheckpointStore
from src.utils import check_budget, default_budget, default_checkpoint_every

logger = logging.getLogger(__name__)

# nodes held by one doubling batch
BATCH_NODES = 2 ** 21

EXTREMAL_HEADER = ["sigma", "maxX", "N_X", "maxY", "N_Y", "T"]
ADDITIVE_HEADER = ["n", "rho_2", "pi_2", "rho_3", "pi_3"]
PI_UB_HEADER = ["sigma", "p", "m", "pi", "ub"]

PI_UB_CASES: List[Tuple[int, int, int]] = [
    (2, 2, 2),
    (4, 2, 2), (4, 2, 3),
    (7, 3, 1),
    (8, 2, 2), (8, 2, 3), (8, 2, 4),
    (11, 2, 1),
    (13, 2, 1),
    (14, 3, 1),
    (16, 2, 2), (16, 2, 3), (16, 2, 4), (16, 2, 5),
    (21, 3, 1),
    (22, 2, 1),
    (26, 2, 1),
    (32, 2, 2), (32, 2, 3), (32, 2, 4), (32, 2, 5), (32, 2, 6),
    (42, 3, 1),
    (44, 2, 1),
]


# --------------------------------------------------------------------------- MCL

def _mcl_dfs(table: List[int], n: int, seed: Tuple[int, ...], word: Tuple[int, ...],
             visited: set, target: int, assigned: int) -> int:
    sigma = len(word)
    pairs = [word[x - 1] * n + word[x] for x in range(sigma)]
    open_pairs = list(dict.fromkeys(p for p in pairs if table[p] < 0))
    total = 0
    for values in itertools.product(range(n), repeat=len(open_pairs)):
        for p, v in zip(open_pairs, values):
            table[p] = v
        nxt = tuple(table[p] for p in pairs)
        if nxt == seed:
            if len(visited) == target:
                total += n ** (n * n - assigned - len(open_pairs))
        elif nxt not in visited and spatial_period(RingConfig(sigma, nxt)) == sigma:
            visited.add(nxt)
            total += _mcl_dfs(table, n, seed, nxt, visited, target, assigned + len(open_pairs))
            visited.remove(nxt)
    for p in open_pairs:
        table[p] = -1
    return total


def mcl_count(sigma: int, n: int, budget: Optional[int] = None, long_run: bool = False) -> Tuple[int, int]:
    """
    (number of rules with X = T(sigma, n), n^(n^2)). Such a cycle passes through
    every aperiodic word, so the search follows the orbit of 0...01 and assigns
    table entries only as the orbit first reads them.
    """
    total_rules = n ** (n * n)
    check_budget(total_rules, budget if budget is not None else default_budget(long_run), "MCL rule enumeration")
    if sigma == 1:
        seed = (1,)
    else:
        seed = (0,) * (sigma - 1) + (1,)
    target = aperiodic_count(sigma, n)
    count = _mcl_dfs([-1] * (n * n), n, seed, seed, {seed}, target, 0)
    logger.info("MCL sigma=%d n=%d: %d of %d rules", sigma, n, count, total_rules)
    return count, total_rules


def rule_tables(start: int, stop: int, n: int) -> np.ndarray:
    """Tables of rules start..stop-1 as a (stop - start, n^2) array."""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.size, n * n), dtype=np.int64)
    for j in range(n * n - 1, -1, -1):
        idx, digits[:, j] = np.divmod(idx, n)
    return digits


def mcl_count_brute(sigma: int, n: int, budget: Optional[int] = None) -> Tuple[int, int]:
    total_rules = n ** (n * n)
    check_budget(total_rules * n ** sigma, budget if budget is not None else default_budget(), "MCL brute force")
    target = aperiodic_count(sigma, n)
    pairs = pair_indices(n, sigma, Orientation.LEFT)
    periods = spatial_period_array(n, sigma)
    step = _chunk_size(n, sigma)
    count = 0
    for start in range(0, total_rules, step):
        x, _, defined = batch_extremal_periods(rule_tables(start, min(start + step, total_rules), n),
                                               n, sigma, pairs=pairs, periods=periods)
        count += int((defined & (x == target)).sum())
    return count, total_rules


# --------------------------------------------------------------------------- exhaustive extremal scans

def _chunk_size(n: int, sigma: int) -> int:
    return max(1, BATCH_NODES // n ** sigma)


def _empty_tally() -> Dict[str, int]:
    return {"maxX": 0, "N_X": 0, "maxY": 0, "N_Y": 0}


def _merge(tally: Dict[str, int], part: Dict[str, int]) -> Dict[str, int]:
    for value, count in (("maxX", "N_X"), ("maxY", "N_Y")):
        if part[value] > tally[value]:
            tally[value], tally[count] = part[value], part[count]
        elif part[value] == tally[value]:
            tally[count] += part[count]
    return tally


def _scan_chunk(args: Tuple[int, int, int, int]) -> Dict[str, int]:
    start, stop, n, sigma = args
    x, y, defined = batch_extremal_periods(rule_tables(start, stop, n), n, sigma)
    part = _empty_tally()
    if defined.any():
        xs, ys = x[defined], y[defined]
        part["maxX"] = int(xs.max())
        part["N_X"] = int((xs == part["maxX"]).sum())
        part["maxY"] = int(ys.max())
        part["N_Y"] = int((ys == part["maxY"]).sum())
    return part


def extremal_row(n: int, sigma: int, threads: int = 1, budget: Optional[int] = None,
                 checkpoints: Optional[CheckpointStore] = None,
                 checkpoint_every: Optional[int] = None) -> TableRow:
    """max X, N_X, max Y, N_Y and T(sigma, n) over all n^(n^2) rules."""
    total_rules = n ** (n * n)
    check_budget(total_rules * n ** sigma, budget if budget is not None else default_budget(), f"sigma={sigma} scan")
    every = checkpoint_every or default_checkpoint_every()
    key = f"extremal-n{n}-sigma{sigma}"

    tally, start = _empty_tally(), 0
    if checkpoints is not None:
        state = checkpoints.load(key)
        if state is not None:
            tally, start = state["tally"], state["next"]

    step = min(_chunk_size(n, sigma), every)
    jobs = [(lo, min(lo + step, total_rules), n, sigma) for lo in range(start, total_rules, step)]
    logger.info("scanning %d rules for n=%d sigma=%d in %d chunks", total_rules - start, n, sigma, len(jobs))

    def consume(parts: Iterable[Dict[str, int]]) -> None:
        nonlocal tally
        since = 0
        for job, part in zip(jobs, parts):
            tally = _merge(tally, part)
            since += job[1] - job[0]
            if checkpoints is not None and since >= every:
                checkpoints.save(key, {"tally": tally, "next": job[1]})
                since = 0

    if threads > 1:
        with Pool(threads) as pool:
            consume(pool.imap(_scan_chunk, jobs))
    else:
        consume(_scan_chunk(job) for job in jobs)

    if checkpoints is not None:
        checkpoints.clear(key)
    values = dict(tally)
    values["T"] = aperiodic_count(sigma, n)
    return TableRow(parameters={"sigma": sigma}, values=values)


def extremal_table(n: int, sigmas: Sequence[int], threads: int = 1, budget: Optional[int] = None,
                   checkpoints: Optional[CheckpointStore] = None,
                   checkpoint_every: Optional[int] = None) -> List[TableRow]:
    rows = []
    for sigma in sigmas:
        try:
            rows.append(extremal_row(n, sigma, threads=threads, budget=budget,
                                     checkpoints=checkpoints, checkpoint_every=checkpoint_every))
        except BudgetExceeded as e:
            logger.warning("skipping sigma=%d: %s", sigma, e)
            rows.append(TableRow(parameters={"sigma": sigma}, provenance="skipped-budget", reason=str(e)))
    return rows


# --------------------------------------------------------------------------- additive extremes

def additive_rho(sigma: int, n: int) -> Optional[int]:
    """max over additive rules of Y; None when no additive rule has an exact-sigma cycle."""
    tables = np.asarray([additive_rule_table(AdditiveRule(n, sigma, a, b)).table
                         for a in range(n) for b in range(n)], dtype=np.int64)
    pairs = pair_indices(n, sigma, Orientation.LEFT)
    periods = spatial_period_array(n, sigma)
    step = _chunk_size(n, sigma)
    best = None
    for lo in range(0, len(tables), step):
        _, y, defined = batch_extremal_periods(tables[lo:lo + step], n, sigma, pairs=pairs, periods=periods)
        if defined.any():
            top = int(y[defined].max())
            best = top if best is None else max(best, top)
    return best


def additive_extremal_table(sigma: int, n_range: Iterable[int], threads: int = 1) -> List[TableRow]:
    rows = []
    for n in n_range:
        rows.append(TableRow(
            parameters={"sigma": sigma, "n": n},
            values={"rho": additive_rho(sigma, n), "pi": pi_brute(sigma, n, threads)[0]},
        ))
    return rows


def additive_rows(n_range: Iterable[int], threads: int = 1) -> List[TableRow]:
    """Side-by-side sigma = 2 and sigma = 3 columns."""
    n_range = list(n_range)
    two = additive_extremal_table(2, n_range, threads)
    three = additive_extremal_table(3, n_range, threads)
    return [
        TableRow(parameters={"n": n}, values={
            "rho_2": r2.values["rho"], "pi_2": r2.values["pi"],
            "rho_3": r3.values["rho"], "pi_3": r3.values["pi"],
        })
        for n, r2, r3 in zip(n_range, two, three)
    ]


# --------------------------------------------------------------------------- pi versus ub

def pi_ub_cases() -> List[Tuple[int, int, int]]:
    return list(PI_UB_CASES)


def prime_power_cases(sigma_range: Iterable[int], max_modulus: int) -> List[Tuple[int, int, int]]:
    cases = []
    for sigma in sigma_range:
        for p in primerange(2, max_modulus + 1):
            m = 1
            while p ** m <= max_modulus:
                cases.append((sigma, p, m))
                m += 1
    return cases


def pi_ub_rows(cases: Iterable[Tuple[int, int, int]], threads: int = 1) -> List[TableRow]:
    """Rows for every listed (sigma, p, m) with pi_sigma(p^m) < ub_sigma(p^m)."""
    rows = []
    for sigma, p, m in cases:
        pi = pi_brute(sigma, p ** m, threads)[0]
        bound = ub(sigma, p, m)
        if pi > bound:
            raise AssertionError(f"pi_{sigma}({p}^{m}) = {pi} exceeds ub = {bound}")
        if pi < bound:
            rows.append(TableRow(parameters={"sigma": sigma, "p": p, "m": m}, values={"pi": pi, "ub": bound}))
    return rows


def pi_ub_scan(sigma_range: Iterable[int], prime_power_budget: int, threads: int = 1) -> List[TableRow]:
    """pi against ub for every sigma in sigma_range and every prime power p^m <= prime_power_budget."""
    return pi_ub_rows(prime_power_cases(sigma_range, prime_power_budget), threads)


# --------------------------------------------------------------------------- powers of two

def powers_of_two_check(k: int, threads: int = 1) -> List[TableRow]:
    """pi_{2^k}(2^m) for m = 1 .. k+2 next to the expected 2^k (m <= k+1) and 2^(k+1) (m = k+2)."""
    sigma = 2 ** k
    rows = []
    for m in range(1, k + 3):
        expected = sigma if m <= k + 1 else 2 * sigma
        rows.append(TableRow(parameters={"sigma": sigma, "m": m},
                             values={"pi": pi_brute(sigma, 2 ** m, threads)[0], "expected": expected}))
    return rows
