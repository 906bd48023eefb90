"""
Pure utility functions with no heavy dependencies.
Environment defaults live here so library code can take explicit parameters
and tests never depend on the process environment.
"""
import os
from typing import List, Sequence

from src.errors import BudgetExceeded, UsageError

DEFAULT_BUDGET = 2 ** 31
DEFAULT_LONG_RUN_BUDGET = 2 ** 40
DEFAULT_CHECKPOINT_EVERY = 2 ** 24

# numpy index spaces are int64
MAX_INDEX_SPACE = 2 ** 62


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip(), 0)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def default_budget(long_run: bool = False) -> int:
    if long_run:
        return _env_int("CA_PERIODS_LONG_RUN_BUDGET", DEFAULT_LONG_RUN_BUDGET)
    return _env_int("CA_PERIODS_BUDGET", DEFAULT_BUDGET)


def default_threads() -> int:
    return _env_int("CA_PERIODS_THREADS", 1)


def default_checkpoint_dir() -> str:
    return os.getenv("CA_PERIODS_CHECKPOINT_DIR", "./checkpoints")


def default_checkpoint_every() -> int:
    return _env_int("CA_PERIODS_CHECKPOINT_EVERY", DEFAULT_CHECKPOINT_EVERY)


def default_cycle_finder() -> str:
    return os.getenv("CA_PERIODS_CYCLE_FINDER", "walk").strip().lower()


def check_budget(needed: int, budget: int, what: str = "computation") -> None:
    """Raise BudgetExceeded when `needed` node visits exceed `budget`."""
    if needed > budget or needed > MAX_INDEX_SPACE:
        raise BudgetExceeded(needed, min(budget, MAX_INDEX_SPACE), what)


def word_to_index(word: Sequence[int], n: int) -> int:
    """Big-endian base-n index: c_0 ... c_{s-1} -> sum c_j n^(s-1-j)."""
    idx = 0
    for c in word:
        if not 0 <= c < n:
            raise ValueError(f"state {c} outside alphabet of size {n}")
        idx = idx * n + c
    return idx


def index_to_word(idx: int, n: int, sigma: int) -> List[int]:
    if not 0 <= idx < n ** sigma:
        raise ValueError(f"index {idx} outside [0, {n}^{sigma})")
    word = [0] * sigma
    for j in range(sigma - 1, -1, -1):
        idx, word[j] = divmod(idx, n)
    return word
