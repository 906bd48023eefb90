"""
Explicit long-period rules: the odometer, the odometer with END-READER and
ARROW-READER automata, the prime partition rule, and the two small
constructions for spatial periods 1 and 2. Generated tables are right-sided
except where noted; engine.mirror gives the left-sided form.
"""
import itertools
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

from sympy import primerange

from src.errors import InfeasibleParameters
from src.models import (
    T1,
    T2,
    ArrowReaderState,
    AutomataCell,
    EndReaderState,
    OdometerCell,
    Orientation,
    PrimePartitionSpec,
    RingConfig,
    RuleTable,
)

logger = logging.getLogger(__name__)

OdometerUpdate = Callable[[OdometerCell, OdometerCell], OdometerCell]


def automata_factor(sigma: int) -> int:
    """S(sigma) = 16 sigma (sigma + 2): non-terminator states per odometer digit."""
    return 16 * sigma * (sigma + 2)


# --------------------------------------------------------------------------- odometer

class OdometerEncoding:
    """Cell (digit, arrow, star, end) <-> digit + k * (arrow + 2 star + 4 end)."""

    def __init__(self, k: int):
        if k < 2:
            raise InfeasibleParameters(f"odometer needs k >= 2, got {k}")
        self.k = k
        self.size = 8 * k

    def encode(self, cell: OdometerCell) -> int:
        return cell.digit + self.k * (int(cell.arrow) + 2 * int(cell.star) + 4 * int(cell.end))

    def decode(self, idx: int) -> OdometerCell:
        flags, digit = divmod(idx, self.k)
        return OdometerCell(digit=digit, arrow=bool(flags & 1), star=bool(flags & 2), end=bool(flags & 4))

    def states(self) -> List[OdometerCell]:
        return [self.decode(i) for i in range(self.size)]


def _plain(c: OdometerCell) -> bool:
    return not (c.arrow or c.star or c.end)


def _bare_end(c: OdometerCell) -> bool:
    return c.end and not c.arrow and not c.star


def _odometer_assignments(k: int) -> List[Tuple[int, Callable, Callable]]:
    top = k - 1
    return [
        (1, lambda s, r: _plain(s) and r.arrow and r.star and not r.end and r.digit < top,
         lambda s, r: OdometerCell(s.digit, arrow=True)),
        (2, lambda s, r: _plain(s) and r.arrow and not r.star and not r.end,
         lambda s, r: OdometerCell(s.digit, arrow=True)),
        (3, lambda s, r: _plain(s) and r.arrow and r.star and not r.end and r.digit == top,
         lambda s, r: OdometerCell(s.digit, arrow=True, star=True)),
        (4, lambda s, r: s.arrow and s.star and not s.end,
         lambda s, r: OdometerCell((s.digit + 1) % k)),
        (5, lambda s, r: s.arrow and not s.star and not s.end,
         lambda s, r: OdometerCell(s.digit)),
        (6, lambda s, r: _plain(s) and r.arrow and not r.star and r.end and r.digit == top,
         lambda s, r: OdometerCell(s.digit, arrow=True, star=True)),
        (7, lambda s, r: s.arrow and not s.star and s.end and s.digit < top,
         lambda s, r: OdometerCell(s.digit + 1, arrow=True, end=True)),
        (8, lambda s, r: s.arrow and not s.star and s.end and s.digit == top,
         lambda s, r: OdometerCell(0, end=True)),
        (9, lambda s, r: _bare_end(s) and r.arrow and r.star and not r.end,
         lambda s, r: OdometerCell(0, arrow=True, end=True)),
        (10, lambda s, r: _bare_end(s) and r.arrow and not r.star and not r.end,
         lambda s, r: OdometerCell(0, arrow=True, end=True)),
        (11, lambda s, r: _plain(s) and _plain(r), lambda s, r: s),
        (12, lambda s, r: _bare_end(s) and _plain(r), lambda s, r: s),
        (13, lambda s, r: _plain(s) and _bare_end(r), lambda s, r: s),
        (14, lambda s, r: _plain(s) and r.arrow and not r.star and r.end and r.digit < top,
         lambda s, r: s),
    ]


def matching_assignments(k: int, s: OdometerCell, r: OdometerCell) -> List[int]:
    return [num for num, match, _ in _odometer_assignments(k) if match(s, r)]


def odometer_step(k: int, s: OdometerCell, r: OdometerCell) -> OdometerCell:
    """First-layer update of a cell s with right neighbour r; identity when no assignment applies."""
    hits = [(num, out) for num, match, out in _odometer_assignments(k) if match(s, r)]
    if len(hits) > 1:
        raise AssertionError(f"odometer assignments {[h[0] for h in hits]} overlap on ({s}, {r})")
    return hits[0][1](s, r) if hits else s


def _odometer_layer(k: int) -> Dict[Tuple[OdometerCell, OdometerCell], OdometerCell]:
    cells = OdometerEncoding(k).states()
    return {(s, r): odometer_step(k, s, r) for s in cells for r in cells}


def odometer_rule(sigma: int, k: int) -> RuleTable:
    """Right-sided odometer rule on n = 8k states; the table itself is the same for every sigma."""
    if sigma < 2:
        raise InfeasibleParameters(f"odometer needs sigma >= 2, got {sigma}")
    enc = OdometerEncoding(k)
    layer = _odometer_layer(k)
    cells = enc.states()
    table = tuple(enc.encode(layer[(s, r)]) for s in cells for r in cells)
    return RuleTable(n=enc.size, orientation=Orientation.RIGHT, table=table)


def odometer_start(sigma: int, k: int) -> RingConfig:
    """0 ... 0 followed by the arrow-and-end cell holding 0."""
    enc = OdometerEncoding(k)
    word = [enc.encode(OdometerCell(0))] * (sigma - 1) + [enc.encode(OdometerCell(0, arrow=True, end=True))]
    return RingConfig(sigma, tuple(word))


def odometer_period_formula(sigma: int, k: int) -> int:
    """Each of the k^(sigma-1) values of the unmarked digits costs k steps at the end plus sigma-1 carry steps."""
    return k ** (sigma - 1) * (k + sigma - 1)


def odometer_orbit_period(sigma: int, k: int) -> int:
    from src.engine import orbit

    return orbit(odometer_rule(sigma, k), odometer_start(sigma, k)).period


# --------------------------------------------------------------------------- readers

def end_reader_states(sigma: int) -> List[EndReaderState]:
    return [(j, 0) for j in range(sigma)] + [(j, 1) for j in range(1, sigma)] + [T1]


def end_reader_step(sigma: int, state: EndReaderState, end: bool) -> EndReaderState:
    """delta_E: count sites read since the last restart and whether an E was among them."""
    if state == T1:
        return T1
    j, seen = state
    if seen == 0:
        if j < sigma - 1:
            return (j + 1, 1) if end else (j + 1, 0)
        return (0, 0) if end else T1
    if end:
        return T1
    return (j + 1, 1) if j < sigma - 1 else (0, 0)


def arrow_reader_states(sigma: int) -> List[ArrowReaderState]:
    return list(range(sigma + 1)) + [T2]


def arrow_reader_step(sigma: int, state: ArrowReaderState, symbol: Tuple[bool, bool]) -> ArrowReaderState:
    """delta_A on (arrow, end): consecutive arrow-free E reads count up, anything else resets."""
    if state == T2:
        return T2
    arrow, end = symbol
    if not arrow and end:
        return T2 if state == sigma else state + 1
    return 0


# --------------------------------------------------------------------------- odometer with automata

class AutomataEncoding:
    """first + 8k * (end_reader + 2 sigma * arrow_reader); T = 16 sigma (sigma + 2) k; larger indices are leftovers."""

    def __init__(self, sigma: int, k: int, n: Optional[int] = None):
        self.sigma = sigma
        self.k = k
        self.first = OdometerEncoding(k)
        self.end_states = end_reader_states(sigma)
        self.arrow_states = arrow_reader_states(sigma)
        self.terminator = automata_factor(sigma) * k
        self.n = n if n is not None else self.terminator + 1
        if self.n < self.terminator + 1:
            raise InfeasibleParameters(
                f"odometer with automata needs n >= {self.terminator + 1} for sigma={sigma}, k={k}; got {self.n}"
            )
        self._end_index = {s: i for i, s in enumerate(self.end_states)}
        self._arrow_index = {s: i for i, s in enumerate(self.arrow_states)}

    def encode(self, cell: AutomataCell) -> int:
        if cell.is_terminator:
            return self.terminator
        layer = self._end_index[cell.end_reader] + 2 * self.sigma * self._arrow_index[cell.arrow_reader]
        return self.first.encode(cell.first) + self.first.size * layer

    def decode(self, idx: int) -> AutomataCell:
        if idx >= self.terminator:
            return AutomataCell()
        layer, first = divmod(idx, self.first.size)
        arrow, end = divmod(layer, 2 * self.sigma)
        return AutomataCell(self.first.decode(first), self.end_states[end], self.arrow_states[arrow])


def automata_step(sigma: int, k: int, s: AutomataCell, r: AutomataCell,
                  odometer: Optional[OdometerUpdate] = None) -> AutomataCell:
    """Update of cell s with right neighbour r, clauses in precedence order."""
    if s.is_terminated or r.is_terminated:
        return AutomataCell()
    a, b = s.first, r.first
    # a star is legitimate only on the arrow cell away from the end
    if a.star and (not a.arrow or a.end):
        return AutomataCell()
    if a.arrow and b.arrow:
        return AutomataCell()
    first = odometer(a, b) if odometer is not None else odometer_step(k, a, b)
    return AutomataCell(
        first=first,
        end_reader=end_reader_step(sigma, r.end_reader, b.end),
        arrow_reader=arrow_reader_step(sigma, s.arrow_reader, (a.arrow, a.end)),
    )


def odometer_automata_rule(sigma: int, k: int, n: Optional[int] = None) -> RuleTable:
    """Right-sided rule on n >= 16 sigma (sigma + 2) k + 1 states whose only exact-sigma cycles are odometer cycles."""
    if sigma < 2:
        raise InfeasibleParameters(f"odometer with automata needs sigma >= 2, got {sigma}")
    if k <= sigma:
        raise InfeasibleParameters(f"odometer with automata needs k > sigma, got k={k}, sigma={sigma}")
    enc = AutomataEncoding(sigma, k, n)
    layer = _odometer_layer(k)

    def lookup(a: OdometerCell, b: OdometerCell) -> OdometerCell:
        return layer[(a, b)]

    cells = [enc.decode(i) for i in range(enc.n)]
    table = tuple(enc.encode(automata_step(sigma, k, s, r, lookup)) for s in cells for r in cells)
    logger.info("built odometer-with-automata rule: sigma=%d k=%d n=%d", sigma, k, enc.n)
    return RuleTable(n=enc.n, orientation=Orientation.RIGHT, table=table)


def automata_start(sigma: int, k: int, n: Optional[int] = None) -> RingConfig:
    """Odometer start on the first layer, END-READERs at (0, 0), ARROW-READERs at 0."""
    enc = AutomataEncoding(sigma, k, n)
    first = odometer_start(sigma, k)
    word = tuple(enc.encode(AutomataCell(enc.first.decode(c), (0, 0), 0)) for c in first.word)
    return RingConfig(sigma, word)


def is_legitimate(c: RingConfig, k: int, automata: bool = False, n: Optional[int] = None) -> bool:
    """Exactly one arrow, exactly one E, and every star sits on the arrow cell away from the E."""
    if automata:
        enc = AutomataEncoding(c.sigma, k, n)
        decoded = [enc.decode(s) for s in c.word]
        if any(cell.is_terminator for cell in decoded):
            return False
        cells = [cell.first for cell in decoded]
    else:
        enc = OdometerEncoding(k)
        if any(s >= enc.size for s in c.word):
            return False
        cells = [enc.decode(s) for s in c.word]
    if sum(cell.arrow for cell in cells) != 1 or sum(cell.end for cell in cells) != 1:
        return False
    return all(cell.arrow and not cell.end for cell in cells if cell.star)


# --------------------------------------------------------------------------- prime partition

def _interval_primes(sigma: int, n: int) -> Optional[List[int]]:
    # p in [(n-1)/(2 sigma), (n-1)/sigma]
    low = -(-(n - 1) // (2 * sigma))
    high = (n - 1) // sigma
    candidates = list(primerange(max(low, 2), high + 1))
    if len(candidates) < sigma:
        return None
    return candidates[-sigma:]


def _max_product_primes(sigma: int, n: int) -> Optional[List[int]]:
    """sigma distinct primes with sum <= n - 1 maximising the product (exact knapsack)."""
    budget = n - 1
    # best[count][total] = (product, primes)
    best: List[Dict[int, Tuple[int, Tuple[int, ...]]]] = [dict() for _ in range(sigma + 1)]
    best[0][0] = (1, ())
    for p in primerange(2, budget + 1):
        for count in range(sigma - 1, -1, -1):
            for total, (product, chosen) in list(best[count].items()):
                t = total + p
                if t > budget:
                    continue
                if t not in best[count + 1] or product * p > best[count + 1][t][0]:
                    best[count + 1][t] = (product * p, chosen + (p,))
    if not best[sigma]:
        return None
    _, chosen = max(best[sigma].values())
    return sorted(chosen)


def select_primes(sigma: int, n: int) -> Tuple[List[int], bool]:
    """(primes, fallback_used)."""
    primes = _interval_primes(sigma, n)
    if primes is not None:
        return primes, False
    primes = _max_product_primes(sigma, n)
    if primes is None:
        raise InfeasibleParameters(f"no {sigma} distinct primes sum to at most {n - 1}")
    return primes, True


def prime_partition_rule(sigma: int, n: int) -> Tuple[RuleTable, PrimePartitionSpec]:
    """
    Right-sided rule f(s, s') = phi_j(s) if s in P_j and s' in P_{j+1 mod sigma}, else 0.
    Regular configurations cycle with period prod(p_j); everything else dies to all-zero.
    """
    if sigma < 2:
        raise InfeasibleParameters(f"prime partition needs sigma >= 2, got {sigma}")
    primes, fallback = select_primes(sigma, n)
    blocks = []
    start = 1
    for p in primes:
        blocks.append(tuple(range(start, start + p)))
        start += p
    spec = PrimePartitionSpec(sigma=sigma, n=n, primes=tuple(primes), blocks=tuple(blocks), fallback=fallback)
    logger.info("prime partition sigma=%d n=%d primes=%s (%s)", sigma, n, primes,
                "max-product fallback" if fallback else "interval selection")

    table = [0] * (n * n)
    for j, block in enumerate(blocks):
        nxt = blocks[(j + 1) % sigma]
        for s in block:
            image = spec.phi(j, s)
            for t in nxt:
                table[s * n + t] = image
    return RuleTable(n=n, orientation=Orientation.RIGHT, table=tuple(table)), spec


def is_regular(c: RingConfig, spec: PrimePartitionSpec) -> bool:
    classes = [spec.block_of(s) for s in c.word]
    if any(j is None for j in classes):
        return False
    return all(classes[i] == (classes[0] + i) % spec.sigma for i in range(c.sigma))


# --------------------------------------------------------------------------- small constructions

def diagonal_cycle_rule(n: int) -> RuleTable:
    """sigma = 1: f(a, a) = a + 1 puts all n constant words on one cycle."""
    table = [c1 for c0 in range(n) for c1 in range(n)]
    for a in range(n):
        table[a * n + a] = (a + 1) % n
    return RuleTable(n=n, orientation=Orientation.LEFT, table=tuple(table))


def aperiodic_tour_rule(n: int) -> RuleTable:
    """
    sigma = 2: one cycle through all n^2 - n aperiodic words. The words ab with
    a < b in lexicographic order are followed by their reversals; the left-sided
    table maps word ab to its successor cd via f(b, a) = c and f(a, b) = d.
    """
    forward = list(itertools.combinations(range(n), 2))
    tour = forward + [(b, a) for a, b in forward]
    table = [c1 for c0 in range(n) for c1 in range(n)]
    for (a, b), (c, d) in zip(tour, tour[1:] + tour[:1]):
        table[b * n + a] = c
        table[a * n + b] = d
    return RuleTable(n=n, orientation=Orientation.LEFT, table=tuple(table))


def construction_bound(kind: str, sigma: int, n: int, k: Optional[int] = None) -> int:
    """Guaranteed lower bound on X: k^sigma for the odometer kinds, k defaulting to the most digits n states fit."""
    if kind == "odometer":
        return (k if k is not None else n // 8) ** sigma
    if kind == "odometer-automata":
        return (k if k is not None else (n - 1) // automata_factor(sigma)) ** sigma
    if kind == "prime-partition":
        return math.prod(select_primes(sigma, n)[0])
    raise ValueError(f"unknown construction {kind!r}")


def _describe_odometer(cell: OdometerCell) -> Dict:
    return {"digit": cell.digit, "arrow": cell.arrow, "star": cell.star, "end": cell.end}


def encoding_sidecar(kind: str, sigma: int, k: Optional[int] = None, n: Optional[int] = None,
                     spec: Optional[PrimePartitionSpec] = None) -> Dict:
    """State-index <-> tuple map written next to a constructed rule."""
    if kind == "odometer":
        enc = OdometerEncoding(k)
        states = [{"index": i, "state": _describe_odometer(enc.decode(i))} for i in range(enc.size)]
        return {"kind": kind, "sigma": sigma, "k": k, "n": enc.size, "states": states}
    if kind == "odometer-automata":
        enc = AutomataEncoding(sigma, k, n)
        states = []
        for i in range(enc.n):
            if i < enc.terminator:
                cell = enc.decode(i)
                reader = list(cell.end_reader) if isinstance(cell.end_reader, tuple) else cell.end_reader
                states.append({
                    "index": i,
                    "state": _describe_odometer(cell.first),
                    "end_reader": reader,
                    "arrow_reader": cell.arrow_reader,
                })
            else:
                states.append({"index": i, "state": "T" if i == enc.terminator else "leftover"})
        return {"kind": kind, "sigma": sigma, "k": k, "n": enc.n, "states": states}
    if kind == "prime-partition":
        return {
            "kind": kind,
            "sigma": sigma,
            "n": spec.n,
            "primes": list(spec.primes),
            "blocks": [list(b) for b in spec.blocks],
            "fallback": spec.fallback,
            "terminator": 0,
        }
    raise ValueError(f"unknown construction {kind!r}")
