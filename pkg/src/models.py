from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union


class RingTag(str, Enum):
    INTEGERS = "integers"
    GAUSSIAN = "gaussian"
    EISENSTEIN = "eisenstein"


class Orientation(str, Enum):
    """Left: x_{t+1}(i) = f(x_t(i-1), x_t(i)). Right: f(x_t(i), x_t(i+1))."""
    LEFT = "left"
    RIGHT = "right"

    def flipped(self) -> "Orientation":
        return Orientation.RIGHT if self is Orientation.LEFT else Orientation.LEFT


# --------------------------------------------------------------------------- numtheory

@dataclass(frozen=True)
class Factorization:
    """Prime factorization as (prime, multiplicity) pairs, primes strictly increasing."""
    factors: Tuple[Tuple[int, int], ...] = ()

    @property
    def value(self) -> int:
        out = 1
        for p, m in self.factors:
            out *= p ** m
        return out

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def prime_powers(self) -> List[int]:
        return [p ** m for p, m in self.factors]


# --------------------------------------------------------------------------- modular algebra

@dataclass(frozen=True)
class KummerElement:
    """a + b*zeta in Z_n[zeta], zeta = 1 (integers), i (gaussian) or omega (eisenstein)."""
    ring: RingTag
    modulus: int
    a: int
    b: int = 0

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not (0 <= self.a < self.modulus and 0 <= self.b < self.modulus):
            raise ValueError(f"residues ({self.a}, {self.b}) out of range for modulus {self.modulus}")
        if self.ring is RingTag.INTEGERS and self.b != 0:
            raise ValueError("integer residues carry b = 0")

    @classmethod
    def of(cls, ring: RingTag, modulus: int, a: int, b: int = 0) -> "KummerElement":
        """Build an element, reducing a and b modulo n."""
        if ring is RingTag.INTEGERS:
            b = 0
        return cls(ring, modulus, a % modulus, b % modulus)


@dataclass(frozen=True)
class GroupExponentResult:
    value: int
    witness: KummerElement


# --------------------------------------------------------------------------- additive rules

@dataclass(frozen=True)
class QuotientPoly:
    """Element of Z_n[x]/(x^sigma - 1); coeffs[j] is the coefficient of x^j."""
    modulus: int
    sigma: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.sigma:
            raise ValueError(f"expected {self.sigma} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < self.modulus for c in self.coeffs):
            raise ValueError(f"coefficients must lie in [0, {self.modulus})")

    @classmethod
    def one(cls, modulus: int, sigma: int) -> "QuotientPoly":
        return cls(modulus, sigma, (1 % modulus,) + (0,) * (sigma - 1))

    @classmethod
    def monomial(cls, modulus: int, sigma: int, degree: int, coeff: int = 1) -> "QuotientPoly":
        coeffs = [0] * sigma
        coeffs[degree % sigma] = coeff % modulus
        return cls(modulus, sigma, tuple(coeffs))


@dataclass(frozen=True)
class AdditiveRule:
    """f(c0, c1) = b*c0 + a*c1 mod n, i.e. multiplication by T(x) = a + b*x."""
    n: int
    sigma: int
    a: int
    b: int

    def __post_init__(self):
        if not (0 <= self.a < self.n and 0 <= self.b < self.n):
            raise ValueError(f"(a, b) = ({self.a}, {self.b}) out of range for n = {self.n}")


@dataclass(frozen=True)
class EventualPeriod:
    """Orbit x_0, x_1, ... with x_{preperiod} == x_{preperiod + period}, both minimal."""
    period: int
    preperiod: int


# --------------------------------------------------------------------------- ca engine

@dataclass(frozen=True)
class RuleTable:
    """Explicit two-neighbour rule; table[c0 * n + c1] = f(c0, c1)."""
    n: int
    orientation: Orientation
    table: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"rule needs n >= 2, got {self.n}")
        if len(self.table) != self.n * self.n:
            raise ValueError(f"table length {len(self.table)} != n^2 = {self.n * self.n}")
        if min(self.table) < 0 or max(self.table) >= self.n:
            raise ValueError(f"table entries must lie in [0, {self.n})")

    def __call__(self, c0: int, c1: int) -> int:
        return self.table[c0 * self.n + c1]


@dataclass(frozen=True)
class RingConfig:
    """Word of sigma states on a periodic ring."""
    sigma: int
    word: Tuple[int, ...]

    def __post_init__(self):
        if len(self.word) != self.sigma:
            raise ValueError(f"word length {len(self.word)} != sigma = {self.sigma}")

    @classmethod
    def from_word(cls, word) -> "RingConfig":
        if isinstance(word, str):
            word = [int(ch) for ch in word]
        word = tuple(word)
        return cls(len(word), word)

    def __str__(self) -> str:
        return "".join(str(c) for c in self.word) if all(c < 10 for c in self.word) else " ".join(map(str, self.word))


@dataclass(frozen=True)
class CycleRecord:
    """`count` cycles sharing (length, spatial_period); representative is the smallest-index node among them."""
    length: int
    spatial_period: int
    representative: RingConfig
    count: int


@dataclass
class CycleCensus:
    n: int
    sigma: int
    cycles: List[CycleRecord] = field(default_factory=list)
    transient: int = 0

    @property
    def cyclic_nodes(self) -> int:
        return sum(c.length * c.count for c in self.cycles)

    @property
    def total(self) -> int:
        return self.cyclic_nodes + self.transient


@dataclass(frozen=True)
class ExtremalPeriods:
    """Largest / smallest temporal period over cycles of exact spatial period sigma; both None when there are none."""
    X: Optional[int] = None
    Y: Optional[int] = None

    def __post_init__(self):
        if (self.X is None) != (self.Y is None):
            raise ValueError("X and Y must be both present or both absent")
        if self.X is not None and self.Y > self.X:
            raise ValueError(f"Y = {self.Y} exceeds X = {self.X}")

    @property
    def defined(self) -> bool:
        return self.X is not None


# --------------------------------------------------------------------------- constructions

T1 = "T1"
T2 = "T2"

EndReaderState = Union[Tuple[int, int], str]
ArrowReaderState = Union[int, str]


@dataclass(frozen=True)
class OdometerCell:
    """(number, particle, asterisk, end) coordinates of an odometer state."""
    digit: int
    arrow: bool = False
    star: bool = False
    end: bool = False

    def __str__(self) -> str:
        return f"{'<' if self.arrow else ''}{'E' if self.end else ''}{self.digit}{'*' if self.star else ''}"


@dataclass(frozen=True)
class AutomataCell:
    """Odometer layer plus END-READER / ARROW-READER states; `first is None` encodes the terminator T."""
    first: Optional[OdometerCell] = None
    end_reader: EndReaderState = (0, 0)
    arrow_reader: ArrowReaderState = 0

    @property
    def is_terminator(self) -> bool:
        return self.first is None

    @property
    def is_terminated(self) -> bool:
        return self.first is None or self.end_reader == T1 or self.arrow_reader == T2


@dataclass(frozen=True)
class PrimePartitionSpec:
    sigma: int
    n: int
    primes: Tuple[int, ...]
    blocks: Tuple[Tuple[int, ...], ...]
    fallback: bool = False

    def __post_init__(self):
        seen = set()
        for p, block in zip(self.primes, self.blocks):
            if len(block) != p:
                raise ValueError(f"block {block} does not have {p} states")
            if 0 in block or seen.intersection(block):
                raise ValueError("blocks must be disjoint and exclude 0")
            seen.update(block)
        if sum(self.primes) > self.n - 1:
            raise ValueError("blocks do not fit in Z_n \\ {0}")

    def block_of(self, state: int) -> Optional[int]:
        for j, block in enumerate(self.blocks):
            if state in block:
                return j
        return None

    def phi(self, j: int, state: int) -> int:
        """Shift-by-one cyclic permutation of the sorted block P_j."""
        block = self.blocks[j]
        return block[(block.index(state) + 1) % len(block)]


# --------------------------------------------------------------------------- search / verify

@dataclass
class TableRow:
    parameters: Dict[str, int]
    values: Dict[str, Optional[int]] = field(default_factory=dict)
    provenance: str = "computed"
    reason: Optional[str] = None

    @property
    def computed(self) -> bool:
        return self.provenance == "computed"


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
