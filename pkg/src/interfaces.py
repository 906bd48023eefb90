from abc import ABC, abstractmethod
from typing import List, Tuple

import numpy as np

from src.models import RingTag


class KummerRing(ABC):
    """Z_n, Z_n[i] or Z_n[omega]: residues a + b*zeta with arithmetic mod n."""
    tag: RingTag

    def __init__(self, modulus: int):
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        self.modulus = modulus

    @abstractmethod
    def norm(self, a, b):
        """Norm form; works elementwise on numpy arrays."""
        pass

    @abstractmethod
    def mul_pairs(self, a1, b1, a2, b2) -> Tuple:
        """Unreduced product of (a1 + b1 zeta)(a2 + b2 zeta); works on numpy arrays."""
        pass

    @abstractmethod
    def prime_unit_count(self, p: int) -> int:
        """|Z_p[zeta]^x|."""
        pass

    @abstractmethod
    def lambda_prime_power(self, p: int, m: int) -> int:
        """Closed-form exponent of the unit group modulo p^m."""
        pass

    @abstractmethod
    def prime_structure(self, p: int) -> List[int]:
        """Orders of the cyclic factors of Z_p[zeta]^x."""
        pass

    @abstractmethod
    def elements(self) -> Tuple[np.ndarray, np.ndarray]:
        """All ring elements as (a, b) arrays in lexicographic order."""
        pass


class CycleFinder(ABC):
    @abstractmethod
    def cycle_labels(self, successors: np.ndarray) -> np.ndarray:
        """
        For a functional graph given as a successor array, return for every node
        the smallest index on its cycle, or -1 for transient nodes.
        """
        pass
