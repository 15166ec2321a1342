"""Value types shared by the decomposition algorithms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PartitionMismatch

BT = "BT"
BD = "BD"


@dataclass(frozen=True)
class BlockPartition:
    """Ordered diagonal block sizes plus the kind of zero pattern."""

    sizes: tuple
    kind: str = BT

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(k) for k in self.sizes))
        if self.kind not in (BT, BD):
            raise ValueError(f"kind must be 'BT' or 'BD', got {self.kind!r}")
        if not self.sizes or any(k < 1 for k in self.sizes):
            raise PartitionMismatch(f"block sizes must be positive, got {self.sizes}")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> list:
        return list(np.cumsum((0,) + self.sizes))

    def __len__(self):
        return len(self.sizes)

    def __str__(self):
        return f"{self.kind}({','.join(map(str, self.sizes))})"


@dataclass
class Transform:
    """Similarity ``S`` with cached inverse; the transformed set is
    ``S^{-1} A S``.  For the unitary algorithms ``S = U*``."""

    s: np.ndarray
    s_inv: Optional[np.ndarray] = None
    unitary: bool = False

    def __post_init__(self):
        self.s = np.asarray(self.s)
        if self.s_inv is None:
            self.s_inv = self.s.conj().T if self.unitary else np.linalg.inv(self.s)
        self.s_inv = np.asarray(self.s_inv)

    def apply(self, a) -> np.ndarray:
        return self.s_inv @ a @ self.s

    @property
    def u(self) -> np.ndarray:
        """The unitary U with U A U* equal to the transformed matrices."""
        return self.s_inv


@dataclass
class DecompositionReport:
    algorithm: str
    transform: Transform
    partition: BlockPartition
    transformed: list
    residuals: dict
    names: list
    provenance: dict = field(default_factory=dict)

    @property
    def sizes(self) -> tuple:
        return self.partition.sizes

    def blocks(self, index: int) -> list:
        """Diagonal blocks of the ``index``-th transformed matrix."""
        off = self.partition.offsets
        m = self.transformed[index]
        return [m[off[i]:off[i + 1], off[i]:off[i + 1]] for i in range(len(self.partition))]
