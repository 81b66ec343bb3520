"""Two-colorings of the n-cube vertices.

A dichotomy splits the 2^n vertices into a positive set ``W`` and its
complement.  The positive set is stored as a bitmask: vertex ``v`` is
the integer whose bit ``i`` is observation ``i``'s value, and bit ``v``
of ``mask`` says whether ``v`` lies in ``W``.  Text form: ``n=2;mask=0x6``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

_TEXT_RE = re.compile(r"^n=(\d+);mask=0x([0-9a-fA-F]+)$")


@dataclass(frozen=True)
class Dichotomy:
    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not 0 <= self.mask < 1 << (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} out of range for n={self.n}")

    @property
    def vertex_count(self) -> int:
        return 1 << self.n

    def contains(self, vertex: int) -> bool:
        return bool((self.mask >> vertex) & 1)

    def complement(self) -> "Dichotomy":
        full = (1 << self.vertex_count) - 1
        return Dichotomy(self.n, self.mask ^ full)

    def positive_vertices(self) -> list[int]:
        return [v for v in range(self.vertex_count) if self.contains(v)]

    def signs(self) -> np.ndarray:
        """+1 on the positive side, -1 elsewhere, indexed by vertex."""
        bits = (self.mask >> np.arange(self.vertex_count)) & 1
        return np.where(bits == 1, 1.0, -1.0)

    def to_string(self) -> str:
        return f"n={self.n};mask={self.mask:#x}"

    @classmethod
    def from_string(cls, text: str) -> "Dichotomy":
        match = _TEXT_RE.match(text.strip())
        if match is None:
            raise ValueError(f"cannot parse dichotomy {text!r} (want n=<dim>;mask=0x<hex>)")
        return cls(n=int(match.group(1)), mask=int(match.group(2), 16))

    @classmethod
    def from_positive_set(cls, n: int, vertices) -> "Dichotomy":
        mask = 0
        for v in vertices:
            if not 0 <= v < 1 << n:
                raise ValueError(f"vertex {v} out of range for n={n}")
            mask |= 1 << int(v)
        return cls(n=n, mask=mask)


def cube_vertices(n: int) -> np.ndarray:
    """All 2^n vertices as 0/1 rows, row ``v`` = binary digits of ``v``."""
    idx = np.arange(1 << n)
    return ((idx[:, np.newaxis] >> np.arange(n)) & 1).astype(np.float64)
