"""Deterministic random streams keyed by (master seed, variant, stimulus index).

Every stimulus gets its own generator derived by hashing, so parallel and
serial dataset builds draw from identical streams regardless of scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, *parts: object) -> int:
    """Collapse a master seed plus arbitrary labels into one 64-bit seed."""
    key = ":".join([str(master_seed & _MASK64)] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class Rng:
    """Seeded PCG64 stream with the handful of sampling helpers we use."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def for_stimulus(cls, master_seed: int, variant_id: str, index: int) -> "Rng":
        return cls(derive_seed(master_seed, variant_id, index))

    def spawn(self, label: str) -> "Rng":
        """Independent child stream; hashing keeps it order-insensitive."""
        return Rng(derive_seed(self.seed, label))

    def uniform(self, lo: float, hi: float) -> float:
        return float(self._gen.uniform(lo, hi))

    def uniform_open_low(self, lo: float, hi: float) -> float:
        """Uniform on (lo, hi]: the low end is excluded, the high end reachable."""
        return hi - (hi - lo) * float(self._gen.random())

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer on [lo, hi], both ends inclusive."""
        return int(self._gen.integers(lo, hi + 1))

    def coin(self) -> bool:
        return bool(self._gen.integers(0, 2))

    def choice(self, seq):
        return seq[int(self._gen.integers(0, len(seq)))]

    def sample_without_replacement(self, seq, k: int) -> list:
        idx = self._gen.permutation(len(seq))[:k]
        return [seq[int(i)] for i in idx]

    def shuffled(self, seq) -> list:
        idx = self._gen.permutation(len(seq))
        return [seq[int(i)] for i in idx]
