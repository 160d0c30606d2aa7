"""Counter-based random substreams.

Every Monte Carlo sample owns a private Philox stream addressed by
``(master_seed, purpose, stream_index)``.  The key holds the master seed and a
purpose tag, the stream index sits in the upper half of the 256-bit counter,
so distinct addresses never overlap (each stream has 2**128 blocks to itself)
and a sample's draws do not depend on which worker produced it or when.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import require

_U64 = 2**64

# Purpose tags keep independent consumers of one seed apart.
PURPOSE_PROCESS = 0
PURPOSE_HAAR = 1


@dataclass(frozen=True)
class SeedSpec:
    """Address of one substream: a 64-bit master seed plus a sample counter."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        require(isinstance(self.master_seed, (int, np.integer)), "master_seed must be an integer")
        require(isinstance(self.stream_index, (int, np.integer)), "stream_index must be an integer")
        require(0 <= self.master_seed < _U64, "master_seed must fit in 64 unsigned bits")
        require(0 <= self.stream_index < _U64, "stream_index must fit in 64 unsigned bits")

    def offset(self, k: int) -> "SeedSpec":
        """Substream ``k`` places further along the same master seed."""
        return SeedSpec(self.master_seed, self.stream_index + k)

    def generator(self, purpose: int = PURPOSE_PROCESS) -> np.random.Generator:
        return substream(self.master_seed, self.stream_index, purpose)


def substream(master_seed: int, stream_index: int, purpose: int = PURPOSE_PROCESS) -> np.random.Generator:
    bitgen = np.random.Philox(
        key=np.array([int(master_seed), int(purpose)], dtype=np.uint64),
        counter=np.array([0, 0, int(stream_index), 0], dtype=np.uint64),
    )
    return np.random.Generator(bitgen)
