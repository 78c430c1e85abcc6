"""Seeded random streams.

A run seed feeds a numpy ``SeedSequence``; each generation stage draws from
its own child stream (``spawn_key=(stage index,)``), so changing how many
numbers one stage consumes never perturbs the others.
"""

from __future__ import annotations

import numpy as np

STAGES = (
    "ages",
    "marital_men",
    "partnerships",
    "children",
    "schools",
    "workplaces",
    "subcliques",
    "caregivers",
)

_MASK64 = (1 << 64) - 1


class RandomSource:
    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64

    def stream(self, stage: str) -> np.random.Generator:
        key = STAGES.index(stage)
        seq = np.random.SeedSequence(self.seed, spawn_key=(key,))
        return np.random.Generator(np.random.PCG64(seq))

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"


def run_seed(base_seed: int, size: int, repetition: int) -> int:
    """Seed of repetition ``repetition`` at graph size ``size``.

    Depends only on its three arguments, so any single run of an experiment
    can be regenerated on its own.
    """
    seq = np.random.SeedSequence([int(base_seed) & _MASK64, int(size), int(repetition)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def categorical(rng: np.random.Generator, probs, size: int) -> np.ndarray:
    """``size`` independent draws of indices from the probability vector."""
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    cdf[-1] = np.inf
    return np.searchsorted(cdf, rng.random(size), side="right")
