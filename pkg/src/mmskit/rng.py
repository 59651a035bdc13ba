"""Counter-based random stream derivation.

Every random draw in the package comes from a PCG64 generator seeded by
a SeedSequence over an integer tuple, typically (seed, trial) for
rejection samplers and (master_seed, cell, trial) in the experiment
harness.  Streams for distinct tuples are independent and any single
trial can be regenerated without replaying the ones before it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["stream"]


def stream(seed: int | Sequence[int], *extra: int) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        entropy: tuple[int, ...] = (int(seed),)
    else:
        entropy = tuple(int(x) for x in seed)
    entropy = entropy + tuple(int(x) for x in extra)
    if any(x < 0 for x in entropy):
        raise ValueError(f"seed components must be nonnegative, got {entropy}")
    return np.random.default_rng(np.random.SeedSequence(entropy))
