"""Deterministic random-stream derivation.

All randomness in the package flows through Philox, a counter-based bit
generator with a platform-stable algorithm.  Substreams are derived from a
user seed plus an integer path (stream tag, replication index, ...) via
``numpy.random.SeedSequence``, so every replication is reproducible in
isolation and results do not depend on scheduling or batching.
"""
from __future__ import annotations

import numpy as np

# Stream tags keep unrelated consumers of the same user seed independent.
STREAM_JITTER = 1
STREAM_GENERATE = 2
STREAM_CALIBRATE = 3
STREAM_CAMPAIGN = 4
STREAM_BENCH = 5


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return a Generator for the substream identified by (seed, *path)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *path))))


def substream_seed(seed: int, *path: int) -> int:
    """Collapse (seed, *path) into a single reproducible 63-bit seed.

    Used where a plain integer must be reported (e.g. per-replication seeds
    in campaign output) so that a single run can be reproduced on its own.
    """
    state = np.random.SeedSequence((seed, *path)).generate_state(2, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))
