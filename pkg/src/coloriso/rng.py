"""Seed management.

Every randomized operation takes an explicit integer seed.  Components
derive independent sub-streams from a master seed by counter-splitting
through ``numpy.random.SeedSequence`` spawn keys, so separate stages of a
run (polynomial sampling, orderings, trial batches) never share a stream
and re-running with the same master seed reproduces every draw.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part) & 0xFFFFFFFF


def rng_for(master_seed: int, *path) -> np.random.Generator:
    """Generator for the sub-stream named by ``path`` under ``master_seed``.

    ``path`` entries may be ints or short strings (strings are CRC-folded
    to 32 bits).  Same (seed, path) always yields the same stream.
    """
    key = tuple(_key_part(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def subseed(master_seed: int, *path) -> int:
    """A plain integer seed for the sub-stream named by ``path``."""
    key = tuple(_key_part(p) for p in path)
    return int(np.random.SeedSequence(master_seed, spawn_key=key).generate_state(1)[0])
