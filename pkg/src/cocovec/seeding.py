"""Deterministic RNG streams derived from a base seed plus a stream key.

All randomness in the toolkit flows through `seeded_rng` so that independent
stages (concept-induction iterations, training epochs, per-edition trainings)
get decorrelated but reproducible streams.  String key components are folded
in via crc32, never `hash()`, so streams are stable across processes.
"""

from __future__ import annotations

import zlib

import numpy as np


def _fold(component: int | str) -> int:
    if isinstance(component, str):
        return zlib.crc32(component.encode("utf-8"))
    return int(component)


def seeded_rng(seed: int, *stream: int | str) -> np.random.Generator:
    """PCG64 generator for the sub-stream identified by (seed, *stream)."""
    key = (_fold(seed),) + tuple(_fold(c) for c in stream)
    return np.random.default_rng(np.random.SeedSequence(key))
