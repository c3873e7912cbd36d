"""Deterministic seed derivation and random stream construction.

Every stochastic component draws from its own counter-based stream so that
runs are reproducible bit-for-bit and trials can be dispatched to workers in
any order.  Sub-seeds are derived from a master seed with SHA-256 (a fixed,
platform-independent hash), never from global RNG state.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *parts) -> int:
    """64-bit sub-seed for the stream identified by ``parts``.

    The derivation is ``SHA-256("master:part1:part2:...")`` truncated to
    8 bytes, so it is stable across platforms and library versions.
    """
    text = ":".join(str(p) for p in (master, *parts))
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for the given seed (Philox)."""
    return np.random.Generator(np.random.Philox(key=int(seed)))
