"""Noisy periodic diagnostic-test signals.

At each integer round every vertex is tested independently with probability
``p``; a test reports the vertex's true status with probability ``1 - eps``
and the opposite status otherwise.  Signals take values in ``{-1, 0, +1}``
(0 = untested).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseParams:
    """Testing probability ``p`` and per-test error probability ``eps``.

    ``eps`` may be 0 (perfect tests); values >= 1/2 are rejected because the
    estimator's decision threshold is undefined there.
    """
    p: float
    eps: float

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("p must be in (0, 1]")
        if not 0 <= self.eps < 0.5:
            raise ValueError("eps must be in [0, 1/2)")


@dataclass(frozen=True)
class ObservationRound:
    """All signals collected at one integer round ``t``.

    ``signals`` is an int8 array over all vertices with values in -1/0/+1.
    """
    t: int
    signals: np.ndarray

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("round index must be nonnegative")
        vals = np.unique(self.signals)
        if not np.all(np.isin(vals, (-1, 0, 1))):
            raise ValueError("signals must take values in {-1, 0, +1}")


def signal_pmf(affected: bool, params: NoiseParams) -> tuple[float, float, float]:
    """Probabilities of observing (0, -1, +1) for one vertex in one round.

    The final entry closes the tuple to exactly 1.0 under left-to-right
    floating-point summation.
    """
    p, eps = params.p, params.eps
    p_zero = 1.0 - p
    p_minus = p * eps if affected else p * (1.0 - eps)
    p_plus = 1.0 - (p_zero + p_minus)
    return (p_zero, p_minus, p_plus)


def sample_round(affected: np.ndarray, vertex_count: int, t: int,
                 params: NoiseParams, rng: np.random.Generator,
                 restrict_to: np.ndarray | None = None) -> ObservationRound:
    """Sample one round of signals.

    ``affected`` is the sorted vertex-id snapshot of the cascade at time t.
    Every vertex is sampled independently; the result is a deterministic
    function of the stream state.  When ``restrict_to`` is given, only those
    vertices are tested (an optimization for callers that never read the
    rest); this consumes fewer draws, so replays must use the same mode.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    affected_mask = np.zeros(vertex_count, dtype=bool)
    affected_mask[np.asarray(affected, dtype=np.int64)] = True

    if restrict_to is None:
        tested = rng.random(vertex_count) < params.p
        wrong = rng.random(vertex_count) < params.eps
        truth = np.where(affected_mask, 1, -1).astype(np.int8)
        signals = np.where(tested, np.where(wrong, -truth, truth), 0).astype(np.int8)
    else:
        idx = np.asarray(restrict_to, dtype=np.int64)
        tested = rng.random(len(idx)) < params.p
        wrong = rng.random(len(idx)) < params.eps
        truth = np.where(affected_mask[idx], 1, -1).astype(np.int8)
        signals = np.zeros(vertex_count, dtype=np.int8)
        signals[idx] = np.where(tested, np.where(wrong, -truth, truth), 0)
    return ObservationRound(int(t), signals)


def save_rounds(rounds, path) -> None:
    """Write one ``t vertex signal`` line per (round, vertex)."""
    with open(path, "w", encoding="ascii") as fh:
        for rnd in rounds:
            for v, s in enumerate(rnd.signals.tolist()):
                fh.write(f"{rnd.t} {v} {s}\n")


def load_rounds(path, vertex_count: int) -> list[ObservationRound]:
    """Read rounds saved by :func:`save_rounds`, ordered by round index."""
    by_t: dict[int, np.ndarray] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            t, v, s = line.split()
            arr = by_t.setdefault(int(t), np.zeros(vertex_count, dtype=np.int8))
            arr[int(v)] = int(s)
    return [ObservationRound(t, by_t[t]) for t in sorted(by_t)]
