"""Sequential source and spread estimation from noisy test signals.

Each candidate vertex accumulates a running score: the sum of all signals
inside its neighborhood of radius ``alpha * t`` at every round t.  The
procedure stops as soon as some candidate's score exceeds the score of every
candidate at hop distance >= ``(alpha + beta) * t`` by a fixed threshold;
that candidate is the source estimate, and the spread estimate is its
neighborhood of radius ``(alpha + 2 beta) * T``.

If the far sets empty out before any candidate wins (possible once the far
radius exceeds the candidate diameter), the run falls back to the
smallest-id candidate and is flagged rather than treated as an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cascade import CascadeTrajectory, affected_at
from .graphs import (EPS, Graph, as_vertex_set, distance_matrix, neighborhood,
                     radius_floor)
from .observation import NoiseParams, ObservationRound, sample_round
from .seeds import make_rng


def threshold(candidate_count: int, eps: float) -> float:
    """Decision threshold ``2 log(candidate_count) / log((1 - eps) / eps)``.

    Invariant under the base of the logarithm.  ``eps`` must lie strictly
    inside (0, 1/2): at 0 the threshold collapses to 0 and any nonnegative
    margin would halt, at >= 1/2 it is undefined.  Callers running perfect
    tests still supply the error rate they want the threshold sized for.
    """
    if candidate_count < 2:
        raise ValueError("need at least two candidates")
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    return 2.0 * math.log(candidate_count) / math.log((1.0 - eps) / eps)


@dataclass(frozen=True)
class EstimatorConfig:
    """Candidate set and decision parameters.

    ``tau`` is derived from the candidate count and ``eps``; use
    :func:`make_config`.
    """
    candidates: np.ndarray
    alpha: float
    beta: float
    eps: float
    tau: float


def make_config(g: Graph, alpha: float, beta: float, eps: float,
                candidates: Optional[Sequence[int]] = None) -> EstimatorConfig:
    """Validated config; ``candidates=None`` means every vertex."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if candidates is None:
        cand = np.arange(g.vertex_count, dtype=np.int64)
    else:
        cand = as_vertex_set(candidates, g.vertex_count)
    if len(cand) < 2:
        raise ValueError("need at least two candidates")
    return EstimatorConfig(cand, float(alpha), float(beta), float(eps),
                           threshold(len(cand), eps))


@dataclass(frozen=True)
class StopDecision:
    estimate: int
    stop_time: int
    fallback: bool


class EstimatorState:
    """Mutable per-run scoring state.

    Holds the candidate scores, the round counter, and precomputed distance
    tables: candidate-to-all-vertices for score updates and
    candidate-to-candidate for far-set checks.
    """

    def __init__(self, g: Graph, config: EstimatorConfig):
        self.config = config
        self.t = 0  # next round index to consume
        self.scores = np.zeros(len(config.candidates), dtype=np.int64)
        dist = distance_matrix(g)
        self.dist_to_all = dist[config.candidates, :]
        self.dist_between = self.dist_to_all[:, config.candidates]
        self.candidate_diameter = int(self.dist_between.max())
        self.fallback_time = math.ceil(
            self.candidate_diameter / (config.alpha + config.beta) - EPS)
        self._not_self = ~np.eye(len(config.candidates), dtype=bool)
        self.halted: Optional[StopDecision] = None


def update_scores(state: EstimatorState, rnd: ObservationRound) -> EstimatorState:
    """Consume one round: every candidate adds the signals inside its
    radius ``alpha * t`` neighborhood.  Rounds must arrive in order from 0.
    """
    if rnd.t != state.t:
        raise ValueError(f"out-of-order round: expected t={state.t}, got {rnd.t}")
    radius = radius_floor(state.config.alpha * state.t)
    idx = np.flatnonzero(rnd.signals)
    if len(idx):
        inside = state.dist_to_all[:, idx] <= radius
        state.scores += inside @ rnd.signals[idx].astype(np.int64)
    state.t += 1
    return state


def check_stopping(state: EstimatorState) -> Optional[StopDecision]:
    """Evaluate the stopping rule after the last consumed round.

    A candidate halts when its far set (other candidates at distance
    >= ``(alpha + beta) * t``) is nonempty and its score beats every far
    score by at least ``tau``.  Ties at the same round go to the largest
    margin, then the smallest vertex id.  Once the round index passes
    ``ceil(candidate_diameter / (alpha + beta))`` with no halt, the far sets
    are empty forever and the fallback decision is returned.
    """
    if state.halted is not None:
        return state.halted
    if state.t == 0:
        raise ValueError("no rounds consumed yet")
    cfg = state.config
    t_cur = state.t - 1
    far_radius = (cfg.alpha + cfg.beta) * t_cur - EPS
    far = (state.dist_between >= far_radius) & state._not_self
    has_far = far.any(axis=1)
    far_best = np.where(far, state.scores[None, :], -np.inf).max(axis=1)
    margins = state.scores - far_best
    halting = has_far & (margins >= cfg.tau)
    decision = None
    if halting.any():
        pick = int(np.argmax(np.where(halting, margins, -np.inf)))
        decision = StopDecision(int(cfg.candidates[pick]), t_cur, False)
    elif t_cur >= state.fallback_time:
        decision = StopDecision(int(cfg.candidates[0]), state.fallback_time, True)
    if decision is not None:
        state.halted = decision
    return decision


def spread_estimate(g: Graph, estimate: int, stop_time: int, alpha: float,
                    beta: float) -> np.ndarray:
    """Spread estimate: neighborhood of radius ``(alpha + 2 beta) * T``
    around the source estimate."""
    if stop_time < 0:
        raise ValueError("stop_time must be nonnegative")
    return neighborhood(g, estimate, (alpha + 2.0 * beta) * stop_time)


@dataclass(frozen=True)
class EstimationResult:
    """Outcome of one estimation run, with reporting extras.

    ``spread`` is exactly the radius-``(alpha + 2 beta) * stop_time``
    neighborhood of the estimate.  ``boundary_contaminated`` flags runs
    whose cascade or spread radius touched the finite graph's limits (either
    a generated truncation boundary or plain saturation), where finite-size
    effects distort the picture.
    """
    stop_time: int
    estimate: int
    fallback: bool
    spread: np.ndarray
    source: int
    dist_error: int
    infected_at_stop: int
    spread_size: int
    containment: bool
    boundary_contaminated: bool
    rounds: Optional[tuple] = None


def run_estimation(g: Graph, config: EstimatorConfig, traj: CascadeTrajectory,
                   noise: NoiseParams, seed: int, record_rounds: bool = False,
                   max_rounds: Optional[int] = None) -> EstimationResult:
    """Run the full loop: snapshot the cascade, sample a round, update the
    scores, test the stopping rule; repeat from t = 0 until a decision.

    The returned record includes the hop error, the infection count at the
    stopping time and whether the true affected set is contained in the
    spread estimate.  A fallback decision is reported as a flagged result,
    not an error.
    """
    if len(traj.times) != g.vertex_count:
        raise ValueError("trajectory and graph sizes differ")
    rng = make_rng(seed)
    state = EstimatorState(g, config)
    rounds = [] if record_rounds else None
    while True:
        if max_rounds is not None and state.t >= max_rounds:
            raise RuntimeError(f"no decision within {max_rounds} rounds")
        snapshot = affected_at(traj, state.t)
        rnd = sample_round(snapshot, g.vertex_count, state.t, noise, rng)
        if rounds is not None:
            rounds.append(rnd)
        update_scores(state, rnd)
        decision = check_stopping(state)
        if decision is not None:
            break
    return _finish(g, config, traj, decision, rounds)


def replay_estimation(g: Graph, config: EstimatorConfig,
                      rounds: Sequence[ObservationRound]) -> StopDecision:
    """Drive the estimator from recorded rounds instead of live sampling.

    Raises if the recording ends before the stopping rule fires.
    """
    state = EstimatorState(g, config)
    for rnd in rounds:
        update_scores(state, rnd)
        decision = check_stopping(state)
        if decision is not None:
            return decision
    raise ValueError("replay ended before the stopping rule fired")


def _finish(g, config, traj, decision, rounds) -> EstimationResult:
    spread = spread_estimate(g, decision.estimate, decision.stop_time,
                             config.alpha, config.beta)
    affected = affected_at(traj, decision.stop_time)
    containment = bool(np.all(np.isin(affected, spread)))
    dist_error = int(distance_matrix(g)[traj.source, decision.estimate])
    contaminated = _touches_limits(g, traj, decision, spread)
    return EstimationResult(
        stop_time=decision.stop_time,
        estimate=decision.estimate,
        fallback=decision.fallback,
        spread=spread,
        source=traj.source,
        dist_error=dist_error,
        infected_at_stop=len(affected),
        spread_size=len(spread),
        containment=containment,
        boundary_contaminated=contaminated,
        rounds=tuple(rounds) if rounds is not None else None,
    )


def _touches_limits(g, traj, decision, spread) -> bool:
    """Finite-size contamination: the spread estimate or the cascade covers
    the whole graph, or (for generated truncations) reaches the recorded
    boundary layer."""
    n = g.vertex_count
    if len(spread) == n:
        return True
    if np.sum(traj.times <= decision.stop_time) == n:
        return True
    if g.boundary:
        boundary = np.array(g.boundary, dtype=np.int64)
        if np.any(traj.times[boundary] <= decision.stop_time):
            return True
        if np.any(np.isin(boundary, spread)):
            return True
    return False
