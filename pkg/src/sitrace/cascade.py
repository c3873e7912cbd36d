"""Stochastic SI cascade engines.

A cascade starts at a single source vertex and crosses each edge ``(u, v)``
at rate ``lambda_uv`` from an affected endpoint.  Two provably equivalent
engines are provided:

* :func:`simulate_fpp` draws an independent exponential delay per edge and
  resolves all infection times in one shortest-path pass (the default:
  complete trajectories, no horizon needed on finite graphs);
* :func:`simulate_markovian` plays the exponential races event by event and
  exists for cross-validation.

Both sample exponentials by inverse CDF from a counter-based per-call
stream, which makes runs reproducible and preserves the monotone coupling:
raising rates while reusing the same uniform draws never delays any
infection.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graphs import EPS, Graph, all_distances_from, radius_floor, _check_vertex
from .seeds import make_rng


@dataclass(frozen=True)
class RateParams:
    """Inner and outer containment speeds for a cascade.

    ``alpha`` is the radius growth rate of the neighborhood the cascade is
    guaranteed to cover, ``beta`` the growth rate of the neighborhood that
    covers the cascade.
    """
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


def default_rate_params(g: Graph) -> RateParams:
    """Conservative containment speeds derived from the rate extrema:
    ``(rate_min / (12 ln max_degree), 3 * max_degree * rate_max)``.

    The natural logarithm is intended; homogeneous in the rates.  Requires
    max degree >= 2 so the inner speed is finite and below the outer one.
    """
    if g.max_degree < 2:
        raise ValueError("max degree must be at least 2")
    alpha = g.rate_min / (12.0 * math.log(g.max_degree))
    beta = 3.0 * g.max_degree * g.rate_max
    return RateParams(alpha, beta)


@dataclass(frozen=True)
class CascadeTrajectory:
    """Per-vertex infection times of one sampled cascade.

    ``times[source] == 0``; vertices not reached within a finite simulation
    horizon carry ``inf``.  ``horizon`` is ``inf`` when every infection has
    been materialized.
    """
    source: int
    times: np.ndarray
    horizon: float = math.inf

    def __post_init__(self):
        if not 0 <= self.source < len(self.times):
            raise ValueError("source out of range")
        if self.times[self.source] != 0.0:
            raise ValueError("source must be infected at time 0")
        others = np.delete(self.times, self.source)
        if len(others) and not np.all(others > 0):
            raise ValueError("non-source infection times must be positive")


def simulate_fpp(g: Graph, source: int, rng_seed: int) -> CascadeTrajectory:
    """Complete trajectory via the shortest-path (first-passage)
    representation: each edge gets an independent ``Exp(rate)`` delay and a
    vertex is infected at its minimum path delay from the source.
    """
    _check_vertex(g, source)
    rng = make_rng(rng_seed)
    u = rng.random(g.edge_count)
    weights = -np.log1p(-u) / g.rates

    times = np.full(g.vertex_count, math.inf)
    times[source] = 0.0
    done = np.zeros(g.vertex_count, dtype=bool)
    heap = [(0.0, source)]
    nbrs, incident = g.neighbors, g.incident_edges
    while heap:
        t, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for w, eid in zip(nbrs[v], incident[v]):
            nt = t + weights[eid]
            if nt < times[w]:
                times[w] = nt
                heapq.heappush(heap, (nt, w))
    return CascadeTrajectory(source, times, math.inf)


def simulate_markovian(g: Graph, source: int, t_max: float,
                       rng_seed: int) -> CascadeTrajectory:
    """Event-driven trajectory: the total rate across the infection boundary
    sets an exponential waiting time, then one boundary edge fires with
    probability proportional to its rate.

    Infections later than ``t_max`` are left as ``inf`` and the trajectory
    is marked horizon-limited (unless every vertex was reached first).
    """
    _check_vertex(g, source)
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    rng = make_rng(rng_seed)

    times = np.full(g.vertex_count, math.inf)
    times[source] = 0.0
    # susceptible vertex -> sum of rates on edges to affected neighbors
    pressure: dict[int, float] = {}
    for w, rate in g.adjacency[source]:
        pressure[w] = pressure.get(w, 0.0) + rate

    t = 0.0
    while pressure:
        total = sum(pressure.values())
        t += -math.log1p(-rng.random()) / total
        if t > t_max:
            return CascadeTrajectory(source, times, float(t_max))
        x = rng.random() * total
        acc = 0.0
        target = None
        for v, rate in pressure.items():
            acc += rate
            if x < acc:
                target = v
                break
        if target is None:  # float corner: x == total
            target = v
        times[target] = t
        del pressure[target]
        for w, rate in g.adjacency[target]:
            if times[w] == math.inf:
                pressure[w] = pressure.get(w, 0.0) + rate
    return CascadeTrajectory(source, times, math.inf)


def affected_at(traj: CascadeTrajectory, t: float) -> np.ndarray:
    """Sorted ids of vertices affected by time ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t > traj.horizon:
        raise ValueError(f"t={t} is beyond the simulation horizon "
                         f"{traj.horizon}")
    return np.flatnonzero(traj.times <= t)


def check_containment(g: Graph, traj: CascadeTrajectory, params: RateParams,
                      k: int, t_max: int) -> bool:
    """True iff for every integer t in ``[k, t_max]`` the cascade sits
    between the two source-centered neighborhoods:
    radius ``alpha*t`` inside it and radius ``beta*t`` outside it.
    """
    if k < 0 or t_max < k:
        raise ValueError("need 0 <= k <= t_max")
    if t_max > traj.horizon:
        raise ValueError("t_max is beyond the simulation horizon")
    dist = all_distances_from(g, traj.source)
    times = traj.times
    for t in range(int(k), int(t_max) + 1):
        inner_radius = radius_floor(params.alpha * t)
        if np.any((dist <= inner_radius) & (times > t)):
            return False
        if np.any((times <= t) & (dist > params.beta * t + EPS)):
            return False
    return True


def check_causality(g: Graph, traj: CascadeTrajectory) -> bool:
    """Every infected non-source vertex has a strictly earlier infected
    neighbor."""
    times = traj.times
    for v in range(g.vertex_count):
        if v == traj.source or times[v] == math.inf:
            continue
        if not any(times[w] < times[v] for w in g.neighbors[v]):
            return False
    return True


def save_trajectory(traj: CascadeTrajectory, path) -> None:
    """Write one ``vertex infection_time`` line per vertex."""
    with open(path, "w", encoding="ascii") as fh:
        for v, t in enumerate(traj.times.tolist()):
            fh.write(f"{v} {t!r}\n")


def load_trajectory(path, horizon: float = math.inf) -> CascadeTrajectory:
    """Read a trajectory saved by :func:`save_trajectory`.

    The dump does not record the horizon, so callers replaying a
    horizon-limited trajectory must pass it explicitly.
    """
    entries = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            v, t = line.split()
            entries[int(v)] = float(t)
    times = np.array([entries[v] for v in range(len(entries))])
    source = int(np.flatnonzero(times == 0.0)[0])
    return CascadeTrajectory(source, times, horizon)
