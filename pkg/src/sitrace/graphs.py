"""Graph construction, generators, hop distances and neighborhood growth.

Vertices are integers ``0..n-1``.  Every edge carries a positive interaction
rate and is symmetric; graphs are validated to be simple and connected at
construction and never mutated afterwards, so instances can be shared freely
across worker processes.

Real-valued neighborhood radii are resolved by flooring, because hop
distances are integers: ``{u : dist(u, v) <= r} == {u : dist(u, v) <= floor(r)}``.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix

# Tolerance absorbing float dust when real-valued radii or thresholds meet
# integer hop distances (e.g. 0.3 * 10 == 2.9999999999999996).
EPS = 1e-9

# Size guard for the tree/lattice generators.
MAX_GENERATED_VERTICES = 2_000_000


def radius_floor(radius: float) -> int:
    """Integer radius equivalent to a real one."""
    return int(math.floor(radius + EPS))


class Graph:
    """Immutable simple connected graph with per-edge interaction rates.

    Attributes:
        vertex_count: number of vertices.
        edges: ``(m, 2)`` int array, each row ``(u, v)`` with ``u < v``,
            sorted lexicographically.  This order is the canonical edge order
            used for reproducible per-edge random draws.
        rates: ``(m,)`` float array of positive interaction rates aligned
            with ``edges``.
        adjacency: per-vertex tuple of ``(neighbor, rate)`` pairs.
        neighbors / incident_edges: per-vertex neighbor ids and the indices
            of the corresponding rows of ``edges`` (fast traversal form).
        max_degree, rate_min, rate_max: cached extrema.
        boundary: sorted vertex ids marking the truncation boundary of a
            generated finite stand-in for an infinite graph (empty tuple for
            graphs with no such boundary).
    """

    def __init__(self, vertex_count: int, edges: np.ndarray, rates: np.ndarray,
                 boundary: Sequence[int] = ()):
        if vertex_count < 1:
            raise ValueError("graph must have at least one vertex")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        rates = np.asarray(rates, dtype=np.float64).reshape(-1)
        if len(edges) != len(rates):
            raise ValueError("edges and rates must have equal length")
        if len(rates) and not np.all(rates > 0):
            raise ValueError("nonpositive rate: all interaction rates must be > 0")
        if len(edges):
            if edges.min() < 0 or edges.max() >= vertex_count:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("internal: edges must be oriented u < v")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            rates = rates[order]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("duplicate edge")

        self.vertex_count = int(vertex_count)
        self.edges = edges
        self.rates = rates
        self.boundary = tuple(sorted(int(b) for b in boundary))

        neighbors: list[list[int]] = [[] for _ in range(vertex_count)]
        incident: list[list[int]] = [[] for _ in range(vertex_count)]
        for eid, (u, v) in enumerate(edges.tolist()):
            neighbors[u].append(v)
            neighbors[v].append(u)
            incident[u].append(eid)
            incident[v].append(eid)
        self.neighbors = neighbors
        self.incident_edges = incident
        self.adjacency = tuple(
            tuple((w, float(rates[eid])) for w, eid in zip(neighbors[v], incident[v]))
            for v in range(vertex_count)
        )

        degrees = np.fromiter((len(nbrs) for nbrs in neighbors), dtype=np.int64,
                              count=vertex_count)
        self.max_degree = int(degrees.max())
        self.rate_min = float(rates.min()) if len(rates) else math.nan
        self.rate_max = float(rates.max()) if len(rates) else math.nan
        self._dist_matrix: np.ndarray | None = None

        if vertex_count > 1:
            reached = all_distances_from(self, 0)
            if np.any(reached < 0):
                raise ValueError("disconnected graph")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:  # pragma: no cover
        return (f"Graph(n={self.vertex_count}, m={self.edge_count}, "
                f"max_degree={self.max_degree})")


def build_graph(edge_list: Iterable[tuple[int, int, float]]) -> Graph:
    """Validated graph from ``(u, v, rate)`` triples.

    Rejects self-loops, duplicate edges (in either orientation), nonpositive
    rates and disconnected results, each with a distinct error.
    """
    us, vs, rs = [], [], []
    seen = set()
    for u, v, rate in edge_list:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if u > v:
            u, v = v, u
        if (u, v) in seen:
            raise ValueError(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        if rate <= 0:
            raise ValueError(f"nonpositive rate on edge ({u}, {v})")
        us.append(u)
        vs.append(v)
        rs.append(float(rate))
    if not us:
        raise ValueError("empty edge list")
    n = max(max(us), max(vs)) + 1
    return Graph(n, np.column_stack([us, vs]), np.array(rs))


def reweighted(g: Graph, rates: np.ndarray) -> Graph:
    """Same topology (and boundary) with new per-edge rates in canonical order."""
    return Graph(g.vertex_count, g.edges, rates, boundary=g.boundary)


def as_vertex_set(ids: Iterable[int], vertex_count: int) -> np.ndarray:
    """Sorted unique vertex ids, validated against ``vertex_count``."""
    arr = np.unique(np.asarray(list(ids), dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= vertex_count):
        raise ValueError("vertex id out of range")
    return arr


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Uniform random simple connected d-regular graph on n vertices.

    Uses the pairing (configuration) model: a uniform perfect matching of
    vertex stubs, rejected and resampled whenever it produces a self-loop,
    a multi-edge or a disconnected graph.  Rejection keeps the distribution
    uniform over simple outcomes.  Deterministic for a fixed seed.
    """
    if d < 3:
        raise ValueError("degree must be at least 3")
    if n <= d:
        raise ValueError("need more vertices than the degree")
    if (n * d) % 2 != 0:
        raise ValueError("n * d must be even")
    from .seeds import make_rng

    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(1000):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        if np.any(a == b):
            continue
        u = np.minimum(a, b)
        v = np.maximum(a, b)
        order = np.lexsort((v, u))
        pairs = np.column_stack([u[order], v[order]])
        if np.any(np.all(pairs[1:] == pairs[:-1], axis=1)):
            continue
        try:
            return Graph(n, pairs, np.ones(len(pairs)))
        except ValueError:
            continue  # disconnected; resample
    raise RuntimeError(f"failed to generate a simple connected {d}-regular "
                       f"graph on {n} vertices after 1000 attempts")


def regular_tree(degree: int, depth: int) -> Graph:
    """Finite depth-limited tree in which every internal vertex has the
    given degree (the root has ``degree`` children, others ``degree - 1``).

    All rates are 1.  The deepest layer is recorded as the truncation
    boundary.
    """
    if degree < 3:
        raise ValueError("degree must be at least 3")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    count = 1 + degree * sum((degree - 1) ** i for i in range(depth))
    if count > MAX_GENERATED_VERTICES:
        raise ValueError(f"tree would have {count} vertices "
                         f"(limit {MAX_GENERATED_VERTICES})")
    edges = []
    frontier = [0]
    next_id = 1
    for _level in range(depth):
        new_frontier = []
        for parent in frontier:
            children = degree if parent == 0 else degree - 1
            for _ in range(children):
                edges.append((parent, next_id))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    pairs = np.array(edges, dtype=np.int64)
    return Graph(next_id, pairs, np.ones(len(pairs)), boundary=frontier)


def lattice(dims: int, side: int) -> Graph:
    """Finite ``dims``-dimensional grid with ``side`` vertices per axis.

    All rates are 1.  Vertices with any coordinate on an outer face form the
    truncation boundary.
    """
    if dims < 1:
        raise ValueError("dims must be at least 1")
    if side < 2:
        raise ValueError("side must be at least 2")
    count = side ** dims
    if count > MAX_GENERATED_VERTICES:
        raise ValueError(f"lattice would have {count} vertices "
                         f"(limit {MAX_GENERATED_VERTICES})")
    strides = [side ** k for k in range(dims)]
    edges = []
    boundary = []
    for vid in range(count):
        coords = [(vid // strides[k]) % side for k in range(dims)]
        if any(c == 0 or c == side - 1 for c in coords):
            boundary.append(vid)
        for k in range(dims):
            if coords[k] + 1 < side:
                edges.append((vid, vid + strides[k]))
    pairs = np.array(edges, dtype=np.int64)
    return Graph(count, pairs, np.ones(len(pairs)), boundary=boundary)


# ---------------------------------------------------------------------------
# Distances and neighborhoods
# ---------------------------------------------------------------------------

def all_distances_from(g: Graph, v: int) -> np.ndarray:
    """Hop distances from ``v`` to every vertex (-1 marks unreachable;
    only seen during construction, valid graphs are connected)."""
    _check_vertex(g, v)
    dist = np.full(g.vertex_count, -1, dtype=np.int64)
    dist[v] = 0
    queue = deque([v])
    nbrs = g.neighbors
    while queue:
        u = queue.popleft()
        du = dist[u]
        for w in nbrs[u]:
            if dist[w] < 0:
                dist[w] = du + 1
                queue.append(w)
    return dist


def distance(g: Graph, u: int, v: int) -> int:
    """Shortest-path hop distance."""
    _check_vertex(g, v)
    return int(all_distances_from(g, u)[v])


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances, cached on the graph (int16).

    Level-synchronous BFS from every source at once via sparse boolean
    matrix products; estimator stopping checks query these distances every
    round, so one precomputation pays off.
    """
    if g._dist_matrix is None:
        n = g.vertex_count
        m = g.edge_count
        rows = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
        cols = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
        adj = csr_matrix((np.ones(2 * m, dtype=bool), (rows, cols)),
                         shape=(n, n))
        reached = np.eye(n, dtype=bool)
        dist = np.zeros((n, n), dtype=np.int16)
        frontier = reached.copy()
        d = 0
        while frontier.any():
            d += 1
            frontier = (adj @ frontier.T).T & ~reached
            dist[frontier] = d
            reached |= frontier
        g._dist_matrix = dist
    return g._dist_matrix


def diameter(g: Graph) -> int:
    return int(distance_matrix(g).max())


def neighborhood(g: Graph, v: int, radius: float) -> np.ndarray:
    """Sorted vertex ids within the given (possibly real) hop radius of v."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    dist = all_distances_from(g, v)
    return np.flatnonzero(dist <= radius_floor(radius))


def neighborhood_size_profile(g: Graph, v: int) -> np.ndarray:
    """``profile[r]`` = number of vertices within hop radius r, for
    r = 0..ecc(v)."""
    dist = all_distances_from(g, v)
    return np.cumsum(np.bincount(dist))


# ---------------------------------------------------------------------------
# Neighborhood growth
# ---------------------------------------------------------------------------

def cumulative_growth(g: Graph, v: int, alpha: float, t: int) -> int:
    """Sum over rounds s = 0..t of the size of the radius-``alpha*s``
    neighborhood of v.

    This quantity bounds how much score a candidate can accumulate by round
    t and drives the stopping-time budget.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    profile = neighborhood_size_profile(g, v)
    ecc = len(profile) - 1
    total = 0
    for s in range(int(t) + 1):
        total += int(profile[min(radius_floor(alpha * s), ecc)])
    return total


def growth_inverse(g: Graph, v: int, alpha: float, z: float) -> int:
    """Smallest round t with ``cumulative_growth(g, v, alpha, t) >= z``.

    The growth sequence is integer-valued and strictly increasing but not
    surjective, so the inverse is the generalized (ceiling) one.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if z < 1:
        raise ValueError("z must be at least 1")
    profile = neighborhood_size_profile(g, v)
    ecc = len(profile) - 1
    total = 0
    t = 0
    while True:
        total += int(profile[min(radius_floor(alpha * t), ecc)])
        if total >= z:
            return t
        t += 1


def check_poly_equivalence(g: Graph, q: float, r: float, t_max: int) -> bool:
    """True iff ``|N_u(t)| <= q * |N_v(t)|**r`` for all vertices u, v and all
    integer radii t <= t_max.

    Since the bound is increasing in ``|N_v(t)|``, it suffices to compare the
    largest against the smallest neighborhood at each radius.  On a finite
    graph, ``t_max >= diameter`` certifies the property for every t.
    """
    if q < 1 or r < 1:
        raise ValueError("q and r must be at least 1")
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    n = g.vertex_count
    sizes = np.empty((n, int(t_max) + 1), dtype=np.int64)
    for v in range(n):
        profile = neighborhood_size_profile(g, v)
        ecc = len(profile) - 1
        for t in range(int(t_max) + 1):
            sizes[v, t] = profile[min(t, ecc)]
    for t in range(int(t_max) + 1):
        smax = int(sizes[:, t].max())
        smin = int(sizes[:, t].min())
        if not smax <= q * smin ** r:
            return False
    return True


# ---------------------------------------------------------------------------
# Edge-list interchange
# ---------------------------------------------------------------------------

def save_edge_list(g: Graph, path) -> None:
    """Write one ``u v rate`` triple per line, 0-based ids."""
    with open(path, "w", encoding="ascii") as fh:
        for (u, v), rate in zip(g.edges.tolist(), g.rates.tolist()):
            fh.write(f"{u} {v} {rate!r}\n")


def load_edge_list(path) -> Graph:
    """Read a graph saved by :func:`save_edge_list`."""
    triples = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v, rate = line.split()
            triples.append((int(u), int(v), float(rate)))
    return build_graph(triples)


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.vertex_count:
        raise ValueError(f"vertex {v} out of range")
