"""Shared test utilities: small-graph generators and independent oracles.

Oracles here deliberately reimplement things the package computes, by a
different route (brute force, enumeration, direct integration), and must
stay independent of the code under test.
"""

import itertools
import math

from sitrace import build_graph


def random_connected_graph(rng, n, extra_edges=None):
    """Random connected simple graph: a random spanning tree plus extra
    random edges, unit rates."""
    order = rng.permutation(n)
    triples = []
    used = set()
    for i in range(1, n):
        u = int(order[rng.integers(i)])
        v = int(order[i])
        a, b = min(u, v), max(u, v)
        used.add((a, b))
        triples.append((a, b, 1.0))
    if extra_edges is None:
        extra_edges = int(rng.integers(0, n))
    for _ in range(extra_edges):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        a, b = min(u, v), max(u, v)
        if a != b and (a, b) not in used:
            used.add((a, b))
            triples.append((a, b, 1.0))
    return build_graph(triples)


def floyd_warshall(g):
    """Brute-force all-pairs hop distances."""
    n = g.vertex_count
    dist = [[math.inf] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = 0
    for u, v in g.edges.tolist():
        dist[u][v] = 1
        dist[v][u] = 1
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            for j in range(n):
                if dik + dist[k][j] < dist[i][j]:
                    dist[i][j] = dik + dist[k][j]
    return dist


def bfs_neighborhood(g, v, radius):
    """Set of vertices within integer hop radius, by plain BFS."""
    radius = math.floor(radius + 1e-9)
    seen = {v}
    frontier = [v]
    for _ in range(int(radius)):
        nxt = []
        for u in frontier:
            for w in g.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def all_connected_graphs(n):
    """Every labeled connected simple graph on n vertices (n <= 5 is sane)."""
    pairs = list(itertools.combinations(range(n), 2))
    graphs = []
    for bits in range(1, 2 ** len(pairs)):
        triples = [(u, v, 1.0) for k, (u, v) in enumerate(pairs)
                   if bits >> k & 1]
        try:
            g = build_graph(triples)
        except ValueError:
            continue
        if g.vertex_count == n:  # must span all n vertices
            graphs.append(g)
    return graphs
