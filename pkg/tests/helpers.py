"""Shared randomized-structure builders for the test suite."""

import heapq

import numpy as np

from mrfstruct.graph import Graph


def random_tree(p: int, rng: np.random.Generator) -> Graph:
    """Uniform random labeled tree on p nodes (Pruefer decoding)."""
    if p == 1:
        return Graph(1, [])
    if p == 2:
        return Graph(2, [(0, 1)])
    prufer = rng.integers(0, p, size=p - 2)
    deg = np.ones(p, dtype=int)
    for v in prufer:
        deg[v] += 1
    leaves = [i for i in range(p) if deg[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in prufer:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, int(v)))
        deg[v] -= 1
        if deg[v] == 1:
            heapq.heappush(leaves, int(v))
    edges.append(tuple(sorted(leaves)))
    return Graph(p, edges)


def random_bounded_degree_graph(
    p: int, dmax: int, extra_edges: int, rng: np.random.Generator
) -> Graph:
    """Random connected graph: a tree plus extra edges under a degree cap.

    The tree is resampled until it respects dmax, so the cap is hard.
    """
    while True:
        g = random_tree(p, rng)
        if max(g.degree(i) for i in range(p)) <= dmax:
            break
    edges = set(g.edges)
    deg = {i: g.degree(i) for i in range(p)}
    pairs = [(i, j) for i in range(p) for j in range(i + 1, p) if (i, j) not in edges]
    order = rng.permutation(len(pairs))
    added = 0
    for k in order:
        if added >= extra_edges:
            break
        i, j = pairs[k]
        if deg[i] < dmax and deg[j] < dmax:
            edges.add((i, j))
            deg[i] += 1
            deg[j] += 1
            added += 1
    return Graph(p, sorted(edges))


def bfs_distances(g: Graph, src: int) -> list:
    """Hop distances from src; unreachable nodes get None."""
    dist = [None] * g.p
    dist[src] = 0
    queue = [src]
    while queue:
        u = queue.pop(0)
        for v in g.neighbors(u):
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
