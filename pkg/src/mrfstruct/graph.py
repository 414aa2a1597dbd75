"""Undirected simple graphs: container, generators, and structural queries."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Union

import numpy as np


class Graph:
    """Immutable simple undirected graph on nodes 0..p-1.

    Edges are stored as a sorted tuple of (i, j) pairs with i < j; duplicate
    and reversed inputs are normalized away.
    """

    def __init__(self, p: int, edges: Iterable[tuple[int, int]]):
        if p < 1:
            raise ValueError(f"graph needs at least one node, got p={p}")
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < p and 0 <= j < p):
                raise ValueError(f"edge ({i}, {j}) out of range for p={p}")
            norm.add((i, j) if i < j else (j, i))
        self.p = int(p)
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        nbr: list[list[int]] = [[] for _ in range(p)]
        for i, j in self.edges:
            nbr[i].append(j)
            nbr[j].append(i)
        self._nbr = tuple(tuple(sorted(ns)) for ns in nbr)
        self._edge_set = frozenset(self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._nbr[i]

    def degree(self, i: int) -> int:
        return len(self._nbr[i])

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self._edge_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.p == other.p
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.p, self.edges))

    def __repr__(self) -> str:
        return f"Graph(p={self.p}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class Grid4:
    """rows x cols lattice with horizontal/vertical edges; node id = r*cols + c."""

    rows: int
    cols: int


@dataclass(frozen=True)
class Grid8:
    """rows x cols lattice with the four-neighbor edges plus both diagonals."""

    rows: int
    cols: int


@dataclass(frozen=True)
class ErdosRenyi:
    """p nodes, each pair kept independently with probability c/p (mean degree c)."""

    p: int
    c: float


@dataclass(frozen=True)
class Explicit:
    """A fixed edge list."""

    p: int
    edges: tuple[tuple[int, int], ...]


GraphKind = Union[Grid4, Grid8, ErdosRenyi, Explicit]


def _grid_edges(rows: int, cols: int, diagonals: bool) -> list[tuple[int, int]]:
    if rows < 1 or cols < 1:
        raise ValueError(f"grid dimensions must be positive, got {rows}x{cols}")
    edges = []
    node = lambda r, c: r * cols + c
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((node(r, c), node(r, c + 1)))
            if r + 1 < rows:
                edges.append((node(r, c), node(r + 1, c)))
            if diagonals and r + 1 < rows and c + 1 < cols:
                edges.append((node(r, c), node(r + 1, c + 1)))
                edges.append((node(r, c + 1), node(r + 1, c)))
    return edges


def generate(kind: GraphKind, seed=None) -> Graph:
    """Build a graph of the given kind.

    `seed` (int, SeedSequence, or Generator) only matters for ErdosRenyi,
    where every unordered pair gets exactly one uniform draw, visited in
    ascending (i, j) order, so a seed pins the graph exactly.
    """
    if isinstance(kind, Grid4):
        return Graph(kind.rows * kind.cols, _grid_edges(kind.rows, kind.cols, False))
    if isinstance(kind, Grid8):
        return Graph(kind.rows * kind.cols, _grid_edges(kind.rows, kind.cols, True))
    if isinstance(kind, ErdosRenyi):
        if kind.p < 1 or kind.c < 0:
            raise ValueError(f"bad ErdosRenyi parameters p={kind.p}, c={kind.c}")
        rng = np.random.default_rng(seed)
        prob = kind.c / kind.p
        pairs = list(combinations(range(kind.p), 2))
        draws = rng.random(len(pairs))
        return Graph(kind.p, [pq for pq, u in zip(pairs, draws) if u < prob])
    if isinstance(kind, Explicit):
        return Graph(kind.p, kind.edges)
    raise TypeError(f"unknown graph kind: {kind!r}")


def max_degree(g: Graph) -> int:
    return max(g.degree(i) for i in range(g.p))


def girth(g: Graph):
    """Length of the shortest cycle, or math.inf for forests.

    BFS from every root; a non-tree edge (u, v) seen at distances
    (dist[u], dist[v]) witnesses a cycle of length <= dist[u]+dist[v]+1,
    and the minimum over all roots is exact.
    """
    best = math.inf
    for root in range(g.p):
        dist = [-1] * g.p
        parent = [-1] * g.p
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break  # deeper candidates cannot beat the current best
            for v in g.neighbors(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v and parent[v] != u:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def ball(g: Graph, i: int, radius: int) -> set[int]:
    """Nodes within `radius` hops of i, including i itself."""
    if not 0 <= i < g.p:
        raise ValueError(f"node {i} out of range")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    seen = {i}
    frontier = [i]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def _bfs_dist(g: Graph, src: int) -> list[float]:
    dist: list[float] = [math.inf] * g.p
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] == math.inf:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def short_paths(
    g: Graph, i: int, j: int, maxlen: int, cap: int = 10**6
) -> list[tuple[int, ...]]:
    """All self-avoiding paths from i to j with at most `maxlen` edges.

    Returned in lexicographic order of the node sequence. Raises RuntimeError
    if more than `cap` paths would be produced.
    """
    if not (0 <= i < g.p and 0 <= j < g.p):
        raise ValueError(f"nodes ({i}, {j}) out of range")
    if maxlen < 0:
        raise ValueError("maxlen must be nonnegative")
    if i == j:
        return [(i,)]
    dist_to_j = _bfs_dist(g, j)
    out: list[tuple[int, ...]] = []
    path = [i]
    on_path = [False] * g.p
    on_path[i] = True

    def walk(u: int) -> None:
        for v in g.neighbors(u):
            if on_path[v]:
                continue
            # edges used after stepping to v = len(path); dist_to_j lower-bounds
            # the remainder, so this prune never cuts a feasible completion
            if len(path) + dist_to_j[v] > maxlen:
                continue
            path.append(v)
            if v == j:
                if len(out) >= cap:
                    raise RuntimeError(
                        f"more than {cap} paths between {i} and {j} at maxlen={maxlen}"
                    )
                out.append(tuple(path))
            else:
                on_path[v] = True
                walk(v)
                on_path[v] = False
            path.pop()

    walk(i)
    return out


def kind_to_json(kind: GraphKind) -> dict:
    if isinstance(kind, Grid4):
        return {"kind": "grid4", "rows": kind.rows, "cols": kind.cols}
    if isinstance(kind, Grid8):
        return {"kind": "grid8", "rows": kind.rows, "cols": kind.cols}
    if isinstance(kind, ErdosRenyi):
        return {"kind": "er", "p": kind.p, "c": kind.c}
    if isinstance(kind, Explicit):
        return {"kind": "explicit", "p": kind.p, "edges": [list(e) for e in kind.edges]}
    raise TypeError(f"unknown graph kind {kind!r}")


def kind_from_json(obj: dict) -> GraphKind:
    name = obj["kind"]
    if name == "grid4":
        return Grid4(int(obj["rows"]), int(obj["cols"]))
    if name == "grid8":
        return Grid8(int(obj["rows"]), int(obj["cols"]))
    if name == "er":
        return ErdosRenyi(int(obj["p"]), float(obj["c"]))
    if name == "explicit":
        return Explicit(int(obj["p"]), tuple(tuple(e) for e in obj["edges"]))
    raise ValueError(f"unknown graph kind name {name!r}")


def graph_to_json(g: Graph) -> dict:
    return {"p": g.p, "edges": [[i, j] for i, j in g.edges]}


def graph_from_json(obj: dict) -> Graph:
    return Graph(int(obj["p"]), [tuple(e) for e in obj["edges"]])


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(g), fh, indent=2)
        fh.write("\n")


def load_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
