import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import bfs_distances, random_bounded_degree_graph, random_tree
from mrfstruct.graph import (
    ErdosRenyi,
    Explicit,
    Graph,
    Grid4,
    Grid8,
    ball,
    generate,
    girth,
    graph_from_json,
    graph_to_json,
    kind_from_json,
    kind_to_json,
    load_graph,
    max_degree,
    save_graph,
    short_paths,
)

PETERSEN = Graph(
    10,
    [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
     (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
     (5, 7), (7, 9), (6, 9), (6, 8), (5, 8)],
)


def brute_girth(g: Graph):
    """Shortest cycle by deleting each edge and measuring the reroute."""
    best = math.inf
    for u, v in g.edges:
        trimmed = Graph(g.p, [e for e in g.edges if e != (u, v)])
        d = bfs_distances(trimmed, u)[v]
        if d is not None:
            best = min(best, d + 1)
    return best


def test_edge_normalization():
    g = Graph(4, [(2, 0), (0, 2), (1, 3), (3, 1)])
    assert g.edges == ((0, 2), (1, 3))
    assert g.n_edges == 2
    assert g.neighbors(0) == (2,)
    assert g.has_edge(2, 0) and g.has_edge(0, 2)
    assert not g.has_edge(0, 1)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph(0, [])


def test_grid4_3x3_structure():
    g = generate(Grid4(3, 3))
    assert g.p == 9
    assert g.n_edges == 12
    assert max_degree(g) == 4
    assert g.degree(0) == 2  # corner
    assert girth(g) == 4


def test_grid8_2x2_is_complete():
    g = generate(Grid8(2, 2))
    assert g.p == 4
    assert g.n_edges == 6
    assert girth(g) == 3


def test_grid8_3x3_center_degree():
    g = generate(Grid8(3, 3))
    assert g.degree(4) == 8
    assert girth(g) == 3


def test_er_seed_pins_graph():
    kind = ErdosRenyi(20, 3.0)
    a = generate(kind, seed=7)
    b = generate(kind, seed=7)
    c = generate(kind, seed=8)
    assert a == b
    assert a != c
    # mean degree c: expect somewhere in a loose band
    assert 0 < a.n_edges < 20 * 6


def test_er_extreme_probabilities():
    assert generate(ErdosRenyi(6, 0.0), seed=0).n_edges == 0
    dense = generate(ErdosRenyi(6, 6.0), seed=0)  # keep probability 1
    assert dense.n_edges == 15


def test_explicit_kind():
    g = generate(Explicit(3, ((0, 1), (1, 2))))
    assert g.edges == ((0, 1), (1, 2))


def test_girth_known_graphs():
    assert girth(Graph(3, [(0, 1), (1, 2), (0, 2)])) == 3
    cycle5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
    assert girth(cycle5) == 5
    assert girth(PETERSEN) == 5
    assert girth(Graph(4, [(0, 1), (1, 2), (2, 3)])) == math.inf
    assert girth(Graph(1, [])) == math.inf


def test_girth_matches_brute_force_on_random_graphs():
    rng = np.random.default_rng(42)
    for _ in range(40):
        p = int(rng.integers(3, 11))
        n_extra = int(rng.integers(0, 5))
        g = random_bounded_degree_graph(p, 5, n_extra, rng)
        assert girth(g) == brute_girth(g)


def test_ball_matches_bfs():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_bounded_degree_graph(int(rng.integers(2, 12)), 4, 3, rng)
        i = int(rng.integers(0, g.p))
        dist = bfs_distances(g, i)
        for r in range(4):
            want = {v for v in range(g.p) if dist[v] is not None and dist[v] <= r}
            assert ball(g, i, r) == want


def test_ball_validates_arguments():
    g = Graph(3, [(0, 1)])
    with pytest.raises(ValueError):
        ball(g, 5, 1)
    with pytest.raises(ValueError):
        ball(g, 0, -1)


def test_short_paths_triangle():
    g = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert short_paths(g, 0, 1, 1) == [(0, 1)]
    assert short_paths(g, 0, 1, 2) == [(0, 1), (0, 2, 1)]
    assert short_paths(g, 0, 0, 5) == [(0,)]


def brute_paths(g: Graph, i: int, j: int, maxlen: int):
    out = []

    def extend(path):
        u = path[-1]
        if u == j:
            out.append(tuple(path))
            return
        if len(path) > maxlen:
            return
        for v in g.neighbors(u):
            if v not in path:
                extend(path + [v])

    extend([i])
    return sorted(out)


def test_short_paths_matches_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_bounded_degree_graph(int(rng.integers(3, 9)), 4, 4, rng)
        i, j = rng.choice(g.p, size=2, replace=False).tolist()
        maxlen = int(rng.integers(1, g.p))
        assert short_paths(g, i, j, maxlen) == brute_paths(g, i, j, maxlen)


def test_short_paths_cap():
    complete = Graph(7, [(i, j) for i in range(7) for j in range(i + 1, 7)])
    with pytest.raises(RuntimeError):
        short_paths(complete, 0, 1, 6, cap=10)


def test_json_round_trip(tmp_path):
    g = generate(Grid8(2, 3))
    assert graph_from_json(graph_to_json(g)) == g
    path = tmp_path / "g.json"
    save_graph(g, path)
    assert load_graph(path) == g
    # file is plain JSON
    json.loads(path.read_text())


@pytest.mark.parametrize(
    "kind",
    [Grid4(2, 5), Grid8(3, 3), ErdosRenyi(12, 2.5), Explicit(4, ((0, 3), (1, 2)))],
)
def test_kind_json_round_trip(kind):
    assert kind_from_json(kind_to_json(kind)) == kind


@given(
    p=st.integers(2, 10),
    raw=st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=25),
)
@settings(max_examples=60, deadline=None)
def test_graph_properties(p, raw):
    edges = [(i % p, j % p) for i, j in raw if i % p != j % p]
    g = Graph(p, edges)
    assert sum(g.degree(i) for i in range(p)) == 2 * g.n_edges
    for i, j in g.edges:
        assert i < j
        assert j in g.neighbors(i) and i in g.neighbors(j)
    # a ball of radius p covers the whole connected component
    comp = ball(g, 0, p)
    assert all(set(g.neighbors(u)) <= comp for u in comp)
    gg = girth(g)
    assert gg == math.inf or gg >= 3


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_random_tree_is_tree(p, seed):
    g = random_tree(p, np.random.default_rng(seed))
    assert g.n_edges == p - 1
    assert len(ball(g, 0, p)) == p  # connected
