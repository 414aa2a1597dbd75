import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_bounded_degree_graph
from mrfstruct.citest import (
    MaxMinResult,
    ScoreMatrix,
    Statistic,
    delta,
    maxmin_score,
    score_matrix,
)
from mrfstruct.estimate import EmpiricalDist
from mrfstruct.graph import Graph
from mrfstruct.model import (
    IsingModel,
    exact_joint,
    exact_sample,
    random_model,
    xor_triangle,
)


def chain3(j: float = 0.5) -> IsingModel:
    g = Graph(3, [(0, 1), (1, 2)])
    return IsingModel(g, {(0, 1): j, (1, 2): j})


def manual_prob_spread(t, i, j, cond):
    """Reference spread: max over contexts and value pairs, zero-mass skipped."""
    best = 0.0
    values = t.values
    for ctx in itertools.product(values, repeat=len(cond)):
        for xj, xjp in itertools.combinations(values, 2):
            try:
                a = {**dict(zip(cond, ctx)), j: xj}
                b = {**dict(zip(cond, ctx)), j: xjp}
                for xi in values:
                    best = max(best, abs(t.cond_prob(i, xi, a) - t.cond_prob(i, xi, b)))
            except Exception:
                continue
    return best


def test_testkind_parse():
    assert Statistic.parse("mi") is Statistic.MUTUAL_INFORMATION
    assert Statistic.parse("prob") is Statistic.PROBABILITY
    with pytest.raises(ValueError):
        Statistic.parse("chi2")


def test_xor_deltas():
    t = xor_triangle(0.1)
    assert delta(t, Statistic.MUTUAL_INFORMATION, 0, 2) <= 1e-12
    assert delta(t, Statistic.MUTUAL_INFORMATION, 0, 2, (1,)) == pytest.approx(
        0.5310044064107188, abs=1e-12
    )
    assert delta(t, Statistic.PROBABILITY, 2, 0, (1,)) == pytest.approx(0.8, abs=1e-12)
    assert delta(t, Statistic.PROBABILITY, 2, 0) <= 1e-12


def test_delta_rejects_overlap():
    t = xor_triangle(0.1)
    with pytest.raises(ValueError):
        delta(t, Statistic.MUTUAL_INFORMATION, 0, 0)
    with pytest.raises(ValueError):
        delta(t, Statistic.MUTUAL_INFORMATION, 0, 1, (1,))


def test_prob_delta_matches_manual_enumeration():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    m = IsingModel(
        g,
        {(0, 1): 0.6, (1, 2): -0.4, (2, 3): 0.5, (0, 3): 0.3},
        np.array([0.3, -0.2, 0.0, 0.4]),
    )
    t = exact_joint(m)
    for i, j, cond in [(0, 1, ()), (1, 0, (2,)), (3, 2, (0, 1)), (2, 3, (1,))]:
        assert delta(t, Statistic.PROBABILITY, i, j, cond) == pytest.approx(
            manual_prob_spread(t, i, j, cond), abs=1e-12
        )


def test_prob_delta_is_directional():
    # with a field the response and probe roles are not interchangeable
    g = Graph(2, [(0, 1)])
    m = IsingModel(g, {(0, 1): 0.8}, np.array([1.2, 0.0]))
    t = exact_joint(m)
    a = delta(t, Statistic.PROBABILITY, 0, 1)
    b = delta(t, Statistic.PROBABILITY, 1, 0)
    assert abs(a - b) > 1e-3


def test_maxmin_chain_separator():
    t = exact_joint(chain3())
    res = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 2, d1=1, d2=0)
    assert res.score <= 1e-12
    assert res.s_witness == (1,)
    assert res.t_witness == ()
    edge = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 1, d1=1, d2=0)
    assert edge.score > 0.01


def test_maxmin_xor_needs_t():
    t = xor_triangle(0.1)
    kind = Statistic.MUTUAL_INFORMATION
    bare = maxmin_score(t, kind, 0, 2, d1=1, d2=0)
    assert bare.score <= 1e-12  # the pair looks independent without a prop set
    helped = maxmin_score(t, kind, 0, 2, d1=1, d2=1)
    assert helped.score == pytest.approx(0.5310044064107188, abs=1e-9)
    assert helped.t_witness == (1,)


def test_maxmin_validates_sizes():
    t = xor_triangle(0.1)
    with pytest.raises(ValueError):
        maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 1, d1=-1, d2=0)


def test_maxmin_space_strips_pair_nodes():
    t = exact_joint(chain3())
    a = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 2, 1, 0, space=(0, 1, 2))
    b = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 2, 1, 0, space=(1,))
    assert a.score == b.score
    assert a.s_witness == b.s_witness == (1,)


def test_maxmin_empty_space():
    t = exact_joint(chain3())
    res = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 1, 2, 2, space=())
    assert res.s_witness == () and res.t_witness == ()
    assert res.combinations == 1


def test_witness_achieves_score():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = random_bounded_degree_graph(6, 3, 3, rng)
        m = random_model(g, 0.3, 0.7, seed=int(rng.integers(2**32)))
        t = exact_joint(m)
        for i, j in [(0, 3), (1, 4), (2, 5)]:
            res = maxmin_score(t, Statistic.MUTUAL_INFORMATION, i, j, 2, 1)
            cond = tuple(sorted(res.s_witness + res.t_witness))
            assert delta(t, Statistic.MUTUAL_INFORMATION, i, j, cond) == pytest.approx(
                res.score, abs=1e-12
            )


def test_prune_does_not_change_result():
    rng = np.random.default_rng(7)
    for _ in range(8):
        g = random_bounded_degree_graph(6, 3, 3, rng)
        m = random_model(g, 0.3, 0.7, seed=int(rng.integers(2**32)))
        t = exact_joint(m)
        for kind in Statistic:
            i, j = rng.choice(6, size=2, replace=False).tolist()
            a = maxmin_score(t, kind, i, j, 2, 1, prune=True)
            b = maxmin_score(t, kind, i, j, 2, 1, prune=False)
            assert a.score == b.score
            assert (a.s_witness, a.t_witness) == (b.s_witness, b.t_witness)
            assert a.combinations <= b.combinations


def test_threshold_mode_decisions():
    t = exact_joint(chain3())
    kind = Statistic.MUTUAL_INFORMATION
    non_edge = maxmin_score(t, kind, 0, 2, 1, 1, threshold=1e-6)
    assert non_edge.decided_nonedge is True
    assert non_edge.s_witness == (1,)
    edge = maxmin_score(t, kind, 0, 1, 1, 1, threshold=1e-6)
    assert edge.decided_nonedge is False
    assert edge.score > 1e-6  # decision-grade lower bound


def test_threshold_mode_early_exit_is_cheaper():
    rng = np.random.default_rng(13)
    g = random_bounded_degree_graph(7, 3, 4, rng)
    m = random_model(g, 0.4, 0.6, seed=3)
    t = exact_joint(m)
    i, j = g.edges[0]
    full = maxmin_score(t, Statistic.MUTUAL_INFORMATION, i, j, 2, 1, prune=False)
    quick = maxmin_score(t, Statistic.MUTUAL_INFORMATION, i, j, 2, 1, threshold=1e-4)
    assert quick.combinations <= full.combinations


def test_min_max_monotonicity_in_search_sizes():
    rng = np.random.default_rng(19)
    kind = Statistic.MUTUAL_INFORMATION
    for _ in range(6):
        g = random_bounded_degree_graph(6, 3, 3, rng)
        m = random_model(g, 0.3, 0.7, seed=int(rng.integers(2**32)))
        t = exact_joint(m)
        i, j = rng.choice(6, size=2, replace=False).tolist()
        base = maxmin_score(t, kind, i, j, 1, 1).score
        # more separator candidates can only lower the min
        assert maxmin_score(t, kind, i, j, 2, 1).score <= base + 1e-12
        # more propping candidates can only raise each max
        assert maxmin_score(t, kind, i, j, 1, 2).score >= base - 1e-12


def test_score_matrix_full_space():
    t = exact_joint(chain3())
    mat = score_matrix(t, Statistic.MUTUAL_INFORMATION, 1, 0, engine="reference")
    assert mat.scores[0, 2] <= 1e-12
    assert mat.scores[0, 1] > 0.01 and mat.scores[1, 2] > 0.01
    assert np.allclose(mat.scores, mat.scores.T)
    assert mat.meta["engine"] == "reference"
    assert len(mat.pair_values()) == 3


def test_score_matrix_directional_spaces():
    t = exact_joint(chain3())
    kind = Statistic.MUTUAL_INFORMATION
    spaces = {0: (1,), 1: (0, 2), 2: ()}
    mat = score_matrix(t, kind, 1, 0, spaces=spaces, engine="reference")
    # (1, 2): only the 1-side search exists; S can only draw from {0}
    expect = maxmin_score(t, kind, 1, 2, 1, 0, space=(0,)).score
    assert mat.scores[1, 2] == pytest.approx(expect, abs=1e-12)
    # (0, 2): neither side lists the other, so the pair is silent
    assert mat.scores[0, 2] == 0.0
    # (0, 1): both sides exist, the larger directional score wins
    a = maxmin_score(t, kind, 0, 1, 1, 0, space=spaces[0]).score
    b = maxmin_score(t, kind, 1, 0, 1, 0, space=spaces[1]).score
    assert mat.scores[0, 1] == pytest.approx(max(a, b), abs=1e-12)


def test_score_matrix_relabel_invariance():
    rng = np.random.default_rng(29)
    g = random_bounded_degree_graph(5, 3, 2, rng)
    m = random_model(g, 0.3, 0.7, seed=11)
    perm = np.array([3, 0, 4, 1, 2])
    pg = Graph(5, [tuple(sorted((int(perm[a]), int(perm[b])))) for a, b in g.edges])
    pc = {
        tuple(sorted((int(perm[a]), int(perm[b])))): m.coupling(a, b)
        for a, b in g.edges
    }
    pm = IsingModel(pg, pc)
    mat = score_matrix(exact_joint(m), Statistic.MUTUAL_INFORMATION, 1, 1, engine="reference")
    pmat = score_matrix(exact_joint(pm), Statistic.MUTUAL_INFORMATION, 1, 1, engine="reference")
    for i in range(5):
        for j in range(5):
            if i != j:
                assert pmat.scores[perm[i], perm[j]] == pytest.approx(
                    mat.scores[i, j], abs=1e-10
                )


def test_fast_engine_matches_reference():
    rng = np.random.default_rng(37)
    for trial in range(4):
        g = random_bounded_degree_graph(7, 3, 3, rng)
        m = random_model(g, 0.3, 0.7, seed=int(rng.integers(2**32)))
        emp = EmpiricalDist(exact_sample(exact_joint(m), 2000, seed=trial))
        for d1, d2 in [(1, 0), (1, 1), (2, 1)]:
            ref = score_matrix(emp, Statistic.MUTUAL_INFORMATION, d1, d2, engine="reference")
            fast = score_matrix(emp, Statistic.MUTUAL_INFORMATION, d1, d2, engine="fast")
            assert fast.meta["engine"] == "fast"
            assert np.abs(ref.scores - fast.scores).max() <= 1e-12
            for (i, j), (s_set, t_set) in fast.witnesses.items():
                cond = tuple(sorted(s_set + t_set))
                assert delta(emp, Statistic.MUTUAL_INFORMATION, i, j, cond) == pytest.approx(
                    fast.scores[i, j], abs=1e-12
                )


def test_fast_engine_refuses_prob_statistic():
    emp = EmpiricalDist(exact_sample(xor_triangle(0.1), 500, seed=0))
    with pytest.raises(ValueError):
        score_matrix(emp, Statistic.PROBABILITY, 1, 0, engine="fast")


def test_score_matrix_csv_round_trip(tmp_path):
    t = exact_joint(chain3())
    mat = score_matrix(t, Statistic.MUTUAL_INFORMATION, 1, 1, engine="reference")
    path = tmp_path / "scores.csv"
    mat.to_csv(path)
    back = ScoreMatrix.from_csv(path)
    assert back.p == 3
    assert np.array_equal(back.scores, mat.scores)  # repr round-trip is exact
    assert back.witnesses == mat.witnesses
    with pytest.raises(ValueError):
        ScoreMatrix(2, np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_cache_counts():
    t = exact_joint(chain3())
    res = maxmin_score(t, Statistic.MUTUAL_INFORMATION, 0, 1, 1, 1, prune=False)
    # S=(): T in {(), (2,)}; S=(2,): T only (); 3 combos but 2 distinct C sets
    assert res.combinations == 3
    assert res.delta_evals == 2


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_scores_nonnegative_and_symmetric(seed):
    rng = np.random.default_rng(seed)
    g = random_bounded_degree_graph(5, 3, 2, rng)
    m = random_model(g, 0.2, 0.8, seed=seed)
    t = exact_joint(m)
    kind = Statistic.PROBABILITY if seed % 2 else Statistic.MUTUAL_INFORMATION
    mat = score_matrix(t, kind, 1, 1, engine="reference")
    assert (mat.pair_values() >= 0).all()
    assert np.allclose(mat.scores, mat.scores.T)
    assert np.diag(mat.scores).sum() == 0.0
