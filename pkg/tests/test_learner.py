import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_bounded_degree_graph
from mrfstruct.bounds import ferro_epsilons
from mrfstruct.citest import Statistic
from mrfstruct.estimate import EmpiricalDist
from mrfstruct.graph import Graph
from mrfstruct.learner import (
    LearnerConfig,
    candidate_sets,
    cond_st,
    cond_st_pre,
    evaluate,
    ferromagnetic_config,
    learn,
)
from mrfstruct.model import exact_joint, exact_sample, random_model, xor_triangle


def test_config_validation():
    with pytest.raises(ValueError):
        LearnerConfig(d1=-1, d2=0, epsilon=0.1)
    with pytest.raises(ValueError):
        LearnerConfig(d1=1, d2=0, epsilon=0.0)
    with pytest.raises(ValueError):
        LearnerConfig(d1=1, d2=0, epsilon=0.1, preprocess=True)
    ok = LearnerConfig(d1=1, d2=0, epsilon=0.1, preprocess=True, epsilon_prime=0.2)
    assert ok.epsilon_prime == 0.2


def test_chain_recovery_exact_backend():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    m = random_model(g, 0.4, 0.6, seed=1)
    t = exact_joint(m)
    res = cond_st(t, LearnerConfig(d1=1, d2=0, epsilon=1e-4))
    assert res.graph == g
    assert res.counters["pairs"] == 6
    assert res.scores.meta["decision_grade"] is True


def test_xor_needs_propping_set():
    t = xor_triangle(0.1)
    cfg_blind = LearnerConfig(d1=1, d2=0, epsilon=0.02)
    assert cond_st(t, cfg_blind).graph.n_edges == 0
    cfg = LearnerConfig(d1=1, d2=1, epsilon=0.02)
    full = cond_st(t, cfg).graph
    assert full.n_edges == 3  # every pair looks dependent once propped


def test_decision_scores_split():
    # non-edge scores are exact (<= eps/2), edge scores exceed eps/2
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    m = random_model(g, 0.4, 0.6, seed=7)
    t = exact_joint(m)
    cfg = LearnerConfig(d1=1, d2=1, epsilon=1e-3)
    res = cond_st(t, cfg)
    assert res.graph == g
    for i in range(4):
        for j in range(i + 1, 4):
            if g.has_edge(i, j):
                assert res.scores.scores[i, j] > cfg.epsilon / 2
            else:
                assert res.scores.scores[i, j] <= cfg.epsilon / 2


def test_epsilon_monotonicity():
    # growing epsilon can only remove edges
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    m = random_model(g, 0.3, 0.6, seed=3)
    t = exact_joint(m)
    previous = None
    for eps in (1e-5, 1e-3, 0.05, 0.5, 2.0):
        learned = set(cond_st(t, LearnerConfig(1, 1, eps)).graph.edges)
        if previous is not None:
            assert learned <= previous
        previous = learned


def test_candidate_sets_two_node():
    g = Graph(2, [(0, 1)])
    m = random_model(g, 0.5, 0.5, seed=0)
    t = exact_joint(m)
    # unconditioned spread is tanh(2J)/... comfortably above 0.2
    cands = candidate_sets(t, 0.4)
    assert cands == {0: (1,), 1: (0,)}
    with pytest.raises(ValueError):
        candidate_sets(t, 0.0)


def test_candidate_sets_screen_blocks_xor():
    t = xor_triangle(0.1)
    cands = candidate_sets(t, 0.1)
    assert cands == {0: (), 1: (), 2: ()}  # pairwise the variables look independent


def test_cond_st_pre_requires_flag():
    t = xor_triangle(0.1)
    with pytest.raises(ValueError):
        cond_st_pre(t, LearnerConfig(1, 0, 0.1))


def test_preprocessed_matches_plain_when_screen_keeps_all():
    rng = np.random.default_rng(11)
    for trial in range(5):
        g = random_bounded_degree_graph(5, 3, 2, rng)
        m = random_model(g, 0.4, 0.7, seed=trial)
        t = exact_joint(m)
        plain = cond_st(t, LearnerConfig(1, 1, 1e-3))
        # tiny screening threshold: every pair survives, spaces become full
        pre = cond_st_pre(
            t, LearnerConfig(1, 1, 1e-3, preprocess=True, epsilon_prime=1e-9)
        )
        assert pre.candidate_sets is not None
        assert all(len(v) == 4 for v in pre.candidate_sets.values())
        assert set(pre.graph.edges) == set(plain.graph.edges)


def test_ferromagnetic_preset_recovers_cycle():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    m = random_model(g, 0.4, 0.6, ferromagnetic=True, seed=5)
    t = exact_joint(m)
    cfg = ferromagnetic_config(degree=2, jmin=0.4, jmax=0.6)
    assert cfg.d2 == 0 and cfg.test is Statistic.PROBABILITY and cfg.preprocess
    eps, eps_prime = ferro_epsilons(2, 0.4, 0.6)
    assert (cfg.epsilon, cfg.epsilon_prime) == (eps, eps_prime)
    res = learn(t, cfg)
    assert res.graph == g
    # the screen must keep true neighbors
    for i, j in g.edges:
        assert j in res.candidate_sets[i] and i in res.candidate_sets[j]


def test_learn_dispatch():
    t = xor_triangle(0.1)
    plain = learn(t, LearnerConfig(1, 1, 0.02))
    pre = learn(t, LearnerConfig(1, 1, 0.02, preprocess=True, epsilon_prime=0.1))
    assert plain.candidate_sets is None
    assert pre.candidate_sets is not None
    # the screen kills every pair here, so nothing is ever tested
    assert pre.graph.n_edges == 0
    assert pre.counters["combinations"] == 0


def test_sampled_backend_recovery():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    m = random_model(g, 0.5, 0.7, seed=2)
    emp = EmpiricalDist(exact_sample(exact_joint(m), 8000, seed=4))
    res = cond_st(emp, LearnerConfig(d1=1, d2=0, epsilon=0.04))
    assert res.graph == g


def test_evaluate_arithmetic():
    truth = Graph(4, [(0, 1), (1, 2)])
    learned = Graph(4, [(0, 1), (2, 3)])
    out = evaluate(learned, truth)
    assert out["edge_errors"] == 1  # missed (1, 2)
    assert out["nonedge_errors"] == 1  # invented (2, 3)
    assert out["pair_accuracy"] == pytest.approx(4 / 6)
    assert evaluate(truth, truth)["pair_accuracy"] == 1.0
    with pytest.raises(ValueError):
        evaluate(Graph(3, []), truth)


def test_counters_cover_both_directions():
    t = xor_triangle(0.1)
    res = learn(t, LearnerConfig(1, 1, 0.02))
    assert res.counters["pairs"] == 3
    assert res.counters["combinations"] > 0
    assert res.counters["delta_evals"] > 0
    assert res.counters["seconds"] >= 0.0


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=10, deadline=None)
def test_exact_backend_learner_is_sound(seed):
    # with a tiny epsilon on an exact table, learned edges are always a
    # superset of the truth (a separator can never hide a true edge)
    rng = np.random.default_rng(seed)
    g = random_bounded_degree_graph(5, 3, int(rng.integers(0, 3)), rng)
    m = random_model(g, 0.4, 0.7, seed=seed)
    t = exact_joint(m)
    res = cond_st(t, LearnerConfig(2, 0, 1e-7))
    assert set(g.edges) <= set(res.graph.edges)
