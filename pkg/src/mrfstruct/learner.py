"""Graph-structure learners built on the max-min dependence search.

Two variants: the plain learner tests every pair against the full search
space; the preprocessed learner first screens each node's candidate
neighbors with the pairwise probability statistic and then restricts both
the pairs tested and the S/T search spaces to those candidates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .bounds import ferro_epsilons
from .citest import MaxMinResult, ScoreMatrix, Statistic, delta, maxmin_score
from .graph import Graph

import numpy as np


@dataclass
class LearnerConfig:
    d1: int
    d2: int
    epsilon: float
    test: Statistic = Statistic.MUTUAL_INFORMATION
    preprocess: bool = False
    epsilon_prime: Optional[float] = None

    def __post_init__(self):
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError("search sizes must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.preprocess and (self.epsilon_prime is None or self.epsilon_prime <= 0):
            raise ValueError("preprocessing requires a positive epsilon_prime")


@dataclass
class LearnResult:
    graph: Graph
    scores: ScoreMatrix
    candidate_sets: Optional[dict[int, tuple[int, ...]]] = None
    counters: dict = field(default_factory=dict)


def ferromagnetic_config(
    degree: int, jmin: float, jmax: float, d1: Optional[int] = None
) -> LearnerConfig:
    """Preset for zero-field ferromagnetic models.

    Positive couplings only reinforce the dependence across an edge, so no
    breaker set is needed (d2 = 0); the decision and screening thresholds are
    the closed-form floors for max degree `degree`. d1 defaults to `degree`.
    """
    epsilon, epsilon_prime = ferro_epsilons(degree, jmin, jmax)
    return LearnerConfig(
        d1=degree if d1 is None else d1,
        d2=0,
        epsilon=epsilon,
        test=Statistic.PROBABILITY,
        preprocess=True,
        epsilon_prime=epsilon_prime,
    )


def candidate_sets(backend, epsilon_prime: float) -> dict[int, tuple[int, ...]]:
    """Per-node candidate neighbors: j makes i's list when the unconditioned
    pairwise probability statistic exceeds epsilon_prime / 2."""
    if epsilon_prime <= 0:
        raise ValueError("epsilon_prime must be positive")
    out = {}
    for i in range(backend.p):
        keep = []
        for j in range(backend.p):
            if j == i:
                continue
            if delta(backend, Statistic.PROBABILITY, i, j, ()) > epsilon_prime / 2:
                keep.append(j)
        out[i] = tuple(keep)
    return out


def _decision_scores(backend, config: LearnerConfig, pair_spaces) -> LearnResult:
    """Shared core: run the threshold-mode search over the given per-pair
    directional spaces and assemble the learned graph."""
    p = backend.p
    threshold = config.epsilon / 2
    scores = np.zeros((p, p))
    witnesses = {}
    edges = []
    combos = 0
    evals = 0
    started = time.perf_counter()
    for i in range(p):
        for j in range(i + 1, p):
            results: list[MaxMinResult] = []
            for root, other in ((i, j), (j, i)):
                space = pair_spaces(root, other)
                if space is None:
                    continue
                results.append(
                    maxmin_score(
                        backend,
                        config.test,
                        root,
                        other,
                        config.d1,
                        config.d2,
                        space=space,
                        threshold=threshold,
                    )
                )
            combos += sum(r.combinations for r in results)
            evals += sum(r.delta_evals for r in results)
            if results:
                top = max(results, key=lambda r: r.score)
                scores[i, j] = scores[j, i] = top.score
                witnesses[(i, j)] = (top.s_witness, top.t_witness)
                if any(not r.decided_nonedge for r in results):
                    edges.append((i, j))
    elapsed = time.perf_counter() - started
    matrix = ScoreMatrix(
        p,
        scores,
        config.test,
        config.d1,
        config.d2,
        witnesses,
        meta={"decision_grade": True, "threshold": threshold},
    )
    counters = {
        "pairs": p * (p - 1) // 2,
        "combinations": combos,
        "delta_evals": evals,
        "seconds": elapsed,
    }
    return LearnResult(Graph(p, edges), matrix, None, counters)


def cond_st(backend, config: LearnerConfig) -> LearnResult:
    """Learn by testing every pair over the full search space.

    A pair is kept as an edge iff no S (|S| <= d1) caps its max-over-T
    statistic at epsilon/2 or below. Scores in the result are decision-grade:
    exact for non-edges, lower bounds for edges (the search stops early once
    a pair's fate is settled).
    """
    everyone = tuple(range(backend.p))

    def pair_spaces(root: int, other: int):
        # One decision per unordered pair; the search strips root/other itself.
        return everyone if root < other else None

    return _decision_scores(backend, config, pair_spaces)


def cond_st_pre(backend, config: LearnerConfig) -> LearnResult:
    """Learn with the correlation-screen preprocessing step.

    Only pairs surviving the screen are tested, each direction searching S/T
    inside the screened candidate list of its root node. A pair is an edge if
    either direction says so; its stored score is the larger directional one.
    """
    if not config.preprocess:
        raise ValueError("config.preprocess must be set for cond_st_pre")
    cands = candidate_sets(backend, config.epsilon_prime)

    def pair_spaces(root: int, other: int):
        if other not in cands[root]:
            return None
        return tuple(v for v in cands[root] if v != other)

    result = _decision_scores(backend, config, pair_spaces)
    result.candidate_sets = cands
    return result


def learn(backend, config: LearnerConfig) -> LearnResult:
    """Dispatch to the plain or preprocessed learner per the config."""
    return cond_st_pre(backend, config) if config.preprocess else cond_st(backend, config)


def evaluate(learned: Graph, truth: Graph) -> dict:
    """Pairwise classification quality of a learned graph against the truth.

    pair_accuracy counts all node pairs (edges and non-edges) classified
    correctly, over p choose 2; edge_errors are missed true edges and
    nonedge_errors are spurious ones.
    """
    if learned.p != truth.p:
        raise ValueError(f"node counts differ: {learned.p} vs {truth.p}")
    learned_set = set(learned.edges)
    truth_set = set(truth.edges)
    edge_errors = len(truth_set - learned_set)
    nonedge_errors = len(learned_set - truth_set)
    pairs = truth.p * (truth.p - 1) // 2
    return {
        "pair_accuracy": (pairs - edge_errors - nonedge_errors) / pairs,
        "edge_errors": edge_errors,
        "nonedge_errors": nonedge_errors,
    }
