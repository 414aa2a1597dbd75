"""Structure learning for discrete Markov random fields via max-min
conditional-independence testing, with exact and sampled backends."""

from .citest import MaxMinResult, ScoreMatrix, Statistic, delta, maxmin_score, score_matrix
from .estimate import EmpiricalDist, l1_distance
from .graph import (
    ErdosRenyi,
    Explicit,
    Graph,
    GraphKind,
    Grid4,
    Grid8,
    generate,
    load_graph,
    save_graph,
)
from .harness import (
    ExperimentReport,
    ExperimentSpec,
    emit_report,
    kde_threshold,
    load_spec,
    oracle_threshold,
    parse_report,
    run_experiment,
    save_spec,
    select_d1d2,
    threshold_graph,
)
from .learner import (
    LearnerConfig,
    LearnResult,
    candidate_sets,
    cond_st,
    cond_st_pre,
    evaluate,
    ferromagnetic_config,
    learn,
)
from .model import (
    IsingModel,
    JointTable,
    SampleSet,
    ZeroConditionError,
    exact_joint,
    exact_sample,
    gibbs_sample,
    load_model,
    load_samples,
    random_model,
    save_model,
    save_samples,
    xor_triangle,
)
from .sawtree import SawTree, build_saw_tree, reduce_leaf, tree_cond_prob, verify_saw_identity

__version__ = "0.1.0"

__all__ = [
    "MaxMinResult",
    "ScoreMatrix",
    "Statistic",
    "delta",
    "maxmin_score",
    "score_matrix",
    "EmpiricalDist",
    "l1_distance",
    "ErdosRenyi",
    "Explicit",
    "Graph",
    "GraphKind",
    "Grid4",
    "Grid8",
    "generate",
    "load_graph",
    "save_graph",
    "ExperimentReport",
    "ExperimentSpec",
    "emit_report",
    "kde_threshold",
    "load_spec",
    "oracle_threshold",
    "parse_report",
    "run_experiment",
    "save_spec",
    "select_d1d2",
    "threshold_graph",
    "LearnerConfig",
    "LearnResult",
    "candidate_sets",
    "cond_st",
    "cond_st_pre",
    "evaluate",
    "ferromagnetic_config",
    "learn",
    "IsingModel",
    "JointTable",
    "SampleSet",
    "ZeroConditionError",
    "exact_joint",
    "exact_sample",
    "gibbs_sample",
    "load_model",
    "load_samples",
    "random_model",
    "save_model",
    "save_samples",
    "xor_triangle",
    "SawTree",
    "build_saw_tree",
    "reduce_leaf",
    "tree_cond_prob",
    "verify_saw_identity",
    "__version__",
]
