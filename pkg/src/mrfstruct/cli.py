"""Command-line front end.

Subcommands cover the whole pipeline: graph and model generation, sampling,
pairwise dependence scoring, structure learning, closed-form bound evaluation,
walk-tree identity checks, batch experiments, and threshold selection.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import bounds as bounds_mod
from .citest import ScoreMatrix, Statistic, score_matrix
from .estimate import EmpiricalDist
from .graph import ErdosRenyi, Grid4, Grid8, generate, load_graph, save_graph
from .harness import (
    emit_report,
    kde_threshold,
    load_spec,
    oracle_threshold,
    run_experiment,
)
from .learner import LearnerConfig, evaluate, learn
from .model import (
    exact_joint,
    exact_sample,
    gibbs_sample,
    load_model,
    load_samples,
    random_model,
    save_model,
    save_samples,
)
from .sawtree import verify_saw_identity


def _cmd_gen_graph(args) -> int:
    if args.kind in ("grid4", "grid8"):
        if args.rows is None or args.cols is None:
            raise SystemExit("grid kinds need --rows and --cols")
        kind = (Grid4 if args.kind == "grid4" else Grid8)(args.rows, args.cols)
    else:
        if args.p is None or args.c is None:
            raise SystemExit("er kind needs --p and --c")
        kind = ErdosRenyi(args.p, args.c)
    g = generate(kind, seed=args.seed)
    save_graph(g, args.out)
    print(f"wrote {args.out} (p={g.p}, edges={len(g.edges)})")
    return 0


def _cmd_gen_model(args) -> int:
    g = load_graph(args.graph)
    m = random_model(g, args.jmin, args.jmax, ferromagnetic=args.ferro, seed=args.seed)
    save_model(m, args.out)
    print(f"wrote {args.out} (p={g.p}, edges={len(g.edges)})")
    return 0


def _cmd_sample(args) -> int:
    m = load_model(args.model)
    if args.exact:
        samples = exact_sample(exact_joint(m), args.n, seed=args.seed)
    else:
        samples = gibbs_sample(m, args.n, burnin=args.burnin, thin=args.thin, seed=args.seed)
    save_samples(samples, args.out, seed=args.seed)
    print(f"wrote {args.out} ({samples.n} x {samples.p})")
    return 0


def _load_backend(args):
    """Samples file -> plug-in backend; --exact plus model -> enumerated table."""
    if args.exact:
        if args.model is None:
            raise SystemExit("--exact requires --model")
        return exact_joint(load_model(args.model))
    if args.samples is None:
        raise SystemExit("need --samples FILE (or --exact --model FILE)")
    return EmpiricalDist(load_samples(args.samples))


def _cmd_scores(args) -> int:
    backend = _load_backend(args)
    mat = score_matrix(backend, Statistic.parse(args.test), args.d1, args.d2)
    mat.to_csv(args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_learn(args) -> int:
    backend = _load_backend(args)
    config = LearnerConfig(
        d1=args.d1,
        d2=args.d2,
        epsilon=args.epsilon,
        test=Statistic.parse(args.test),
        preprocess=args.pre,
        epsilon_prime=args.epsilon_prime,
    )
    result = learn(backend, config)
    save_graph(result.graph, args.out)
    if args.scores_out:
        result.scores.to_csv(args.scores_out)
    if args.truth:
        record = evaluate(result.graph, load_graph(args.truth))
        print(json.dumps(record))
    return 0


def _cmd_bounds(args) -> int:
    out: dict = {"regime": args.regime}
    params = bounds_mod.ModelParams(
        d=args.d,
        jmin=args.jmin,
        jmax=args.jmax,
        p=args.p,
        c=args.c,
        d1=args.d1,
        d2=args.d2,
        k=args.k,
        alpha_conf=args.alpha,
        epsilon=args.epsilon,
        big_l=args.big_l,
    )
    if args.d is not None and args.jmax is not None and args.d >= 2:
        beta, alpha = bounds_mod.decay_params(args.d, args.jmax)
        out["beta"] = beta
        out["alpha"] = alpha
    if args.d is not None and args.jmin is not None and args.jmax is not None:
        out["bdd_epsilon"] = bounds_mod.bdd_epsilon(args.jmin, args.jmax)
        out["bdd_delta"] = bounds_mod.bdd_delta(args.d, args.jmax)
        eps_f, eps_p = bounds_mod.ferro_epsilons(args.d, args.jmin, args.jmax)
        out["ferro_epsilon"] = eps_f
        out["ferro_epsilon_prime"] = eps_p
        if args.d >= 2:
            a, eps, eps_pr, min_g = bounds_mod.girth_constants(args.d, args.jmin, args.jmax)
            out["girth_a"] = a
            out["girth_epsilon"] = eps
            out["girth_epsilon_prime"] = eps_pr
            out["min_girth"] = min_g
            if args.d1 is not None and args.d2 is not None:
                a, eps, min_h = bounds_mod.sparse_loose_constants(
                    args.d, args.jmin, args.jmax, args.d1, args.d2
                )
                out["sparse_loose_a"] = a
                out["sparse_loose_epsilon"] = eps
                out["min_h"] = min_h
    if args.p is not None and args.c is not None and args.jmax is not None and args.k is not None:
        alpha, gamma_p, kappa = bounds_mod.random_graph_params(args.p, args.c, args.jmax, args.k)
        out["random_alpha"] = alpha
        out["gamma_p"] = gamma_p
        out["kappa"] = kappa
    if args.regime is not None:
        gamma, n_min = bounds_mod.sample_size(args.regime, params)
        out["gamma"] = gamma
        out["n_min"] = n_min
    print(json.dumps(out, indent=2))
    return 0


def _parse_nodes(text: Optional[str]) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(v) for v in text.split(";") if v != "")


def _cmd_verify_saw(args) -> int:
    g = load_graph(args.graph)
    m = load_model(args.model)
    ordering = _parse_nodes(args.ordering) or None
    dev = verify_saw_identity(
        g, m, args.root, _parse_nodes(args.s), trials=args.trials, ordering=ordering
    )
    print(repr(dev))
    return 0


def _cmd_experiment(args) -> int:
    spec = load_spec(args.spec)
    report = run_experiment(spec, out_dir=args.out_dir)
    csv_path = os.path.join(args.out_dir, "report.csv")
    svg_path = os.path.join(args.out_dir, "report.svg")
    emit_report(report, csv_path)
    emit_report(report, svg_path)
    print(f"wrote {csv_path} and {svg_path} ({len(report.rows)} rows)")
    return 0


def _cmd_threshold(args) -> int:
    mat = ScoreMatrix.from_csv(args.scores)
    if args.method == "oracle":
        if args.truth is None:
            raise SystemExit("--method oracle requires --truth")
        eps, errors = oracle_threshold(mat, load_graph(args.truth))
        print(json.dumps({"epsilon": eps, "errors": errors}))
    else:
        print(json.dumps({"epsilon": kde_threshold(mat)}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="mrfstruct", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a graph and save it as JSON")
    p.add_argument("--kind", required=True, choices=["grid4", "grid8", "er"])
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("gen-model", help="draw random couplings on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--jmin", type=float, required=True)
    p.add_argument("--jmax", type=float, required=True)
    p.add_argument("--ferro", action="store_true", help="all couplings positive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_model)

    p = sub.add_parser("sample", help="draw samples from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burnin", type=int, default=200)
    p.add_argument("--thin", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="enumerate instead of Gibbs (small p)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("scores", help="max-min dependence score for every pair")
    p.add_argument("--samples")
    p.add_argument("--model")
    p.add_argument("--exact", action="store_true", help="score the enumerated distribution")
    p.add_argument("--test", default="mi", choices=["mi", "prob"])
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_scores)

    p = sub.add_parser("learn", help="estimate the graph structure")
    p.add_argument("--samples")
    p.add_argument("--model")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--test", default="mi", choices=["mi", "prob"])
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--pre", action="store_true", help="pairwise screening preprocessing")
    p.add_argument("--epsilon-prime", type=float, dest="epsilon_prime")
    p.add_argument("--out", required=True)
    p.add_argument("--scores-out", dest="scores_out")
    p.add_argument("--truth", help="true graph JSON; prints the accuracy record")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("bounds", help="evaluate closed-form constants and sample sizes")
    p.add_argument("--regime", choices=list(bounds_mod.REGIMES))
    p.add_argument("--d", type=int)
    p.add_argument("--jmin", type=float)
    p.add_argument("--jmax", type=float)
    p.add_argument("--p", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--alpha", type=float, default=1.0, help="confidence exponent")
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--k", type=float)
    p.add_argument("--epsilon", type=float, help="caller-chosen threshold (random regimes)")
    p.add_argument("--big-l", type=int, dest="big_l", help="candidate-list size cap")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify-saw", help="walk-tree vs graph conditional identity gap")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--s", default="", help="conditioning nodes, e.g. \"2;5\"")
    p.add_argument("--ordering", help="node permutation, e.g. \"0;2;1\"")
    p.add_argument("--trials", type=int, default=16)
    p.set_defaults(func=_cmd_verify_saw)

    p = sub.add_parser("experiment", help="run an experiment spec end to end")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("threshold", help="pick an edge threshold for a score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--method", required=True, choices=["kde", "oracle"])
    p.add_argument("--truth")
    p.set_defaults(func=_cmd_threshold)

    return root


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
