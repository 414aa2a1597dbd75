"""Experiment pipeline: graph -> couplings -> samples -> scores -> accuracy.

Runs the full recovery loop over a grid of sample sizes and search depths,
with three interchangeable threshold policies (truth-informed oracle, KDE
valley heuristic, fixed), and writes deterministic CSV/SVG reports.

Determinism contract: a spec plus its master seed pins every random draw, so
the emitted artifacts are byte-identical across invocations. Wall-clock
fields live only in the in-memory report, never in the artifacts.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fastscore
from .citest import ScoreMatrix, Statistic, score_matrix
from .estimate import EmpiricalDist
from .graph import ErdosRenyi, Graph, GraphKind, generate, kind_from_json, kind_to_json
from .learner import evaluate
from .model import IsingModel, SampleSet, exact_joint, exact_sample, gibbs_sample, random_model

KDE_GRID_POINTS = 512
KDE_GRID_STRETCH = 1.05
THRESHOLD_POLICIES = ("oracle", "kde", "fixed")


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce one accuracy-vs-samples experiment."""

    graph: GraphKind
    jmin: float
    jmax: float
    sample_sizes: tuple[int, ...]
    runs: int
    dpairs: tuple[tuple[int, int], ...]
    test: Statistic = Statistic.MUTUAL_INFORMATION
    master_seed: int = 0
    threshold_policy: str = "oracle"
    threshold_epsilon: Optional[float] = None
    ferromagnetic: bool = False
    sampler: str = "gibbs"
    burnin: int = 200
    thin: int = 5

    def __post_init__(self):
        self.sample_sizes = tuple(int(n) for n in self.sample_sizes)
        self.dpairs = tuple((int(a), int(b)) for a, b in self.dpairs)
        if isinstance(self.test, str):
            self.test = Statistic.parse(self.test)
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.sample_sizes:
            raise ValueError("at least one sample size is required")
        if any(a >= b for a, b in zip(self.sample_sizes, self.sample_sizes[1:])):
            raise ValueError("sample sizes must be strictly ascending")
        if not self.dpairs:
            raise ValueError("at least one (d1, d2) pair is required")
        if self.threshold_policy not in THRESHOLD_POLICIES:
            raise ValueError(f"threshold_policy must be one of {THRESHOLD_POLICIES}")
        if self.threshold_policy == "fixed" and self.threshold_epsilon is None:
            raise ValueError("fixed threshold policy needs threshold_epsilon")
        if self.sampler not in ("gibbs", "exact"):
            raise ValueError("sampler must be 'gibbs' or 'exact'")


def spec_to_json(spec: ExperimentSpec) -> dict:
    threshold: dict = {"policy": spec.threshold_policy}
    if spec.threshold_epsilon is not None:
        threshold["epsilon"] = spec.threshold_epsilon
    return {
        "graph": kind_to_json(spec.graph),
        "jmin": spec.jmin,
        "jmax": spec.jmax,
        "sample_sizes": list(spec.sample_sizes),
        "runs": spec.runs,
        "dpairs": [list(pair) for pair in spec.dpairs],
        "test": spec.test.value,
        "master_seed": spec.master_seed,
        "threshold": threshold,
        "ferromagnetic": spec.ferromagnetic,
        "sampler": spec.sampler,
        "burnin": spec.burnin,
        "thin": spec.thin,
    }


def spec_from_json(obj: dict) -> ExperimentSpec:
    threshold = obj.get("threshold", {"policy": "oracle"})
    return ExperimentSpec(
        graph=kind_from_json(obj["graph"]),
        jmin=float(obj["jmin"]),
        jmax=float(obj["jmax"]),
        sample_sizes=tuple(obj["sample_sizes"]),
        runs=int(obj["runs"]),
        dpairs=tuple(tuple(pair) for pair in obj["dpairs"]),
        test=Statistic.parse(obj.get("test", "mi")),
        master_seed=int(obj.get("master_seed", 0)),
        threshold_policy=threshold.get("policy", "oracle"),
        threshold_epsilon=threshold.get("epsilon"),
        ferromagnetic=bool(obj.get("ferromagnetic", False)),
        sampler=obj.get("sampler", "gibbs"),
        burnin=int(obj.get("burnin", 200)),
        thin=int(obj.get("thin", 5)),
    )


def save_spec(spec: ExperimentSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_json(spec), fh, indent=2)
        fh.write("\n")


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        return spec_from_json(json.load(fh))


@dataclass
class ReportRow:
    n: int
    d1: int
    d2: int
    mean_acc: float
    std_acc: float
    runs: int
    mean_threshold: float = math.nan
    seconds: float = 0.0


@dataclass
class ExperimentReport:
    rows: list[ReportRow] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def threshold_graph(scores: ScoreMatrix, epsilon: float) -> Graph:
    """Edge iff score strictly exceeds epsilon."""
    edges = [
        (i, j)
        for i in range(scores.p)
        for j in range(i + 1, scores.p)
        if scores.scores[i, j] > epsilon
    ]
    return Graph(scores.p, edges)


def oracle_threshold(scores: ScoreMatrix, truth: Graph) -> tuple[float, int]:
    """Error-minimizing cut given the true graph; ties go to the smaller cut.

    Candidate cuts are the midpoints between consecutive distinct scores plus
    one cut below everything and one above everything, which is exhaustive:
    every achievable edge/non-edge split appears among them.
    """
    if scores.p != truth.p:
        raise ValueError(f"node counts differ: {scores.p} vs {truth.p}")
    iu = np.triu_indices(scores.p, k=1)
    vals = scores.scores[iu]
    is_edge = np.fromiter(
        (truth.has_edge(int(i), int(j)) for i, j in zip(*iu)), dtype=bool, count=len(vals)
    )
    uniq = np.unique(vals)
    cands = [uniq[0] / 2.0 if uniq[0] > 0 else uniq[0] - 1.0]
    cands.extend(((uniq[:-1] + uniq[1:]) / 2.0).tolist())
    cands.append(float(uniq[-1]) + 1.0)
    best_eps = best_err = None
    for eps in cands:
        err = int(((vals > eps) != is_edge).sum())
        if best_err is None or err < best_err:
            best_eps, best_err = float(eps), err
    return best_eps, best_err


def _kde_density(vals: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Gaussian kernel density with the normal-reference bandwidth
    1.06 * std * m**(-1/5); a tiny floor keeps degenerate samples finite."""
    vals = np.asarray(vals, dtype=float)
    m = len(vals)
    bw = 1.06 * float(np.std(vals)) * m ** (-0.2)
    bw = max(bw, 1e-12)
    z = (grid[:, None] - vals[None, :]) / bw
    return np.exp(-0.5 * z * z).sum(axis=1) / (m * bw * math.sqrt(2.0 * math.pi))


def _first_valley(density: np.ndarray) -> Optional[int]:
    """Index of the first local minimum right of the leftmost mode.

    Plateaus count as continued climb/descent, so the returned index is the
    right edge of a flat valley floor. None when the density never turns back
    up (no interior minimum).
    """
    k, last = 0, len(density) - 1
    while k < last and density[k + 1] >= density[k]:
        k += 1
    while k < last and density[k + 1] <= density[k]:
        k += 1
    return None if k == last else k


def kde_threshold(scores: ScoreMatrix) -> float:
    """Threshold at the right boundary of the score density's spike near 0.

    Density on 512 points over [0, 1.05 * max score]; the cut is the first
    local minimum right of the leftmost mode, or the 75th percentile of the
    scores when the density has no interior minimum. Needs >= 10 scores.
    """
    vals = scores.pair_values()
    if len(vals) < 10:
        raise ValueError(f"need at least 10 scores for the density cut, got {len(vals)}")
    top = float(vals.max())
    if top <= 0.0:
        return float(np.percentile(vals, 75))
    grid = np.linspace(0.0, top * KDE_GRID_STRETCH, KDE_GRID_POINTS)
    valley = _first_valley(_kde_density(vals, grid))
    if valley is None:
        return float(np.percentile(vals, 75))
    return float(grid[valley])


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(((y[:-1] + y[1:]) / 2.0 * np.diff(x)).sum())


def _density_change(a_vals: np.ndarray, b_vals: np.ndarray) -> float:
    """L1 distance between the two score densities on a shared grid."""
    top = max(float(a_vals.max()), float(b_vals.max()))
    if top <= 0.0:
        return 0.0
    grid = np.linspace(0.0, top * KDE_GRID_STRETCH, KDE_GRID_POINTS)
    return _trapezoid(np.abs(_kde_density(a_vals, grid) - _kde_density(b_vals, grid)), grid)


def select_d1d2(
    backend,
    kind: Statistic = Statistic.MUTUAL_INFORMATION,
    max_steps: int = 4,
    tol: float = 0.05,
) -> tuple[int, int, list[tuple[int, int]]]:
    """Greedy search-depth selection by watching the score density move.

    From (0, 0), each step scores both (d1+1, d2) and (d1, d2+1), measures
    how far each moves the density from the current one, and takes the larger
    move (d1 on ties); stops when both moves change the density by less than
    `tol` or after max_steps. Returns the chosen sizes plus the visited trace.
    """
    current = (0, 0)
    trace = [current]
    cur_vals = score_matrix(backend, kind, *current).pair_values()
    for _ in range(max_steps):
        moves = [(current[0] + 1, current[1]), (current[0], current[1] + 1)]
        vals = [score_matrix(backend, kind, d1, d2).pair_values() for d1, d2 in moves]
        changes = [_density_change(cur_vals, v) for v in vals]
        if max(changes) < tol:
            break
        pick = 0 if changes[0] >= changes[1] else 1
        current = moves[pick]
        cur_vals = vals[pick]
        trace.append(current)
    return current[0], current[1], trace


def _spec_digest(spec: ExperimentSpec) -> str:
    blob = json.dumps(spec_to_json(spec), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _draw_samples(model: IsingModel, n: int, spec: ExperimentSpec, seed) -> SampleSet:
    if spec.sampler == "exact":
        return exact_sample(exact_joint(model), n, seed=seed)
    return gibbs_sample(model, n, burnin=spec.burnin, thin=spec.thin, seed=seed)


def _score_all(emp: EmpiricalDist, spec: ExperimentSpec, scorer_box: list) -> dict:
    """Score matrices for every configured (d1, d2), sharing work when the
    batched engine applies (one entropy table serves all depths)."""
    fast_ok = spec.test is Statistic.MUTUAL_INFORMATION and all(
        fastscore.supports(emp, d1, d2) for d1, d2 in spec.dpairs
    )
    if fast_ok:
        if not scorer_box:
            scorer_box.append(fastscore.FastScorer(emp.p, spec.dpairs, q=emp.q))
        raw = scorer_box[0].score_all(emp)
        return {
            (d1, d2): ScoreMatrix(
                emp.p,
                raw[(d1, d2)][0],
                spec.test,
                d1,
                d2,
                raw[(d1, d2)][1],
                meta={"engine": "fast"},
            )
            for d1, d2 in spec.dpairs
        }
    return {
        (d1, d2): score_matrix(emp, spec.test, d1, d2) for d1, d2 in spec.dpairs
    }


def _pick_threshold(spec: ExperimentSpec, mat: ScoreMatrix, truth: Graph) -> float:
    if spec.threshold_policy == "oracle":
        return oracle_threshold(mat, truth)[0]
    if spec.threshold_policy == "kde":
        return kde_threshold(mat)
    return float(spec.threshold_epsilon)


def run_experiment(spec: ExperimentSpec, out_dir=None) -> ExperimentReport:
    """Execute one ExperimentSpec and aggregate pair accuracies over its runs.

    Per run: draw the graph (fixed kinds once, random kinds fresh), draw
    couplings, sample once at the largest n and reuse prefixes for smaller n,
    score every (d1, d2), threshold, and compare to the truth. When out_dir
    is given, per-run score CSVs land there alongside nothing else; report
    artifacts are the caller's job (see emit_report).
    """
    started = time.perf_counter()
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    master = np.random.SeedSequence(spec.master_seed)
    n_max = max(spec.sample_sizes)
    fixed_graph = None if isinstance(spec.graph, ErdosRenyi) else generate(spec.graph)
    scorer_box: list = []
    accs = defaultdict(list)
    thresholds = defaultdict(list)
    seconds = defaultdict(float)
    for run_idx, seq in enumerate(master.spawn(spec.runs)):
        graph_seed, model_seed, sample_seed = seq.spawn(3)
        g = fixed_graph if fixed_graph is not None else generate(spec.graph, graph_seed)
        model = random_model(
            g, spec.jmin, spec.jmax, ferromagnetic=spec.ferromagnetic, seed=model_seed
        )
        full = _draw_samples(model, n_max, spec, sample_seed)
        for n in spec.sample_sizes:
            emp = EmpiricalDist(SampleSet(full.data[:n], full.values))
            t0 = time.perf_counter()
            mats = _score_all(emp, spec, scorer_box)
            shared = (time.perf_counter() - t0) / len(mats)
            for (d1, d2), mat in mats.items():
                t1 = time.perf_counter()
                eps = _pick_threshold(spec, mat, g)
                learned = threshold_graph(mat, eps)
                acc = evaluate(learned, g)["pair_accuracy"]
                key = (n, d1, d2)
                accs[key].append(acc)
                thresholds[key].append(eps)
                seconds[key] += shared + (time.perf_counter() - t1)
                if out_dir is not None:
                    mat.to_csv(
                        os.path.join(
                            out_dir, f"scores_run{run_idx:03d}_n{n}_d1{d1}_d2{d2}.csv"
                        )
                    )
    rows = [
        ReportRow(
            n=n,
            d1=d1,
            d2=d2,
            mean_acc=float(np.mean(accs[(n, d1, d2)])),
            std_acc=float(np.std(accs[(n, d1, d2)])),
            runs=spec.runs,
            mean_threshold=float(np.mean(thresholds[(n, d1, d2)])),
            seconds=seconds[(n, d1, d2)],
        )
        for n in spec.sample_sizes
        for d1, d2 in sorted(spec.dpairs)
    ]
    meta = {
        "master_seed": spec.master_seed,
        "spec_sha256": _spec_digest(spec),
        "seconds": time.perf_counter() - started,
    }
    return ExperimentReport(rows, meta)


REPORT_COLUMNS = ("n", "d1", "d2", "mean_acc", "std_acc", "runs")


def emit_report(report: ExperimentReport, path) -> None:
    """Write report.csv / report.svg style artifacts; format from the suffix.

    The CSV holds exactly the deterministic columns (n, d1, d2, mean_acc,
    std_acc, runs); the SVG plots accuracy vs n, one series per (d1, d2),
    with hash salt and date stripped so bytes reproduce.
    """
    path = str(path)
    if path.endswith(".csv"):
        lines = [",".join(REPORT_COLUMNS)]
        for r in report.rows:
            lines.append(
                f"{r.n},{r.d1},{r.d2},{repr(float(r.mean_acc))},{repr(float(r.std_acc))},{r.runs}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        return
    if path.endswith(".svg"):
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        with plt.rc_context({"svg.hashsalt": "0"}):
            fig, ax = plt.subplots(figsize=(6.0, 4.0))
            series = sorted({(r.d1, r.d2) for r in report.rows})
            for d1, d2 in series:
                pts = sorted((r.n, r.mean_acc) for r in report.rows if (r.d1, r.d2) == (d1, d2))
                ax.plot(
                    [x for x, _ in pts],
                    [y for _, y in pts],
                    marker="o",
                    label=f"d1={d1}, d2={d2}",
                )
            ax.set_xlabel("samples")
            ax.set_ylabel("pair accuracy")
            ax.legend()
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
        return
    raise ValueError(f"unsupported report extension on {path!r} (want .csv or .svg)")


def parse_report(path) -> ExperimentReport:
    """Read back the numeric fields of an emitted CSV report."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != REPORT_COLUMNS:
            raise ValueError(f"unexpected report header {header}")
        for line in fh:
            if not line.strip():
                continue
            n, d1, d2, mean_acc, std_acc, runs = line.strip().split(",")
            rows.append(
                ReportRow(int(n), int(d1), int(d2), float(mean_acc), float(std_acc), int(runs))
            )
    return ExperimentReport(rows)
