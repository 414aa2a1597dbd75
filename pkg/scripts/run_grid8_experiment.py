#!/usr/bin/env python3
"""Accuracy-vs-samples curves on an eight-neighbor grid.

Defaults reproduce the desk-scale 5x5 run: the probe budget (d2=1) should
visibly beat d2=0 at n=1000, while deepening the separator search from d1=2
to d1=3 should not move the curve.
"""

import argparse
import os

from mrfstruct.graph import Grid8
from mrfstruct.harness import ExperimentSpec, emit_report, run_experiment, save_spec


def parse_sizes(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(";") if v)


def parse_dpairs(text: str) -> tuple[tuple[int, int], ...]:
    return tuple(tuple(int(v) for v in part.split(",")) for part in text.split(";") if part)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=5)
    ap.add_argument("--cols", type=int, default=5)
    ap.add_argument("--jmin", type=float, default=0.4)
    ap.add_argument("--jmax", type=float, default=0.6)
    ap.add_argument("--sizes", default="400;600;800;1000", help="semicolon-separated n ladder")
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--dpairs", default="2,0;2,1;3,1", help="e.g. \"2,0;2,1\"")
    ap.add_argument("--threshold", default="oracle", choices=["oracle", "kde"])
    ap.add_argument("--seed", type=int, default=86)
    ap.add_argument("--out-dir", default="out/grid8")
    args = ap.parse_args()

    spec = ExperimentSpec(
        graph=Grid8(args.rows, args.cols),
        jmin=args.jmin,
        jmax=args.jmax,
        sample_sizes=parse_sizes(args.sizes),
        runs=args.runs,
        dpairs=parse_dpairs(args.dpairs),
        threshold_policy=args.threshold,
        master_seed=args.seed,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    save_spec(spec, os.path.join(args.out_dir, "spec.json"))
    report = run_experiment(spec, out_dir=args.out_dir)
    emit_report(report, os.path.join(args.out_dir, "report.csv"))
    emit_report(report, os.path.join(args.out_dir, "report.svg"))
    for row in report.rows:
        print(f"n={row.n:5d} d1={row.d1} d2={row.d2} acc={row.mean_acc:.4f} +-{row.std_acc:.4f}")
    print(f"wrote {args.out_dir}/report.csv and report.svg ({report.meta['seconds']:.0f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
