#!/usr/bin/env python3
"""End-to-end success/attrition fractions for the three solvers.

Runs seeded generate+solve batches and prints, per configuration, the
verdict breakdown, the per-stage attrition, and the non-Failure fraction
with its 95% Wilson interval.  Parallelism: --jobs or env TISO_JOBS.

Example:
    python3 scripts/success_fractions.py --trials 500 --jobs 4
"""

import argparse
import json
import os

from tiso.cli import ExperimentConfig, run_experiment

CONFIGS = [
    # (problem, n, p, mode)
    ("algiso", 24, 5, "unrelated"),
    ("algiso", 10, 5, "planted"),
    ("mcc", 10, 5, "planted"),
    ("mcc", 10, 7, "planted"),
    ("t4", 3, 2, "planted_corank(3)"),
    ("t4", 3, 2, "unrelated"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=0, help="0 = env TISO_JOBS or 1")
    ap.add_argument("--json", action="store_true", help="dump full reports")
    args = ap.parse_args()

    for problem, n, p, mode in CONFIGS:
        jobs = args.jobs or int(os.environ.get("TISO_JOBS", "1"))
        cfg = ExperimentConfig(problem=problem, n=n, p=p, mode=mode,
                               trials=args.trials, master_seed=args.seed,
                               jobs=jobs)
        report = run_experiment(cfg)
        r = report["results"]
        nf = r["non_failure"]
        print(f"{problem:7s} n={n:3d} q={p} mode={mode:18s} "
              f"verdicts={r['verdicts']} "
              f"non-failure={nf['fraction']:.4f} "
              f"wilson95=[{nf['wilson95'][0]:.4f}, {nf['wilson95'][1]:.4f}] "
              f"median={report['timing']['median_wall_ms']:.1f}ms")
        attr = {s: d for s, d in r["stage_attrition"].items()
                if d["failure"] or d["not_isomorphic"]}
        print(f"        attrition: {attr}")
        if args.json:
            print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
