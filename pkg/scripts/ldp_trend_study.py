#!/usr/bin/env python3
"""Rate-curve study: tail rates of the modified flow against z0^2/sigma_N^2
across a decreasing epsilon ladder, with pilot-tuned threshold.

Example:
    python scripts/ldp_trend_study.py --theta 4.0 --cutoff 16 \
        --eps-list 0.25,0.125,0.0625 --samples 10000,20000,60000 \
        --target-p 0.0025 --seed 2026 --out trend.csv
"""

import argparse

from nlslab.config import ExperimentConfig
from nlslab.ldp import rate_curve, tune_threshold
from nlslab.records import write_records


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theta", type=float, default=4.0)
    ap.add_argument("--cutoff", type=int, default=16)
    ap.add_argument("--eps-list", default="0.25,0.125,0.0625")
    ap.add_argument("--samples", default="10000,20000,60000")
    ap.add_argument("--target-p", type=float, default=2.5e-3)
    ap.add_argument("--pilot-samples", type=int, default=8000)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--out", default="trend.csv")
    args = ap.parse_args()

    eps_list = [float(x) for x in args.eps_list.split(",")]
    samples = [int(x) for x in args.samples.split(",")]
    cfg = ExperimentConfig(
        epsilon=eps_list[-1], theta=args.theta, cutoff=args.cutoff,
        samples=samples[-1], master_seed=args.seed,
    )
    print(f"tuning z0 at eps={eps_list[-1]} for p ~ {args.target_p} ...")
    z0 = tune_threshold("modified", cfg, args.target_p, args.pilot_samples)
    print(f"z0 = {z0:.6f}, reference rate = {z0 * z0 / cfg.sigma2():.6f}")

    curve = rate_curve("modified", eps_list, z0, cfg, samples_list=samples)
    rows = []
    for pt in curve.points:
        e = pt.estimate
        rows.append({
            "eps": pt.epsilon, "z0": z0, "trials": e.trials, "hits": e.hits,
            "p_hat": e.p_hat, "rate": e.rate, "reference": pt.reference,
            "gap": pt.gap, "censored": e.censored,
        })
        print(f"eps={pt.epsilon}: p={e.p_hat:.5f} rate={e.rate:.4f} gap={pt.gap:+.4f}")
    write_records(rows, "csv", args.out, [f"master_seed={args.seed}", f"theta={args.theta}"])
    print(f"gap shrinks toward small eps: {curve.gaps_shrink}; wrote {args.out}")


if __name__ == "__main__":
    main()
