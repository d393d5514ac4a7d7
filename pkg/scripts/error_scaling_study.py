#!/usr/bin/env python3
"""How close the nonlinear flow stays to the exactly-solvable modified flow:
median running-max H^s distance over seeds, per epsilon, with the
eps^(1/2 - 0.1) normalization column.

Example:
    python scripts/error_scaling_study.py --eps-list 0.2,0.1 --samples 100 \
        --cutoff 64 --s 0.625 --seed 2026 --out scaling.csv
"""

import argparse

from nlslab.config import ExperimentConfig
from nlslab.ldp import error_scaling_study
from nlslab.records import write_records


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps-list", default="0.2,0.1")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--theta", type=float, default=0.25)
    ap.add_argument("--cutoff", type=int, default=64)
    ap.add_argument("--s", type=float, default=0.625)
    ap.add_argument("--dt", type=float, default=1e-2)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--out", default="scaling.csv")
    args = ap.parse_args()

    eps_list = [float(x) for x in args.eps_list.split(",")]
    cfg = ExperimentConfig(
        theta=args.theta, cutoff=args.cutoff, dt=args.dt,
        record_stride=5, master_seed=args.seed,
    )
    rows = error_scaling_study(eps_list, args.samples, args.s, cfg)
    out = []
    for r in rows:
        print(f"eps={r.epsilon}: median={r.median_err:.5f} scaled={r.scaled:.5f} "
              f"(seeds={r.seeds_used}, aborts={r.aborts})")
        out.append({
            "eps": r.epsilon, "median_err": r.median_err, "scaled": r.scaled,
            "seeds_used": r.seeds_used, "aborts": r.aborts,
        })
    for a, b in zip(rows, rows[1:]):
        ratio = b.median_err / a.median_err
        bound = (b.epsilon / a.epsilon) ** 0.3
        print(f"ratio {a.epsilon}->{b.epsilon}: {ratio:.3f} (decay bound {bound:.3f})")
    write_records(out, "csv", args.out, [f"master_seed={args.seed}", f"s={args.s}"])
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
