"""Experiment runner.

    nlslab <subcommand> [--config FILE] [--eps ... --theta ... --z0 ...
                         --samples ... --seed ... --outdir ...]

Subcommands: sample-ldp, rate-curve, compare-app, resonance-sums,
chaos-stat, hyper-check, evolve-one.  Flag precedence: flags > config file
> defaults; NLSLAB_OUT sets the default output root.  Identical
(config, master seed) reruns produce byte-identical files for any worker
count.

Exit codes: 0 success, 1 contract violation, 2 usage/config error, 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, ldp, resonance
from .config import ExperimentConfig, load_config, with_updates
from .errors import BlowUpError, ConfigError, ContractError
from .modified import AppFlow, error_trajectory
from .random_data import make_initial_data
from .records import write_records
from .rng import derive_seed
from .solver import LatticeSpec, SolverConfig, evolve

SUBCOMMANDS = (
    "sample-ldp",
    "rate-curve",
    "compare-app",
    "resonance-sums",
    "chaos-stat",
    "hyper-check",
    "evolve-one",
)


def _header(cfg: ExperimentConfig) -> list[str]:
    return [
        f"config_hash={cfg.config_hash()}",
        f"artifact_version={__version__}",
        f"master_seed={cfg.master_seed}",
        "config=" + "|".join(cfg.canonical_lines()),
    ]


def _outpath(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.outdir, exist_ok=True)
    return os.path.join(cfg.outdir, name)


def _tail_row(est: ldp.TailEstimate, reference: float) -> dict:
    return {
        "flow": est.flow,
        "eps": est.epsilon,
        "z0": est.z0,
        "trials": est.trials,
        "hits": est.hits,
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "rate": est.rate,
        "reference": reference,
        "censored": est.censored,
    }


def cmd_sample_ldp(cfg: ExperimentConfig) -> int:
    z0 = cfg.z0
    if cfg.target_p > 0:
        z0 = ldp.tune_threshold(cfg.flow, cfg, cfg.target_p)
        cfg = with_updates(cfg, z0=z0)
    est = ldp.mc_sup_tail(cfg.flow, cfg)
    reference = z0 * z0 / cfg.sigma2()
    write_records(
        [_tail_row(est, reference)], "csv", _outpath(cfg, "tail_estimates.csv"), _header(cfg)
    )
    return 0


def cmd_rate_curve(cfg: ExperimentConfig) -> int:
    if len(cfg.eps_list) < 3:
        raise ConfigError("rate-curve needs eps_list with >= 3 decreasing values")
    curve = ldp.rate_curve(cfg.flow, cfg.eps_list, cfg.z0, cfg)
    rows = []
    for pt in curve.points:
        row = _tail_row(pt.estimate, pt.reference)
        row["gap"] = pt.gap
        rows.append(row)
    write_records(rows, "csv", _outpath(cfg, "rate_curve.csv"), _header(cfg))
    return 0


def cmd_compare_app(cfg: ExperimentConfig) -> int:
    seed = derive_seed(cfg.master_seed, "compare-app", 0)
    draw = make_initial_data(cfg.theta, cfg.cutoff, seed)
    flow = AppFlow.from_draw(draw, cfg.epsilon)
    solver_cfg = SolverConfig(
        epsilon=cfg.epsilon,
        dt=cfg.dt,
        horizon=cfg.horizon(),
        record_stride=cfg.record_stride,
        lattice=LatticeSpec(cfg.cutoff, cfg.oversample),
    )
    traj = evolve(draw.field, solver_cfg)
    rows = [
        {"t": t, "err_hs": err, "running_max": run}
        for t, err, run in error_trajectory(traj, flow, cfg.s)
    ]
    mon = ldp.gronwall_monitor(traj, flow, cfg.s, cfg.epsilon)
    header = _header(cfg) + [f"gronwall_cstar={mon.cstar!r}", f"gronwall_active={mon.active}"]
    write_records(rows, "csv", _outpath(cfg, "compare_app.csv"), header)
    return 0


def cmd_resonance_sums(cfg: ExperimentConfig) -> int:
    rows = []
    for variant in (1, 2):
        for k in cfg.k_list:
            q = resonance.ResonanceQuery(
                k=k, K=cfg.key_sum_K, s=cfg.s, theta=cfg.theta, delta5=cfg.delta5
            )
            rows.append(
                {
                    "k": k,
                    "sum": resonance.key_sum(variant, q),
                    "variant": variant,
                    "K": cfg.key_sum_K,
                    "s": cfg.s,
                    "theta": cfg.theta,
                    "delta5": cfg.delta5,
                }
            )
    write_records(rows, "csv", _outpath(cfg, "resonance_sums.csv"), _header(cfg))
    template = resonance.ResonanceQuery(
        k=int(cfg.k_list[0]), K=cfg.key_sum_K, s=cfg.s, theta=cfg.theta, delta5=cfg.delta5
    )
    slopes = []
    for variant in (1, 2):
        fit = resonance.decay_slope_fit(variant, template, cfg.k_list, cfg.key_sum_K)
        slopes.append(
            {"variant": variant, "slope": fit.slope, "residual": fit.residual, "K": cfg.key_sum_K}
        )
    write_records(slopes, "csv", _outpath(cfg, "decay_slopes.csv"), _header(cfg))
    return 0


def cmd_chaos_stat(cfg: ExperimentConfig) -> int:
    tau_grid = np.linspace(0.0, cfg.tau_max, cfg.tau_points)
    sups = []
    second = []
    for i in range(cfg.samples):
        seed = derive_seed(cfg.master_seed, "chaos", i)
        draw = make_initial_data(cfg.theta, cfg.cutoff, seed)
        stat = resonance.chaos_statistic(cfg.chaos_mode, cfg.chaos_dyads, draw, cfg.epsilon, tau_grid)
        sups.append(stat.sup_abs)
        second.append(stat.values[0] ** 2)
        ref = stat.second_moment_ref
    emp = float(np.mean(second))
    row = {
        "n": cfg.chaos_mode,
        "dyads": "x".join(str(d) for d in cfg.chaos_dyads),
        "samples": cfg.samples,
        "emp_second_moment": emp,
        "ref_second_moment": ref,
        "rel_err": abs(emp - ref) / ref if ref else 0.0,
        "mean_sup": float(np.mean(sups)),
        "max_sup": float(np.max(sups)),
    }
    write_records([row], "csv", _outpath(cfg, "chaos_stat.csv"), _header(cfg))
    return 0


def cmd_hyper_check(cfg: ExperimentConfig) -> int:
    lam = np.linspace(cfg.lambda_min, cfg.lambda_max, cfg.lambda_points)
    spec = ldp.CoeffSpec("diagonal", np.array(cfg.hyper_coeffs))
    rep = ldp.hyper_tail_check(cfg.hyper_order, spec, lam, cfg.samples, cfg.master_seed)
    row = {
        "k": rep.k,
        "samples": rep.samples,
        "l2_norm": rep.l2_norm,
        "c_fit": rep.c_fit,
        "c_valid": rep.c_valid,
        "slope_fit": rep.slope_fit,
        "bound_holds": rep.bound_holds,
    }
    write_records([row], "csv", _outpath(cfg, "hyper.csv"), _header(cfg))
    return 0


def cmd_evolve_one(cfg: ExperimentConfig) -> int:
    seed = derive_seed(cfg.master_seed, "evolve-one", 0)
    draw = make_initial_data(cfg.theta, cfg.cutoff, seed)
    solver_cfg = SolverConfig(
        epsilon=cfg.epsilon,
        dt=cfg.dt,
        horizon=cfg.horizon(),
        record_stride=cfg.record_stride,
        lattice=LatticeSpec(cfg.cutoff, cfg.oversample),
    )
    traj = evolve(draw.field, solver_cfg)
    rows = []
    for snap in traj.snapshots:
        row = {
            "t": snap.t,
            "mass": snap.mass,
            "hamiltonian": snap.hamiltonian,
            "sup": snap.grid_sup,
            "tail_mass": snap.tail_mass,
        }
        if cfg.save_modes:
            row["modes"] = snap.state.to_json_dict()["modes"]
        rows.append(row)
    write_records(rows, "json-lines", _outpath(cfg, "trajectory.jsonl"), _header(cfg))
    return 0


_DISPATCH = {
    "sample-ldp": cmd_sample_ldp,
    "rate-curve": cmd_rate_curve,
    "compare-app": cmd_compare_app,
    "resonance-sums": cmd_resonance_sums,
    "chaos-stat": cmd_chaos_stat,
    "hyper-check": cmd_hyper_check,
    "evolve-one": cmd_evolve_one,
}

_FLAG_TO_KEY = {
    "eps": "epsilon",
    "horizon": "horizon_override",
    "eps_list": "eps_list",
    "theta": "theta",
    "z0": "z0",
    "cutoff": "cutoff",
    "oversample": "oversample",
    "dt": "dt",
    "c_T": "c_T",
    "record_stride": "record_stride",
    "s": "s",
    "delta5": "delta5",
    "samples": "samples",
    "seed": "master_seed",
    "workers": "workers",
    "flow": "flow",
    "outdir": "outdir",
    "key_sum_K": "key_sum_K",
    "k_list": "k_list",
    "chaos_mode": "chaos_mode",
    "chaos_dyads": "chaos_dyads",
    "tau_max": "tau_max",
    "tau_points": "tau_points",
    "hyper_order": "hyper_order",
    "hyper_coeffs": "hyper_coeffs",
    "lambda_min": "lambda_min",
    "lambda_max": "lambda_max",
    "lambda_points": "lambda_points",
    "target_p": "target_p",
    "save_modes": "save_modes",
    "time_refine": "time_refine",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlslab", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="key=value config file")
    for flag in _FLAG_TO_KEY:
        parser.add_argument(f"--{flag.replace('_', '-')}", dest=flag, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        _FLAG_TO_KEY[flag]: value
        for flag, value in vars(args).items()
        if flag in _FLAG_TO_KEY and value is not None
    }
    if "outdir" not in overrides and os.environ.get("NLSLAB_OUT"):
        overrides["outdir"] = os.environ["NLSLAB_OUT"]
    try:
        cfg = load_config(args.config, overrides)
        return _DISPATCH[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"nlslab: config error: {exc}", file=sys.stderr)
        return 2
    except (ContractError, BlowUpError) as exc:
        print(f"nlslab: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"nlslab: i/o failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
