"""Experiment configuration: one flat key=value namespace.

Precedence is CLI flags > config file > defaults.  The resolved config is
hashed (sha256 of the canonical key=value listing) and the hash is stamped
into every output file, so artifacts can always be traced to their inputs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .random_data import truncated_variance

FLOW_KINDS = ("linear", "modified", "nonlinear")


@dataclass(frozen=True)
class ExperimentConfig:
    epsilon: float = 0.125
    eps_list: tuple[float, ...] = ()
    theta: float = 0.25
    z0: float = 1.0
    cutoff: int = 32
    oversample: int = 4
    dt: float = 1e-2
    c_T: float = 1.0
    horizon_override: float = 0.0   # > 0 replaces c_T / epsilon
    record_stride: int = 1
    s: float = 0.625
    delta5: float = 0.05
    samples: int = 1000
    master_seed: int = 0
    workers: int = 1
    time_refine: int = 1
    flow: str = "modified"
    outdir: str = "."
    # subcommand-specific knobs
    key_sum_K: int = 2048
    k_list: tuple[int, ...] = (8, 16, 32, 64, 128, 256, 512)
    chaos_mode: int = 0
    chaos_dyads: tuple[int, ...] = (4, 2, 4)
    tau_max: float = 10.0
    tau_points: int = 64
    hyper_order: int = 1
    hyper_coeffs: tuple[float, ...] = (1.0,)
    lambda_min: float = 0.5
    lambda_max: float = 3.0
    lambda_points: int = 26
    target_p: float = 0.0
    save_modes: int = 0

    def __post_init__(self):
        if self.theta <= 0:
            raise ConfigError(f"theta must be > 0, got {self.theta}")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.cutoff < 1:
            raise ConfigError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.oversample < 4:
            raise ConfigError(f"oversample must be >= 4, got {self.oversample}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if self.z0 < 0:
            raise ConfigError(f"z0 must be >= 0, got {self.z0}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.time_refine < 1:
            raise ConfigError(f"time_refine must be >= 1, got {self.time_refine}")
        if self.flow not in FLOW_KINDS:
            raise ConfigError(f"flow must be one of {FLOW_KINDS}, got {self.flow!r}")
        if any(e <= 0 for e in self.eps_list):
            raise ConfigError("eps_list entries must be > 0")

    def horizon(self) -> float:
        if self.horizon_override > 0:
            return self.horizon_override
        if self.epsilon == 0:
            raise ConfigError("horizon undefined at epsilon = 0; set horizon_override")
        return self.c_T / self.epsilon

    def sigma2(self) -> float:
        return truncated_variance(self.theta, self.cutoff)[0]

    def canonical_lines(self) -> list[str]:
        # outdir and workers cannot influence results, so they stay out of
        # the hash: reruns at different paths/parallelism must be comparable
        skip = {"outdir", "workers"}
        out = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name in skip:
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            out.append(f"{f.name}={v!r}")
        return out

    def config_hash(self) -> str:
        text = "\n".join(self.canonical_lines())
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:12]


_TUPLE_FLOAT = {"eps_list", "hyper_coeffs"}
_TUPLE_INT = {"k_list", "chaos_dyads"}


def _coerce(name: str, raw: str, target_type):
    raw = raw.strip()
    if name in _TUPLE_FLOAT:
        return tuple(float(x) for x in raw.split(",") if x)
    if name in _TUPLE_INT:
        return tuple(int(x) for x in raw.split(",") if x)
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def load_config(path: str | None, overrides: dict | None = None) -> ExperimentConfig:
    """Key=value file plus overrides; unknown keys are a usage error."""
    known = {f.name: f.type for f in fields(ExperimentConfig)}
    types = {f.name: type(getattr(ExperimentConfig(), f.name)) for f in fields(ExperimentConfig)}
    values: dict = {}
    if path is not None:
        with open(path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, raw = line.split("=", 1)
                key = key.strip()
                if key not in known:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, raw, types[key])
    for key, raw in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, str(raw), types[key]) if isinstance(raw, str) else raw
    return ExperimentConfig(**values)


def with_updates(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
