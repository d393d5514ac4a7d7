"""Statistical verification layer: exact pointwise tail law, Monte-Carlo
sup-norm tails and rate curves, error-scaling and Gronwall monitors, and
tail bounds for Gaussian polynomials.

Sampling design: sups of the closed-form flows are taken over a uniform
time grid with spacing min(0.05, 1/(4N)) on [0, T] and the 4x-oversampled
spatial grid; the grid sup is a certified lower bound for the true sup.
Thresholds are always z0 * eps^(-1/2).  Every estimate is a pure function
of (config, master seed): samples are keyed by derived per-index seeds and
aggregated in index order, so results do not depend on worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from . import rng
from .config import ExperimentConfig
from .errors import BlowUpError, ConfigError, ContractError
from .modified import AppFlow, error_trajectory
from .random_data import coefficient_profile, make_initial_data
from .solver import SolverConfig, Trajectory, evolve
from .spectral import LatticeSpec

_Z95 = 1.959963984540054

FLOWS = ("linear", "modified", "nonlinear")


def wilson_interval(hits: int, trials: int, z: float = _Z95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ConfigError("trials must be positive")
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    spread = z * math.sqrt((p * (1.0 - p) + z * z / (4 * trials)) / trials) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - spread)
    hi = 1.0 if hits == trials else min(1.0, center + spread)
    return lo, hi


def exact_pointwise_tail(r: float, sigma2: float) -> float:
    """P(|G| > r) = exp(-r^2/sigma^2) for a complex Gaussian with E|G|^2 = sigma^2.

    This is the exact law of the free flow at any fixed (t, x).
    """
    if sigma2 <= 0:
        raise ConfigError(f"sigma2 must be > 0, got {sigma2}")
    if r < 0:
        raise ConfigError(f"r must be >= 0, got {r}")
    return math.exp(-r * r / sigma2)


@dataclass(frozen=True)
class TailEstimate:
    flow: str
    epsilon: float
    z0: float
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    rate: float             # -eps * ln p_hat; censored bound when hits == 0
    censored: bool

    @classmethod
    def from_counts(cls, flow: str, epsilon: float, z0: float, hits: int, trials: int):
        lo, hi = wilson_interval(hits, trials)
        if hits > 0:
            p = hits / trials
            rate = -epsilon * math.log(p) + 0.0  # normalize -0.0 at p = 1
            censored = False
        else:
            p = 0.0
            rate = -epsilon * math.log(1.0 / trials)
            censored = True
        return cls(flow, epsilon, z0, trials, hits, p, lo, hi, rate, censored)

    def rate_interval(self):
        """Rate range implied by the Wilson interval (inf when ci_low = 0)."""
        hi = -self.epsilon * math.log(self.ci_low) if self.ci_low > 0 else math.inf
        lo = -self.epsilon * math.log(self.ci_high) if self.ci_high > 0 else math.inf
        return lo, hi


@dataclass(frozen=True)
class SupGridSpec:
    """Space-time sampling grid for sup statistics."""

    time_points: np.ndarray
    lattice: LatticeSpec
    single_x: float | None = None   # evaluate at one spatial point instead of the grid

    @classmethod
    def for_flow(cls, cutoff: int, horizon: float, oversample: int = 4, refine: int = 1):
        spacing = min(0.05, 1.0 / (4.0 * cutoff)) / refine
        nt = int(math.floor(horizon / spacing)) + 1
        return cls(np.arange(nt) * spacing, LatticeSpec(cutoff, oversample))

    @classmethod
    def single_point(cls, cutoff: int, t: float, x: float):
        return cls(np.array([t]), LatticeSpec(cutoff), single_x=x)


class _SupWorkspace:
    """Reusable buffers for the per-sample sup evaluation.

    One sample allocates several MB of temporaries; over 1e5 samples the
    allocator traffic dominates the wall time, so blocks share one
    workspace.  Reuse does not change any floating-point operation, so
    results are bit-identical with and without it.
    """

    def __init__(self, nt: int, n_modes: int, points: int):
        self.ph = np.empty((nt, n_modes), dtype=complex)
        self.spread = np.zeros((nt, points), dtype=np.complex64)
        self.m2 = np.empty((nt, points), dtype=np.float32)


def _closed_form_sup(amps0, rates, grid: SupGridSpec, cutoff: int, ws: _SupWorkspace | None = None) -> float:
    """Grid sup of |sum_n a_n e^{i t rates_n} e^{inx}| for one sample.

    Synthesis in complex64: a 1e-7 relative perturbation of the sup,
    far below Monte-Carlo resolution.
    """
    t = grid.time_points
    n = np.arange(-cutoff, cutoff + 1)
    if grid.single_x is not None:
        ph = np.exp(1j * np.outer(t, rates)) * amps0
        vals = ph @ np.exp(1j * n * grid.single_x)
        return float(np.max(np.abs(vals)))
    nt = t.size
    M = grid.lattice.points
    if ws is None:
        ws = _SupWorkspace(nt, n.size, M)
    ph = ws.ph
    ph[0] = amps0
    if nt > 1:
        step = np.exp(1j * (t[1] - t[0]) * rates)
        np.multiply.accumulate(np.broadcast_to(step, (nt - 1, n.size)), axis=0, out=ph[1:])
        ph[1:] *= amps0
    # only these columns are ever nonzero, so rewriting them suffices;
    # assignment casts complex128 -> complex64 without a temporary
    ws.spread[:, n % M] = ph
    field = sfft.ifft(ws.spread, axis=-1, workers=1)
    np.multiply(field.real, field.real, out=ws.m2)
    m2i = field.imag
    np.multiply(m2i, m2i, out=m2i)
    ws.m2 += m2i
    return float(np.sqrt(ws.m2.max())) * M


def _sample_seeds(cfg: ExperimentConfig, count: int | None = None) -> np.ndarray:
    count = cfg.samples if count is None else count
    return np.array(
        [rng.derive_seed(cfg.master_seed, "mc", i) for i in range(count)], dtype=np.uint64
    )


def _sup_one(
    seed: int, cfg: ExperimentConfig, flow: str, grid: SupGridSpec,
    ws: _SupWorkspace | None = None,
) -> float:
    n = np.arange(-cfg.cutoff, cfg.cutoff + 1)
    c = coefficient_profile(cfg.theta, cfg.cutoff)
    g = rng.gaussian_modes(int(seed), cfg.cutoff)
    amps0 = c * g
    if flow == "linear":
        rates = -n.astype(float) ** 2
    elif flow == "modified":
        rates = cfg.epsilon**2 * np.abs(amps0) ** 2 - n.astype(float) ** 2
    else:
        raise ValueError(f"closed-form sup undefined for flow {flow!r}")
    return _closed_form_sup(amps0, rates, grid, cfg.cutoff, ws)


def _sup_nonlinear_one(seed: int, cfg: ExperimentConfig) -> float:
    draw = make_initial_data(cfg.theta, cfg.cutoff, int(seed))
    solver_cfg = SolverConfig(
        epsilon=cfg.epsilon,
        dt=cfg.dt,
        horizon=cfg.horizon(),
        record_stride=cfg.record_stride,
        lattice=LatticeSpec(cfg.cutoff, cfg.oversample),
    )
    traj = evolve(draw.field, solver_cfg)
    return max(s.grid_sup for s in traj.snapshots)


def _sup_block(args):
    flow, cfg, seeds, grid = args
    if flow == "nonlinear":
        return [_sup_nonlinear_one(s, cfg) for s in seeds]
    ws = None
    if grid.single_x is None:
        ws = _SupWorkspace(grid.time_points.size, 2 * cfg.cutoff + 1, grid.lattice.points)
    return [_sup_one(s, cfg, flow, grid, ws) for s in seeds]


def sample_sups(flow: str, cfg: ExperimentConfig, grid: SupGridSpec | None = None) -> np.ndarray:
    """Sup statistic for every sample, in sample order (worker-count invariant)."""
    if flow not in FLOWS:
        raise ConfigError(f"flow must be one of {FLOWS}, got {flow!r}")
    if grid is None:
        grid = SupGridSpec.for_flow(
            cfg.cutoff, cfg.horizon(), cfg.oversample, refine=cfg.time_refine
        )
    seeds = _sample_seeds(cfg)
    blocks = [seeds[i : i + 512] for i in range(0, seeds.size, 512)]
    tasks = [(flow, cfg, blk, grid) for blk in blocks]
    if cfg.workers == 1:
        results = [_sup_block(t) for t in tasks]
    else:
        import multiprocessing

        with multiprocessing.Pool(cfg.workers) as pool:
            results = pool.map(_sup_block, tasks)
    return np.concatenate([np.asarray(r) for r in results])


def mc_sup_tail(flow: str, cfg: ExperimentConfig, grid: SupGridSpec | None = None) -> TailEstimate:
    """Exceedance count of the sup above z0 * eps^(-1/2) over seeded draws."""
    if cfg.samples < 1000:
        raise ConfigError(f"mc_sup_tail needs >= 1000 samples, got {cfg.samples}")
    if cfg.epsilon <= 0:
        raise ConfigError("tail estimates need epsilon > 0 (threshold is z0 * eps^(-1/2))")
    sups = sample_sups(flow, cfg, grid)
    threshold = cfg.z0 / math.sqrt(cfg.epsilon)
    hits = int(np.sum(sups > threshold))
    return TailEstimate.from_counts(flow, cfg.epsilon, cfg.z0, hits, cfg.samples)


def tune_threshold(
    flow: str, cfg: ExperimentConfig, target_p: float, pilot_samples: int = 2000
) -> float:
    """Pick z0 so the exceedance probability is near target_p.

    Deterministic pilot: the (1 - target_p) quantile of the pilot sups under
    a dedicated seed stream, converted back to z0 units.  The pilot stream
    is disjoint from the estimation stream, so tuning does not bias the
    subsequent estimate.
    """
    pilot_cfg = replace(
        cfg,
        samples=pilot_samples,
        master_seed=rng.derive_seed(cfg.master_seed, "tune-pilot", 0),
    )
    sups = sample_sups(flow, pilot_cfg)
    threshold = float(np.quantile(sups, 1.0 - target_p))
    return threshold * math.sqrt(cfg.epsilon)


@dataclass(frozen=True)
class RateCurvePoint:
    epsilon: float
    estimate: TailEstimate
    reference: float
    gap: float              # signed: rate - reference


@dataclass(frozen=True)
class RateCurve:
    flow: str
    z0: float
    sigma2: float
    points: tuple
    gaps_shrink: bool       # |gap| at the smallest eps <= |gap| at the largest

    @property
    def reference(self) -> float:
        return self.points[0].reference


def rate_curve(flow: str, eps_list, z0: float, cfg: ExperimentConfig, samples_list=None) -> RateCurve:
    """TailEstimates along a decreasing epsilon ladder, against z0^2/sigma_N^2."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ConfigError("need at least 3 epsilon values")
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps_list must be strictly decreasing")
    sigma2 = cfg.sigma2()
    reference = z0 * z0 / sigma2
    if samples_list is None:
        samples_list = [cfg.samples] * len(eps_list)
    points = []
    for eps, ns in zip(eps_list, samples_list):
        sub = replace(cfg, epsilon=eps, z0=z0, samples=int(ns))
        est = mc_sup_tail(flow, sub)
        points.append(RateCurvePoint(eps, est, reference, est.rate - reference))
    shrink = abs(points[-1].gap) <= abs(points[0].gap)
    return RateCurve(flow, z0, sigma2, tuple(points), shrink)


# ---------------------------------------------------------------------------
# nonlinear-vs-modified error statistics

@dataclass(frozen=True)
class ScalingRow:
    epsilon: float
    median_err: float
    scaled: float           # median / eps^(1/2 - 0.1)
    seeds_used: int
    aborts: int


def error_scaling_study(eps_list, samples: int, s: float, cfg: ExperimentConfig):
    """Median over seeds of max_t ||u - u_app||_{H^s} for each epsilon.

    Uses the solver snapshot grid; solver aborts are excluded and counted.
    Returns rows in the given (decreasing-epsilon) order.
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    rows = []
    lattice = LatticeSpec(cfg.cutoff, cfg.oversample)
    for eps in eps_list:
        errs = []
        aborts = 0
        for i in range(samples):
            seed = rng.derive_seed(cfg.master_seed, f"scaling:{eps}", i)
            draw = make_initial_data(cfg.theta, cfg.cutoff, seed)
            flow = AppFlow.from_draw(draw, eps)
            horizon = cfg.horizon_override if cfg.horizon_override > 0 else None
            solver_cfg = SolverConfig(
                epsilon=eps, dt=cfg.dt, horizon=horizon, c_T=cfg.c_T,
                record_stride=cfg.record_stride, lattice=lattice,
            )
            try:
                traj = evolve(draw.field, solver_cfg)
            except BlowUpError:
                aborts += 1
                continue
            errs.append(error_trajectory(traj, flow, s)[-1][2])
        if not errs:
            raise BlowUpError(f"all {samples} runs aborted at eps={eps}")
        med = float(np.median(errs))
        scaled = med / eps**0.4 if eps > 0 else 0.0
        rows.append(ScalingRow(float(eps), med, scaled, len(errs), aborts))
    return rows


@dataclass(frozen=True)
class GronwallReport:
    active: bool
    cstar: float
    a_offset: float
    guard: float
    t_at_max: float


def gronwall_monitor(nl: Trajectory, flow: AppFlow, s: float, epsilon: float) -> GronwallReport:
    """Fitted constant for the integral-inequality structure of the error.

    With A(t) = ||u - u_app||_{H^s} and B(t) its running integral, returns
    C* = max_t (A(t) - A_offset) / (eps^2 * (2 pi mu) * B(t) + guard),
    where 2 pi mu = ||u0||_{L^2}^2.  The guard is 1% of the final
    denominator (plus an absolute floor), which suppresses the spurious
    0/0 spike near t = 0 without touching the late-time ratio.
    """
    if epsilon == 0:
        return GronwallReport(False, 0.0, 0.0, 0.0, 0.0)
    pts = error_trajectory(nl, flow, s)
    t = np.array([p[0] for p in pts])
    a = np.array([p[1] for p in pts])
    if t.size < 2:
        raise ContractError("need at least two snapshots")
    b = np.concatenate([[0.0], np.cumsum(0.5 * (a[1:] + a[:-1]) * np.diff(t))])
    denom_scale = epsilon**2 * (2.0 * np.pi * flow.mu)
    guard = 1e-12 + 0.01 * denom_scale * b[-1]
    ratios = (a - a[0]) / (denom_scale * b + guard)
    j = int(np.argmax(ratios))
    return GronwallReport(True, float(ratios[j]), float(a[0]), float(guard), float(t[j]))


# ---------------------------------------------------------------------------
# Gaussian polynomial tails

@dataclass(frozen=True)
class CoeffSpec:
    """Coefficients of F_k = sum c_{n1..nk} g_{n1} ... g_{nk}.

    kind="diagonal": coeffs[j] multiplies g_j^k.
    kind="dense": entries map index tuples (len k, values < n_modes) to
    coefficients.
    """

    kind: str
    coeffs: dict | np.ndarray

    def n_modes(self) -> int:
        if self.kind == "diagonal":
            return len(self.coeffs)
        return max(max(t) for t in self.coeffs) + 1


def _l2_norm_exact(k: int, spec: CoeffSpec) -> float:
    """Exact ||F_k||_{L^2} from Wick pairings.

    E[g^a conj(g)^a] = a! for a standard complex Gaussian; cross terms
    require identical index multisets matched by a permutation.
    """
    if spec.kind == "diagonal":
        coeffs = np.asarray(spec.coeffs, dtype=complex)
        return float(np.sqrt(math.factorial(k) * np.sum(np.abs(coeffs) ** 2)))
    from itertools import permutations

    entries = list(spec.coeffs.items())
    total = 0.0
    for t1, c1 in entries:
        for t2, c2 in entries:
            pairings = sum(
                1 for perm in permutations(range(k)) if all(t1[i] == t2[perm[i]] for i in range(k))
            )
            total += (c1 * np.conj(c2)).real * pairings
    if total <= 0:
        raise ConfigError("degenerate coefficients: zero L2 norm")
    return float(np.sqrt(total))


def _eval_chaos(k: int, spec: CoeffSpec, g: np.ndarray) -> np.ndarray:
    if spec.kind == "diagonal":
        coeffs = np.asarray(spec.coeffs, dtype=complex)
        return g**k @ coeffs
    out = np.zeros(g.shape[0], dtype=complex)
    for t, cval in spec.coeffs.items():
        term = np.full(g.shape[0], cval, dtype=complex)
        for i in t:
            term = term * g[:, i]
        out += term
    return out


@dataclass(frozen=True)
class HyperTailReport:
    k: int
    samples: int
    l2_norm: float
    lambdas: np.ndarray
    p_hat: np.ndarray
    c_fit: float            # least-squares C in exp(-C lambda^(2/k))
    c_valid: float          # largest C with p_hat <= exp(-C lambda^(2/k)) on valid grid
    slope_fit: float        # slope of ln(-ln p) vs ln lambda; 2/k for the exact law
    bound_holds: bool


def hyper_tail_check(
    k: int, coeff_spec: CoeffSpec, lambda_grid, samples: int, seed: int
) -> HyperTailReport:
    """Empirical tail of |F_k| / ||F_k||_2 against the exp(-C lambda^(2/k)) law.

    Fits C by least squares on -ln p over grid points with at least 10 hits
    (two decades of reliable probabilities), and validates the bound with
    the per-grid minimal constant.
    """
    if k not in (1, 2, 3):
        raise ConfigError(f"k must be in {{1,2,3}}, got {k}")
    if samples < 10**5:
        raise ConfigError(f"need at least 1e5 samples, got {samples}")
    if spec_is_zero(coeff_spec):
        raise ConfigError("degenerate coefficients (all zero)")
    lam = np.asarray(lambda_grid, dtype=float)
    norm = _l2_norm_exact(k, coeff_spec)
    m = coeff_spec.n_modes()
    base = rng.derive_seed(seed, "hyper", 0)
    block = 200_000
    counts = np.zeros(lam.size, dtype=np.int64)
    done = 0
    bi = 0
    while done < samples:
        take = min(block, samples - done)
        seeds = np.array(
            [rng.derive_seed(base, "hyper-block", bi * block + i) for i in range(take)],
            dtype=np.uint64,
        )
        g = rng.complex_gaussians(seeds, np.arange(m, dtype=np.uint64))
        vals = np.abs(_eval_chaos(k, coeff_spec, g)) / norm
        counts += (vals[None, :] > lam[:, None]).sum(axis=1)
        done += take
        bi += 1
    p_hat = counts / samples
    valid = (counts >= 10) & (p_hat < 1.0) & (lam > 0)
    if valid.sum() < 2:
        raise ConfigError("lambda grid leaves fewer than 2 resolvable points")
    x = lam[valid] ** (2.0 / k)
    y = -np.log(p_hat[valid])
    c_fit = float(np.sum(x * y) / np.sum(x * x))
    c_valid = float(np.min(y / x))
    slope = float(np.polyfit(np.log(lam[valid]), np.log(y), 1)[0])
    holds = bool(np.all(p_hat[valid] <= np.exp(-c_valid * lam[valid] ** (2.0 / k)) + 1e-12))
    return HyperTailReport(k, samples, norm, lam, p_hat, c_fit, c_valid, slope, holds)


def spec_is_zero(spec: CoeffSpec) -> bool:
    if spec.kind == "diagonal":
        return not np.any(np.asarray(spec.coeffs))
    return all(v == 0 for v in spec.coeffs.values())
