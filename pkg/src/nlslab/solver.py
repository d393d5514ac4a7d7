"""Time integration of i u_t + Delta u = eps^2 |u|^2 u on the mode lattice.

The production integrator is Strang splitting for the Galerkin truncation
at cutoff N: exact linear phases in frequency, exact pointwise phase
rotation on the oversampled grid, projection back to |n| <= N.  A small-N
RK4 integrator for the exact gauged mode system serves as an independent
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import BlowUpError, ConfigError, ContractError
from .spectral import (
    LatticeSpec,
    SpectralField,
    analyze,
    apply_trilinear,
    mass_gauge,
    synthesize,
)

BLOWUP_GUARD = 1e6


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float
    dt: float = 1e-2
    horizon: float | None = None      # default c_T / epsilon
    c_T: float = 1.0
    record_stride: int = 1
    lattice: LatticeSpec = LatticeSpec(32)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.horizon is not None and self.horizon < 0:
            raise ConfigError(f"horizon must be >= 0, got {self.horizon}")

    def resolved_horizon(self) -> float:
        if self.horizon is not None:
            return self.horizon
        if self.epsilon == 0:
            raise ConfigError("horizon must be given explicitly when epsilon = 0")
        return self.c_T / self.epsilon


@dataclass
class Snapshot:
    t: float
    state: SpectralField
    mass: float
    hamiltonian: float
    grid_sup: float
    tail_mass: float  # sum over |n| > N/2, the truncation-quality monitor


@dataclass
class Trajectory:
    epsilon: float
    dt: float
    snapshots: list[Snapshot] = dc_field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def final(self) -> Snapshot:
        return self.snapshots[-1]


def hamiltonian(state: SpectralField, lattice: LatticeSpec, epsilon: float) -> float:
    """H = sum n^2 |uhat(n)|^2 + (eps^2/2) * (1/2pi) * int |u|^4.

    The quartic integral is the exact grid quadrature (alias-free since the
    lattice oversamples by >= 4).
    """
    n = state.modes
    kinetic = float(np.sum(n**2 * np.abs(state.amplitudes) ** 2))
    samples = synthesize(state.amplitudes, state.cutoff, lattice.points)
    quartic = float(np.mean(np.abs(samples) ** 4))
    return kinetic + 0.5 * epsilon**2 * quartic


def _diagnostics(state: SpectralField, lattice: LatticeSpec, epsilon: float, t: float) -> Snapshot:
    samples = synthesize(state.amplitudes, state.cutoff, lattice.points)
    half = state.cutoff // 2
    outer = np.abs(state.modes) > half
    return Snapshot(
        t=t,
        state=state,
        mass=mass_gauge(state),
        hamiltonian=hamiltonian(state, lattice, epsilon),
        grid_sup=float(np.max(np.abs(samples))),
        tail_mass=float(np.sum(np.abs(state.amplitudes[outer]) ** 2)),
    )


def strang_step(state: SpectralField, cfg: SolverConfig) -> SpectralField:
    """One Strang step: half linear, exact nonlinear rotation, half linear."""
    if state.cutoff != cfg.lattice.cutoff:
        raise ContractError(
            f"state cutoff {state.cutoff} != lattice cutoff {cfg.lattice.cutoff}"
        )
    if not np.all(np.isfinite(state.amplitudes.view(float))):
        raise BlowUpError("non-finite state entering strang_step")
    n = state.modes
    half = np.exp(-1j * n**2 * cfg.dt / 2.0)
    amps = state.amplitudes * half
    samples = synthesize(amps, state.cutoff, cfg.lattice.points)
    samples *= np.exp(-1j * cfg.epsilon**2 * cfg.dt * np.abs(samples) ** 2)
    amps = analyze(samples, state.cutoff)
    amps *= half
    return SpectralField(state.cutoff, amps)


def evolve(u0: SpectralField, cfg: SolverConfig) -> Trajectory:
    """Strang evolution with snapshots every record_stride steps."""
    horizon = cfg.resolved_horizon()
    steps = int(round(horizon / cfg.dt))
    traj = Trajectory(cfg.epsilon, cfg.dt)
    state = u0
    traj.snapshots.append(_diagnostics(state, cfg.lattice, cfg.epsilon, 0.0))
    for j in range(1, steps + 1):
        state = strang_step(state, cfg)
        if j % cfg.record_stride == 0 or j == steps:
            snap = _diagnostics(state, cfg.lattice, cfg.epsilon, j * cfg.dt)
            if snap.grid_sup > BLOWUP_GUARD:
                raise BlowUpError(f"grid sup {snap.grid_sup:.3g} exceeded guard at t={snap.t}")
            traj.snapshots.append(snap)
    return traj


def gauge_to_interaction(state: SpectralField, t: float, mu: float, epsilon: float) -> SpectralField:
    """w_k = exp(i t (2 eps^2 mu + k^2)) uhat(k): removes free rotation and mass gauge."""
    if mu < 0:
        raise ConfigError(f"mu must be >= 0, got {mu}")
    k = state.modes
    phases = np.exp(1j * t * (2.0 * epsilon**2 * mu + k.astype(float) ** 2))
    return SpectralField(state.cutoff, state.amplitudes * phases)


def ungauge_from_interaction(w: SpectralField, t: float, mu: float, epsilon: float) -> SpectralField:
    k = w.modes
    phases = np.exp(-1j * t * (2.0 * epsilon**2 * mu + k.astype(float) ** 2))
    return SpectralField(w.cutoff, w.amplitudes * phases)


GALERKIN_MAX_CUTOFF = 16


def _gauged_rhs(w: np.ndarray, t: float, cutoff: int, epsilon: float) -> np.ndarray:
    """d w_k/dt for the exact truncated mode system.

    i w_k' = -eps^2 |w_k|^2 w_k + eps^2 sum_{R_k} w_{k1} conj(w_{k2}) w_{k3} e^{-it Omega}
    with Omega = k1^2 - k2^2 + k3^2 - k^2.  The resonant sum is evaluated by
    gauging to v_k = w_k e^{-i t k^2}, in which it becomes the band-restricted
    off-diagonal trilinear form.
    """
    k = np.arange(-cutoff, cutoff + 1)
    kk2 = k.astype(float) ** 2
    v = SpectralField(cutoff, w * np.exp(-1j * t * kk2))
    n1 = apply_trilinear("N1", v, v, v).truncate(cutoff).amplitudes
    resonant = np.exp(1j * t * kk2) * n1
    return 1j * epsilon**2 * (np.abs(w) ** 2) * w - 1j * epsilon**2 * resonant


def galerkin_reference_evolve(u0: SpectralField, cfg: SolverConfig) -> Trajectory:
    """RK4 on the gauged mode system, un-gauged back to u.  Cross-check only."""
    if u0.cutoff > GALERKIN_MAX_CUTOFF:
        raise ConfigError(
            f"galerkin reference limited to cutoff <= {GALERKIN_MAX_CUTOFF}, got {u0.cutoff}"
        )
    if u0.cutoff != cfg.lattice.cutoff:
        raise ContractError("state and lattice cutoffs differ")
    horizon = cfg.resolved_horizon()
    steps = int(round(horizon / cfg.dt))
    mu = mass_gauge(u0)
    eps = cfg.epsilon
    dt = cfg.dt
    w = gauge_to_interaction(u0, 0.0, mu, eps).amplitudes.copy()

    traj = Trajectory(eps, dt)
    traj.snapshots.append(_diagnostics(u0, cfg.lattice, eps, 0.0))
    rhs: Callable[[np.ndarray, float], np.ndarray] = lambda y, t: _gauged_rhs(
        y, t, u0.cutoff, eps
    )
    for j in range(1, steps + 1):
        t = (j - 1) * dt
        k1 = rhs(w, t)
        k2 = rhs(w + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = rhs(w + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = rhs(w + dt * k3, t + dt)
        w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if j % cfg.record_stride == 0 or j == steps:
            u = ungauge_from_interaction(SpectralField(u0.cutoff, w), j * dt, mu, eps)
            traj.snapshots.append(_diagnostics(u, cfg.lattice, eps, j * dt))
    return traj
