"""The exactly-solvable modified linear flow and its distance to the nonlinear flow.

Each mode of the modified flow rotates at its own rate: mode n carries the
phase exp(i t (rho_n - n^2)) with rho_n = eps^2 |uhat0(n)|^2, times the
global mass-gauge rotation exp(-2 i t eps^2 mu).  Mode moduli are constant
in time, which is the property the statistics below exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError
from .random_data import GaussianDraw
from .solver import Trajectory
from .spectral import SpectralField, bracket, mass_gauge


@dataclass(frozen=True)
class AppFlow:
    draw: GaussianDraw
    epsilon: float
    mu: float               # sum |c_n g_n|^2
    rho: np.ndarray         # per-mode nonlinear rates eps^2 |c_n g_n|^2

    @classmethod
    def from_draw(cls, draw: GaussianDraw, epsilon: float) -> "AppFlow":
        if epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {epsilon}")
        amps = draw.field.amplitudes
        return cls(
            draw=draw,
            epsilon=epsilon,
            mu=mass_gauge(draw.field),
            rho=epsilon**2 * np.abs(amps) ** 2,
        )

    def default_s(self) -> float:
        """Smoothing exponent 1/2 + theta/2, inside the admissible window."""
        return 0.5 + self.draw.theta / 2.0


def u_app_at(flow: AppFlow, t: float) -> SpectralField:
    """Closed-form state at time t; equals u0 exactly at t = 0."""
    u0 = flow.draw.field
    n = u0.modes
    phases = np.exp(1j * t * (flow.rho - n.astype(float) ** 2))
    gauge = np.exp(-2j * t * flow.epsilon**2 * flow.mu)
    return SpectralField(u0.cutoff, gauge * u0.amplitudes * phases)


def app_residual(flow: AppFlow, t: float, dt_fd: float, nonlinearity: str = "N2") -> float:
    """H^0 norm of i du/dt + Lap u + eps^2 N2(u) - 2 eps^2 mu u at u = u_app.

    du/dt is a centered finite difference with step dt_fd, so the value
    decays like O(dt_fd^2).  nonlinearity="full" substitutes the complete
    cubic |u|^2 u, a contrast case whose residual does NOT vanish: it
    converges to the eps^2-sized off-diagonal forcing instead.
    """
    if dt_fd <= 0:
        raise ConfigError(f"dt_fd must be > 0, got {dt_fd}")
    here = u_app_at(flow, t)
    plus = u_app_at(flow, t + dt_fd)
    minus = u_app_at(flow, t - dt_fd)
    dudt = (plus.amplitudes - minus.amplitudes) / (2.0 * dt_fd)
    n2 = np.abs(here.amplitudes) ** 2 * here.amplitudes
    if nonlinearity == "full":
        from .spectral import cubic_convolution

        cubic = cubic_convolution(here, here, here).truncate(here.cutoff).amplitudes
        nl = cubic
    elif nonlinearity == "N2":
        nl = n2
    else:
        raise ValueError(f"nonlinearity must be 'N2' or 'full', got {nonlinearity!r}")
    k2 = here.modes.astype(float) ** 2
    resid = (
        1j * dudt
        - k2 * here.amplitudes
        + flow.epsilon**2 * nl
        - 2.0 * flow.epsilon**2 * flow.mu * here.amplitudes
    )
    return float(np.sqrt(np.sum(np.abs(resid) ** 2)))


def error_trajectory(nl: Trajectory, flow: AppFlow, s: float):
    """Per-snapshot H^s distance to the modified flow plus the running max.

    Returns a list of (t, err, running_max).  The nonlinear trajectory must
    start from the same draw at the same epsilon.
    """
    if nl.epsilon != flow.epsilon:
        raise ContractError(f"epsilon mismatch: trajectory {nl.epsilon}, flow {flow.epsilon}")
    first = nl.snapshots[0]
    if first.state.cutoff != flow.draw.cutoff or not np.allclose(
        first.state.amplitudes, flow.draw.field.amplitudes, rtol=0, atol=1e-12
    ):
        raise ContractError("trajectory initial state does not match the draw")
    w = bracket(flow.draw.field.modes) ** (2.0 * s)
    out = []
    running = 0.0
    for snap in nl.snapshots:
        ua = u_app_at(flow, snap.t)
        err = float(np.sqrt(np.sum(w * np.abs(snap.state.amplitudes - ua.amplitudes) ** 2)))
        running = max(running, err)
        out.append((snap.t, err, running))
    return out
