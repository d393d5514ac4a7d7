"""Random initial data: decaying coefficients times i.i.d. complex Gaussians.

The data is u0 = sum_n c_n g_n e^{inx} with c_n = <n>^{-(1/2+theta)},
theta > 0, and g_n standard complex Gaussians (E|g|^2 = 1, so the modulus
law is P(|g| > r) = exp(-r^2)).  Each g_n comes from a counter-based
stream keyed by (seed, n); see rng.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import rng
from .errors import ConfigError
from .spectral import SpectralField, bracket


def coefficient_profile(theta: float, cutoff: int) -> np.ndarray:
    """c_n = <n>^{-(1/2+theta)} for modes -cutoff..cutoff."""
    if theta <= 0:
        raise ConfigError(f"theta must be > 0 (data leaves L^inf otherwise), got {theta}")
    n = np.arange(-cutoff, cutoff + 1)
    return bracket(n) ** (-(0.5 + theta))


@dataclass(frozen=True)
class GaussianDraw:
    """One seeded realization of the random data."""

    seed: int
    theta: float
    cutoff: int
    gaussians: np.ndarray = field(repr=False)
    field: SpectralField = field(repr=False)

    def header(self) -> dict:
        return {"seed": self.seed, "theta": self.theta, "cutoff": self.cutoff}

    def to_json_dict(self) -> dict:
        out = self.header()
        out["field"] = self.field.to_json_dict()
        return out


def make_initial_data(theta: float, cutoff: int, seed: int) -> GaussianDraw:
    """Draw g_n for |n| <= cutoff and assemble uhat(n) = c_n g_n."""
    if cutoff < 1:
        raise ConfigError(f"cutoff must be >= 1, got {cutoff}")
    c = coefficient_profile(theta, cutoff)
    g = rng.gaussian_modes(seed, cutoff)
    return GaussianDraw(seed, theta, cutoff, g, SpectralField(cutoff, c * g))


def truncated_variance(theta: float, cutoff: int):
    """sigma_N^2 = sum_{|n|<=N} <n>^{-(1+2theta)} and a tail-size estimate.

    The tail estimate N^{-2 theta}/theta bounds the mass left beyond the
    cutoff (integral comparison); it is reported alongside so truncation
    quality is visible in outputs.
    """
    if theta <= 0:
        raise ConfigError(f"theta must be > 0, got {theta}")
    n = np.arange(-cutoff, cutoff + 1)
    sigma2 = float(np.sum(bracket(n) ** (-(1.0 + 2.0 * theta))))
    tail = float(cutoff ** (-2.0 * theta) / theta) if cutoff >= 1 else float("inf")
    return sigma2, tail


@dataclass(frozen=True)
class PhaseInvarianceReport:
    samples: int
    t_eps2_c2: float
    phase_source: str
    ks_real: float
    ks_imag: float
    ks_modulus: float
    p_real: float
    p_imag: float
    p_modulus: float
    passed_real: bool
    passed_imag: bool
    passed_modulus: bool
    dependence_corr: float
    dependence_flagged: bool

    @property
    def passed(self) -> bool:
        return self.passed_real and self.passed_imag and self.passed_modulus


def phase_invariance_stat(
    samples: int,
    t_eps2_c2: float,
    seed: int,
    phase_source: str = "modulus_squared",
    significance: float = 1e-3,
) -> PhaseInvarianceReport:
    """Test that eta * exp(i*t*|eta|^2) is again standard complex Gaussian.

    Draws eta, applies the modulus-dependent rotation, and runs two-sample
    Kolmogorov-Smirnov tests (real part, imaginary part, modulus) against an
    independent Gaussian sample.  phase_source="real_part" substitutes
    Re(eta) for |eta|^2 in the phase: the modulus test still passes but the
    joint dependence shows up as a nonzero correlation between |eta| and
    sin(arg of the rotated variable), which the report flags.
    """
    if samples < 10**4:
        raise ConfigError(f"need at least 1e4 samples, got {samples}")
    one = np.array([1], dtype=np.uint64)
    counters = np.arange(2 * samples, dtype=np.uint64)
    eta = rng.complex_gaussians(one * np.uint64(rng.derive_seed(seed, "phase-inv", 0)), counters[:samples])[0]
    fresh = rng.complex_gaussians(one * np.uint64(rng.derive_seed(seed, "phase-inv", 1)), counters[:samples])[0]
    if phase_source == "modulus_squared":
        phase = t_eps2_c2 * np.abs(eta) ** 2
    elif phase_source == "real_part":
        phase = t_eps2_c2 * eta.real
    else:
        raise ValueError(f"unknown phase_source {phase_source!r}")
    zeta = eta * np.exp(1j * phase)

    ks_re = stats.ks_2samp(zeta.real, fresh.real)
    ks_im = stats.ks_2samp(zeta.imag, fresh.imag)
    ks_mod = stats.ks_2samp(np.abs(zeta), np.abs(fresh))

    # E[sin(arg zeta) | |eta|] vanishes iff the added phase is independent of
    # arg(eta); correlating |eta| with sin(arg zeta) detects the contrast case.
    dep = np.corrcoef(np.abs(eta), np.sin(np.angle(zeta)))[0, 1]
    flag = abs(dep) > 4.0 / np.sqrt(samples)

    return PhaseInvarianceReport(
        samples=samples,
        t_eps2_c2=t_eps2_c2,
        phase_source=phase_source,
        ks_real=float(ks_re.statistic),
        ks_imag=float(ks_im.statistic),
        ks_modulus=float(ks_mod.statistic),
        p_real=float(ks_re.pvalue),
        p_imag=float(ks_im.pvalue),
        p_modulus=float(ks_mod.pvalue),
        passed_real=bool(ks_re.pvalue >= significance),
        passed_imag=bool(ks_im.pvalue >= significance),
        passed_modulus=bool(ks_mod.pvalue >= significance),
        dependence_corr=float(dep),
        dependence_flagged=bool(flag),
    )
