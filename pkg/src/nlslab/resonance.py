"""Resonance combinatorics: the factor Omega, restricted convolution sums
with decay-exponent fits, and the dyadic-shell Gaussian chaos statistic.

Index sets, for output mode k: triples (k1, k2, k3) with k = k1 - k2 + k3
and k2 not in {k1, k3}; on that plane Omega = k1^2 - k2^2 + k3^2 - k^2
factors as 2 (k1 - k2)(k2 - k3), so the constraint is exactly Omega != 0.
Dyadic shells are |k| in [N, 2N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .random_data import GaussianDraw
from .spectral import bracket

KEY_SUM_MAX_CUTOFF = 4096
_CHUNK = 256


def omega(k1: int, k2: int, k3: int, k: int) -> int:
    """Resonance factor k1^2 - k2^2 + k3^2 - k^2 (exact integer)."""
    return k1 * k1 - k2 * k2 + k3 * k3 - k * k


@dataclass(frozen=True)
class ResonanceQuery:
    k: int
    K: int
    s: float = 0.6
    theta: float = 0.25
    delta5: float = 0.05

    def __post_init__(self):
        # K < |k|/3 leaves the truncated index set empty; that is allowed and
        # the sum is then 0 rather than an error.
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.K > KEY_SUM_MAX_CUTOFF:
            raise ConfigError(f"K={self.K} exceeds limit {KEY_SUM_MAX_CUTOFF} (cost O(K^2))")
        if not 0.5 < self.s < 0.5 + self.theta:
            raise ConfigError(f"need 1/2 < s < 1/2 + theta, got s={self.s}, theta={self.theta}")
        if not 0 <= self.delta5 < self.theta:
            raise ConfigError(f"need 0 <= delta5 < theta, got {self.delta5}")


def _weighted_sum(k: int, K: int, e1: float, e2: float, e3: float) -> float:
    """sum over k1,k2 in [-K,K], k3 = k - k1 + k2 in [-K,K], Omega != 0 of
    <k1>^-e1 <k2>^-e2 <k3>^-e3 / |Omega|, chunked over k1 rows."""
    idx = np.arange(0, K + 1)
    t1 = bracket(idx) ** (-e1)
    t2 = bracket(idx) ** (-e2)
    t3 = bracket(idx) ** (-e3)
    k2 = np.arange(-K, K + 1)
    w2 = t2[np.abs(k2)]
    total = 0.0
    for lo in range(-K, K + 1, _CHUNK):
        k1 = np.arange(lo, min(lo + _CHUNK, K + 1))
        if k1.size == 0:
            break
        K1 = k1[:, None]
        k3 = k - K1 + k2[None, :]
        om = 2 * (K1 - k2[None, :]) * (k2[None, :] - k3)
        ok = (np.abs(k3) <= K) & (om != 0)
        absom = np.abs(om).astype(float)
        absom[~ok] = 1.0  # masked out below
        contrib = t1[np.abs(K1)] * w2[None, :] * t3[np.where(ok, np.abs(k3), 0)] / absom
        total += float(np.sum(np.where(ok, contrib, 0.0)))
    return total


def key_sum(variant: int, q: ResonanceQuery) -> float:
    """Restricted sums behind the two decay inequalities.

    variant 1: weights <k1>^s <k2>^s <k3>^(theta-delta5);
    variant 2: swaps the roles of k2 and k3 in the weights.
    Returns 0 when the truncated index set is empty.
    """
    if variant == 1:
        return _weighted_sum(q.k, q.K, q.s, q.s, q.theta - q.delta5)
    if variant == 2:
        return _weighted_sum(q.k, q.K, q.s, q.theta - q.delta5, q.s)
    raise ValueError(f"variant must be 1 or 2, got {variant}")


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float         # rms residual of the log-log fit
    k_list: tuple
    values: tuple


def fit_log_slope(k_list, values) -> SlopeFit:
    """Least-squares slope of log(values) against log <k>."""
    k_arr = np.asarray(k_list, dtype=float)
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0):
        raise ConfigError("slope fit requires positive values")
    x = np.log(bracket(k_arr))
    y = np.log(vals)
    a = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(a, y, rcond=None)
    rms = float(np.sqrt(res[0] / k_arr.size)) if res.size else 0.0
    return SlopeFit(float(slope), float(intercept), rms, tuple(int(k) for k in k_list), tuple(vals))


def decay_slope_fit(variant: int, q_template: ResonanceQuery, k_list, K: int) -> SlopeFit:
    """Least-squares slope of log key_sum(k) against log <k>.

    Measures the realized decay exponent; the slack against -(s + 1/2) is
    the empirical margin delta3.  Requires k_list to span at least four
    dyadic scales.
    """
    k_list = sorted(int(k) for k in k_list)
    if len(k_list) < 4 or k_list[-1] < 8 * k_list[0]:
        raise ConfigError("k_list must span at least 4 dyadic scales")
    vals = []
    for k in k_list:
        q = ResonanceQuery(k=k, K=K, s=q_template.s, theta=q_template.theta, delta5=q_template.delta5)
        vals.append(key_sum(variant, q))
    return fit_log_slope(k_list, vals)


# ---------------------------------------------------------------------------
# dyadic-shell chaos statistic

def shell_indices(shell: int, cutoff: int) -> np.ndarray:
    """Modes with |k| in [shell, 2*shell) (dyadic shell), within the cutoff.

    shell = 0 denotes the singleton {0}.
    """
    n = np.arange(-cutoff, cutoff + 1)
    if shell == 0:
        return n[n == 0]
    return n[(np.abs(n) >= shell) & (np.abs(n) < 2 * shell)]


def shell_triples(n_out: int, dyads, cutoff: int) -> np.ndarray:
    """Triples (n1, n2, n3) in the given shells with n1 - n2 + n3 = n_out
    and n2 not in {n1, n3}.  Returns an (m, 3) int array."""
    s1, s2, s3 = (shell_indices(d, cutoff) for d in dyads)
    if min(s1.size, s2.size, s3.size) == 0:
        return np.empty((0, 3), dtype=int)
    n1 = np.repeat(s1, s2.size)
    n2 = np.tile(s2, s1.size)
    n3 = n_out - n1 + n2
    ok = np.isin(n3, s3) & (n2 != n1) & (n2 != n3)
    return np.column_stack([n1[ok], n2[ok], n3[ok]])


def chaos_second_moment(n_out: int, dyads, cutoff: int, theta: float) -> float:
    """Exact Wick value of E|F|^2 at fixed time.

    Each triple T = (n1, n2, n3) contributes (c1 c2 c3)^2, doubled when the
    swapped triple (n3, n2, n1) lies in the same shell-restricted set.  For
    swap-closed shells (first and third shell equal) this is exactly
    2 * sum over the set of the product weights.
    """
    triples = shell_triples(n_out, dyads, cutoff)
    if triples.shape[0] == 0:
        return 0.0
    w = bracket(triples).prod(axis=1) ** (-(1.0 + 2.0 * theta))
    keys = {(a, b, c) for a, b, c in map(tuple, triples)}
    swap_in = np.array([(c, b, a) in keys for a, b, c in map(tuple, triples)])
    return float(np.sum(w * (1.0 + swap_in)))


@dataclass(frozen=True)
class ChaosStatistic:
    n_out: int
    dyads: tuple
    sup_abs: float
    tau_at_sup: float
    values: np.ndarray      # |F| on the tau grid
    second_moment_ref: float


def chaos_statistic(
    n_out: int,
    dyads,
    draw: GaussianDraw,
    epsilon: float,
    tau_grid: np.ndarray,
) -> ChaosStatistic:
    """sup over the tau grid of |F(tau)| for one draw.

    F(tau) sums, over shell-restricted triples, the rotated-Gaussian products
    g1 g2* g3 with per-mode phases tau * eps^2 c^2 |g|^2 and the oscillation
    e^{-i tau Omega}, weighted by the data coefficients.
    """
    if any(d and 2 * d - 1 > draw.cutoff for d in dyads):
        raise ConfigError(f"shells {tuple(dyads)} extend past the draw cutoff {draw.cutoff}")
    triples = shell_triples(n_out, dyads, draw.cutoff)
    tau_grid = np.asarray(tau_grid, dtype=float)
    ref = chaos_second_moment(n_out, dyads, draw.cutoff, draw.theta)
    if triples.shape[0] == 0:
        vals = np.zeros(tau_grid.size)
        return ChaosStatistic(n_out, tuple(dyads), 0.0, float(tau_grid[0]), vals, ref)
    g = draw.gaussians
    amps = draw.field.amplitudes
    off = draw.cutoff
    i1, i2, i3 = triples[:, 0] + off, triples[:, 1] + off, triples[:, 2] + off
    c = bracket(triples) ** (-(0.5 + draw.theta))
    coef = g[i1] * np.conj(g[i2]) * g[i3] * c.prod(axis=1)
    rho = epsilon**2 * np.abs(amps) ** 2
    om = (
        triples[:, 0] ** 2 - triples[:, 1] ** 2 + triples[:, 2] ** 2 - n_out**2
    ).astype(float)
    freq = rho[i1] - rho[i2] + rho[i3] - om
    vals = np.abs(np.exp(1j * np.outer(tau_grid, freq)) @ coef)
    j = int(np.argmax(vals))
    return ChaosStatistic(n_out, tuple(dyads), float(vals[j]), float(tau_grid[j]), vals, ref)
