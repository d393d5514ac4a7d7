"""Truncated Fourier fields on the torus [0, 2*pi).

Conventions: u(x) = sum_{|n| <= N} uhat(n) e^{inx}, Japanese bracket
<n> = (1 + n^2)^{1/2}, and the mass gauge mu = sum |uhat(n)|^2 (equal to
(1/2pi) * int |u|^2 in this normalization).  The H^s norm carries no 2*pi
factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, ContractError


def bracket(n) -> np.ndarray:
    """Japanese bracket <n> = (1 + n^2)^(1/2)."""
    n = np.asarray(n, dtype=float)
    return np.sqrt(1.0 + n * n)


@dataclass(frozen=True)
class SpectralField:
    """Complex amplitudes on the symmetric mode lattice |n| <= cutoff.

    amplitudes[k] holds uhat(k - cutoff); modes outside the lattice are
    implicitly zero.  Instances are treated as immutable values.
    """

    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.cutoff < 0:
            raise ConfigError(f"cutoff must be >= 0, got {self.cutoff}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 * self.cutoff + 1,):
            raise ContractError(
                f"amplitude array has shape {amps.shape}, expected {(2 * self.cutoff + 1,)}"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise ContractError("non-finite amplitude")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def modes(self) -> np.ndarray:
        """Mode indices -cutoff..cutoff aligned with `amplitudes`."""
        return np.arange(-self.cutoff, self.cutoff + 1)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.cutoff:
            return 0j
        return complex(self.amplitudes[n + self.cutoff])

    @classmethod
    def zeros(cls, cutoff: int) -> "SpectralField":
        return cls(cutoff, np.zeros(2 * cutoff + 1, dtype=complex))

    @classmethod
    def from_modes(cls, cutoff: int, entries: dict) -> "SpectralField":
        """Build from a {mode: amplitude} mapping."""
        amps = np.zeros(2 * cutoff + 1, dtype=complex)
        for n, a in entries.items():
            if abs(n) > cutoff:
                raise ContractError(f"mode {n} outside cutoff {cutoff}")
            amps[n + cutoff] = a
        return cls(cutoff, amps)

    def truncate(self, cutoff: int) -> "SpectralField":
        """Project onto |n| <= cutoff (pads with zeros when growing)."""
        if cutoff == self.cutoff:
            return self
        amps = np.zeros(2 * cutoff + 1, dtype=complex)
        m = min(cutoff, self.cutoff)
        amps[cutoff - m : cutoff + m + 1] = self.amplitudes[self.cutoff - m : self.cutoff + m + 1]
        return SpectralField(cutoff, amps)

    def to_json_dict(self) -> dict:
        """Lossless {cutoff, modes: [[n, re, im], ...]} representation.

        Floats survive a json round-trip exactly (shortest-repr decimal).
        """
        return {
            "cutoff": self.cutoff,
            "modes": [
                [int(n), float(a.real), float(a.imag)]
                for n, a in zip(self.modes, self.amplitudes)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SpectralField":
        field = cls.zeros(int(obj["cutoff"]))
        for n, re, im in obj["modes"]:
            field.amplitudes[int(n) + field.cutoff] = complex(re, im)
        return field


@dataclass(frozen=True)
class LatticeSpec:
    """Physical-space sampling: M equispaced points on [0, 2*pi).

    M = oversample * (2*cutoff + 1) with oversample >= 4 by default, so the
    grid resolves cubic products of band-limited fields without aliasing.
    """

    cutoff: int
    oversample: int = 4

    def __post_init__(self):
        if self.cutoff < 0:
            raise ConfigError(f"cutoff must be >= 0, got {self.cutoff}")
        if self.oversample < 1:
            raise ConfigError(f"oversample must be >= 1, got {self.oversample}")

    @property
    def points(self) -> int:
        return self.oversample * (2 * self.cutoff + 1)

    @property
    def grid(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.points) / self.points

    def require_capacity(self, cutoff: int):
        if self.points < 2 * cutoff + 1:
            raise ConfigError(
                f"lattice with M={self.points} cannot hold modes |n| <= {cutoff}"
            )


def synthesize(amplitudes: np.ndarray, cutoff: int, points: int) -> np.ndarray:
    """Samples of sum_n a_n e^{inx} on the M-point grid, via FFT."""
    spread = np.zeros(points, dtype=complex)
    spread[np.arange(-cutoff, cutoff + 1) % points] = amplitudes
    return points * np.fft.ifft(spread)


def analyze(samples: np.ndarray, cutoff: int) -> np.ndarray:
    """Mode amplitudes |n| <= cutoff from grid samples (inverse of synthesize)."""
    points = samples.size
    coeff = np.fft.fft(samples) / points
    return coeff[np.arange(-cutoff, cutoff + 1) % points]


def evaluate_physical(field: SpectralField, lattice: LatticeSpec) -> np.ndarray:
    """Field samples on the lattice grid."""
    lattice.require_capacity(field.cutoff)
    return synthesize(field.amplitudes, field.cutoff, lattice.points)


def evaluate_at(field: SpectralField, x: float) -> complex:
    """Direct evaluation at a single point (no grid)."""
    return complex(np.sum(field.amplitudes * np.exp(1j * field.modes * x)))


def sobolev_norm(field: SpectralField, s: float) -> float:
    """H^s norm (sum <n>^{2s} |uhat(n)|^2)^(1/2)."""
    w = bracket(field.modes) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(field.amplitudes) ** 2)))


def mass_gauge(field: SpectralField) -> float:
    """mu = sum |uhat(n)|^2, the gauge constant (1/2pi)*||u||_{L^2}^2."""
    return float(np.sum(np.abs(field.amplitudes) ** 2))


class GridSup(NamedTuple):
    value: float          # max over the sampling grid; certified lower bound
    upper_bound: float    # Bernstein-style envelope value * (1 + pi*N/M)


def sup_norm(field: SpectralField, lattice: LatticeSpec) -> GridSup:
    """Grid sup of |u| plus a Bernstein-corrected upper bound."""
    samples = evaluate_physical(field, lattice)
    value = float(np.max(np.abs(samples)))
    factor = 1.0 + np.pi * field.cutoff / lattice.points
    return GridSup(value, value * factor)


def _padded_points(cutoff: int) -> int:
    # alias-free grid for cubic products of cutoff-N fields (degree 3N)
    return 6 * cutoff + 2


def cubic_convolution(f1: SpectralField, f2: SpectralField, f3: SpectralField) -> SpectralField:
    """Full cubic sum_{n1-n2+n3=k} f1(n1) conj(f2(n2)) f3(n3), cutoff 3N."""
    N = _require_shared_cutoff(f1, f2, f3)
    points = _padded_points(N)
    s1 = synthesize(f1.amplitudes, N, points)
    s2 = synthesize(f2.amplitudes, N, points)
    s3 = synthesize(f3.amplitudes, N, points)
    return SpectralField(3 * N, analyze(s1 * np.conj(s2) * s3, 3 * N))


def _require_shared_cutoff(*fields: SpectralField) -> int:
    cutoffs = {f.cutoff for f in fields}
    if len(cutoffs) != 1:
        raise ContractError(f"fields must share a cutoff, got {sorted(cutoffs)}")
    return cutoffs.pop()


def apply_trilinear(kind: str, f1: SpectralField, f2: SpectralField, f3: SpectralField) -> SpectralField:
    """Trilinear pieces of the cubic product, at output cutoff 3N.

    kind="N2": diagonal part, mode n -> f1(n) conj(f2(n)) f3(n).
    kind="N1": off-diagonal part, sum over n1-n2+n3=k with n2 not in
    {n1, n3}.  Computed as the full convolution minus the three diagonal
    families:

        N1 = full - A*f3 - B*f1 + N2,
        A = sum_n f1(n) conj(f2(n)),  B = sum_n conj(f2(n)) f3(n),

    which is exact (the n1=n2=n3 diagonal is subtracted twice and restored
    once).  The splitting satisfies |f|^2 f - 2 mu f = N1(f) - N2(f).
    """
    N = _require_shared_cutoff(f1, f2, f3)
    diag = f1.amplitudes * np.conj(f2.amplitudes) * f3.amplitudes
    if kind == "N2":
        return SpectralField(N, diag).truncate(3 * N)
    if kind != "N1":
        raise ValueError(f"kind must be 'N1' or 'N2', got {kind!r}")
    full = cubic_convolution(f1, f2, f3)
    a = np.sum(f1.amplitudes * np.conj(f2.amplitudes))
    b = np.sum(np.conj(f2.amplitudes) * f3.amplitudes)
    out = full.amplitudes.copy()
    mid = slice(3 * N - N, 3 * N + N + 1)
    out[mid] -= a * f3.amplitudes + b * f1.amplitudes - diag
    return SpectralField(3 * N, out)
