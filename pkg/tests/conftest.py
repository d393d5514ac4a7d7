"""Shared brute-force oracles.

These deliberately avoid the library's fast paths: direct summation instead
of FFT, triple loops instead of convolution, so each test compares two
independent routes to the same number.
"""

import numpy as np
import pytest

from nlslab.spectral import SpectralField


def direct_samples(field: SpectralField, points: int) -> np.ndarray:
    """O(N*M) direct evaluation of sum_n a_n e^{inx_j}."""
    x = 2.0 * np.pi * np.arange(points) / points
    out = np.zeros(points, dtype=complex)
    for n, a in zip(field.modes, field.amplitudes):
        out += a * np.exp(1j * n * x)
    return out


def triple_loop_cubic(f1: SpectralField, f2: SpectralField, f3: SpectralField, kind: str):
    """Triple-loop evaluation of the trilinear pieces, output cutoff 3N."""
    N = f1.cutoff
    out = SpectralField.zeros(3 * N)
    for n1 in range(-N, N + 1):
        a1 = f1[n1]
        if a1 == 0:
            continue
        for n2 in range(-N, N + 1):
            a2 = np.conj(f2[n2])
            if a2 == 0:
                continue
            for n3 in range(-N, N + 1):
                a3 = f3[n3]
                if a3 == 0:
                    continue
                k = n1 - n2 + n3
                if kind == "full":
                    keep = True
                elif kind == "N1":
                    keep = n2 != n1 and n2 != n3
                elif kind == "N2":
                    keep = n1 == n2 == n3
                else:
                    raise ValueError(kind)
                if keep:
                    out.amplitudes[k + 3 * N] += a1 * a2 * a3
    return out


def triple_loop_key_sum(variant: int, k: int, K: int, s: float, theta: float, delta5: float) -> float:
    total = 0.0
    for k1 in range(-K, K + 1):
        for k2 in range(-K, K + 1):
            k3 = k - k1 + k2
            if abs(k3) > K or k2 == k1 or k2 == k3:
                continue
            om = k1 * k1 - k2 * k2 + k3 * k3 - k * k
            if om == 0:
                continue
            b1 = (1.0 + k1 * k1) ** 0.5
            b2 = (1.0 + k2 * k2) ** 0.5
            b3 = (1.0 + k3 * k3) ** 0.5
            if variant == 1:
                w = b1**s * b2**s * b3 ** (theta - delta5)
            else:
                w = b1**s * b3**s * b2 ** (theta - delta5)
            total += 1.0 / (abs(om) * w)
    return total


def random_field(cutoff: int, rng: np.random.Generator, scale: float = 1.0) -> SpectralField:
    re = rng.normal(size=2 * cutoff + 1)
    im = rng.normal(size=2 * cutoff + 1)
    return SpectralField(cutoff, scale * (re + 1j * im))


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
