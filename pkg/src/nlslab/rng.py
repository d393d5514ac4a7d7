"""Counter-based random number generation.

Every random quantity in the package is a pure function of (master seed,
stream label, index, mode).  Draws are therefore reproducible bit-for-bit
under any execution order and any degree of parallelism.

The generator is a stateless SplitMix64-style counter stream: for a 64-bit
seed s and counter j the output word is ``mix64(s + GOLDEN*(j+1))``, where
mix64 is the standard xor-shift/multiply avalanche finalizer.  A complex
standard Gaussian (normalized so E|g|^2 = 1, hence P(|g| > r) = exp(-r^2))
is produced from two consecutive words via the polar Box-Muller map

    g = sqrt(-log u1) * exp(2*pi*i*u2),   u1 in (0,1], u2 in [0,1).

Per-mode counters depend only on the mode index, so the value drawn for
mode n is independent of the lattice cutoff in use.
"""

from __future__ import annotations

import hashlib

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# offset keeping mode counters nonnegative; supports |n| up to 2^31
_MODE_OFFSET = 2**31


def mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    x = np.bitwise_xor(x, x >> np.uint64(30)) * _MIX1
    x = np.bitwise_xor(x, x >> np.uint64(27)) * _MIX2
    return np.bitwise_xor(x, x >> np.uint64(31))


def derive_seed(master_seed: int, stream_label: str, index: int) -> int:
    """Collision-resistant 64-bit seed from (master seed, label, index).

    SHA-256 of the ASCII triple, first 8 bytes big-endian.  This mapping is
    part of the on-disk reproducibility contract and must not change.
    """
    digest = hashlib.sha256(f"{master_seed}:{stream_label}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def mode_counters(cutoff: int) -> np.ndarray:
    """Counter codes for modes -cutoff..cutoff (uint64)."""
    return (np.arange(-cutoff, cutoff + 1) + _MODE_OFFSET).astype(np.uint64)


def _words(seeds: np.ndarray, counters: np.ndarray) -> np.ndarray:
    return mix64(seeds[:, None] + _GOLDEN * (counters[None, :] + np.uint64(1)))


def complex_gaussians(seeds, counters) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians, one row per seed.

    seeds: uint64 array (B,); counters: uint64 array (m,).  Entry (i, j)
    depends only on (seeds[i], counters[j]).  E|g|^2 = 1 with independent
    real/imaginary parts of variance 1/2.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    c2 = counters * np.uint64(2)
    z1 = _words(seeds, c2)
    z2 = _words(seeds, c2 + np.uint64(1))
    # top 53 bits -> doubles; +1 keeps u1 in (0,1] so the log is finite
    u1 = ((z1 >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (z2 >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def gaussian_modes(seed: int, cutoff: int) -> np.ndarray:
    """Gaussian vector g_n for modes |n| <= cutoff from a single seed."""
    return complex_gaussians(np.array([seed], dtype=np.uint64), mode_counters(cutoff))[0]
