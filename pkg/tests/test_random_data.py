import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlslab import rng
from nlslab.errors import ConfigError
from nlslab.ldp import wilson_interval
from nlslab.random_data import (
    make_initial_data,
    phase_invariance_stat,
    truncated_variance,
)
from nlslab.spectral import mass_gauge


def _mode_column(n_mode: int, count: int, master: int = 77) -> np.ndarray:
    """g_{n_mode} across `count` independent draws, vectorized."""
    seeds = np.array([rng.derive_seed(master, "mc", i) for i in range(count)], dtype=np.uint64)
    counter = rng.mode_counters(abs(n_mode))[[n_mode + abs(n_mode)]] if n_mode else rng.mode_counters(0)
    return rng.complex_gaussians(seeds, counter)[:, 0]


class TestMakeInitialData:
    def test_deterministic(self):
        a = make_initial_data(0.25, 16, 123)
        b = make_initial_data(0.25, 16, 123)
        assert np.array_equal(a.gaussians, b.gaussians)
        assert np.array_equal(a.field.amplitudes, b.field.amplitudes)

    def test_mode_draw_independent_of_cutoff(self):
        small = make_initial_data(0.25, 4, 9)
        large = make_initial_data(0.25, 12, 9)
        assert np.array_equal(small.gaussians, large.gaussians[8:17])

    def test_coefficients(self):
        d = make_initial_data(0.5, 3, 1)
        n = np.arange(-3, 4)
        expect = (1.0 + n.astype(float) ** 2) ** (-0.5)
        assert np.allclose(np.abs(d.field.amplitudes / d.gaussians), expect, rtol=1e-14)

    def test_theta_nonpositive_rejected(self):
        with pytest.raises(ConfigError):
            make_initial_data(0.0, 8, 1)
        with pytest.raises(ConfigError):
            make_initial_data(-0.3, 8, 1)

    def test_serialization_header_and_field(self):
        import json

        from nlslab.spectral import SpectralField

        d = make_initial_data(0.25, 5, 99)
        blob = json.loads(json.dumps(d.to_json_dict()))
        assert blob["seed"] == 99 and blob["theta"] == 0.25 and blob["cutoff"] == 5
        back = SpectralField.from_json_dict(blob["field"])
        assert np.array_equal(back.amplitudes, d.field.amplitudes)

    def test_second_moment_of_g5(self):
        n = 10**5
        col = _mode_column(5, n)
        m2 = np.abs(col) ** 2
        se = m2.std() / np.sqrt(n)
        assert abs(m2.mean() - 1.0) <= 3 * se

    def test_rayleigh_tail_of_g0(self):
        n = 10**5
        col = _mode_column(0, n)
        hits = int(np.sum(np.abs(col) > 1.0))
        lo, hi = wilson_interval(hits, n)
        width = hi - lo
        assert abs(hits / n - np.exp(-1)) <= 3 * width

    def test_moment_conventions(self):
        n = 2 * 10**5
        col = _mode_column(3, n)
        assert abs(col.mean()) <= 4 / np.sqrt(n)
        assert abs(col.real.var() - 0.5) <= 4 * 0.5 / np.sqrt(n) * np.sqrt(2)
        assert abs(col.imag.var() - 0.5) <= 4 * 0.5 / np.sqrt(n) * np.sqrt(2)

    def test_cross_mode_independence(self):
        n = 10**4
        seeds = np.array([rng.derive_seed(3, "mc", i) for i in range(n)], dtype=np.uint64)
        g = rng.complex_gaussians(seeds, rng.mode_counters(6))
        for m, k in ((0, 5), (3, 9), (1, 12)):
            corr = np.mean(g[:, m] * np.conj(g[:, k]))
            assert abs(corr) < 4 / np.sqrt(n)

    def test_expected_mass_matches_truncated_variance(self):
        count, cutoff, theta = 10**5, 64, 0.25
        seeds = np.array([rng.derive_seed(11, "mc", i) for i in range(count)], dtype=np.uint64)
        g = rng.complex_gaussians(seeds, rng.mode_counters(cutoff))
        from nlslab.random_data import coefficient_profile

        c2 = coefficient_profile(theta, cutoff) ** 2
        masses = (np.abs(g) ** 2) @ c2
        sigma2, _ = truncated_variance(theta, cutoff)
        se = masses.std() / np.sqrt(count)
        assert abs(masses.mean() - sigma2) <= 3 * se
        # one full draw object agrees with the vectorized path
        d = make_initial_data(theta, cutoff, int(seeds[0]))
        assert mass_gauge(d.field) == pytest.approx(masses[0], rel=1e-12)


class TestTruncatedVariance:
    def test_hand_sum(self):
        sigma2, _ = truncated_variance(0.25, 2)
        assert sigma2 == pytest.approx(1 + 2 * 2**-0.75 + 2 * 5**-0.75, rel=1e-14)

    def test_cutoff_zero_single_term(self):
        for theta in (0.1, 0.25, 1.0):
            assert truncated_variance(theta, 0)[0] == pytest.approx(1.0)

    def test_growth_small_beyond_64(self):
        a, _ = truncated_variance(0.25, 64)
        b, _ = truncated_variance(0.25, 128)
        assert 0 < b - a < 0.1 * a

    def test_tail_estimate_bounds_left_out_mass(self):
        theta = 0.25
        sigma2_64, tail = truncated_variance(theta, 64)
        sigma2_big, _ = truncated_variance(theta, 4096)
        assert sigma2_big - sigma2_64 <= tail

    @given(st.floats(min_value=0.05, max_value=3), st.integers(min_value=1, max_value=200))
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_cutoff(self, theta, cutoff):
        a, _ = truncated_variance(theta, cutoff)
        b, _ = truncated_variance(theta, cutoff + 1)
        assert b > a


class TestPhaseInvariance:
    def test_identity_map_passes(self):
        rep = phase_invariance_stat(10**4, 0.0, 5)
        assert rep.passed
        assert not rep.dependence_flagged

    def test_invariance_at_t_one(self):
        rep = phase_invariance_stat(10**5, 1.0, 6)
        assert rep.passed
        assert not rep.dependence_flagged

    def test_real_part_contrast_detected(self):
        rep = phase_invariance_stat(10**5, 1.0, 7, phase_source="real_part")
        assert rep.passed_modulus            # modulus law is untouched
        assert rep.dependence_flagged        # joint dependence is visible
        assert abs(rep.dependence_corr) > 0.05

    def test_sample_floor(self):
        with pytest.raises(ConfigError):
            phase_invariance_stat(100, 1.0, 5)
