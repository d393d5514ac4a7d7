import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlslab.config import ExperimentConfig
from nlslab.errors import ConfigError
from nlslab.ldp import (
    CoeffSpec,
    SupGridSpec,
    TailEstimate,
    error_scaling_study,
    exact_pointwise_tail,
    gronwall_monitor,
    hyper_tail_check,
    mc_sup_tail,
    rate_curve,
    sample_sups,
    tune_threshold,
    wilson_interval,
)
from nlslab.modified import AppFlow
from nlslab.random_data import make_initial_data
from nlslab.solver import LatticeSpec, SolverConfig, evolve


class TestWilson:
    @given(st.integers(0, 500), st.integers(1, 500))
    @settings(max_examples=60, deadline=None)
    def test_interval_contains_p_hat(self, hits, trials):
        hits = min(hits, trials)
        lo, hi = wilson_interval(hits, trials)
        assert 0.0 <= lo <= hits / trials <= hi <= 1.0

    def test_width_shrinks(self):
        w = []
        for n in (100, 1000, 10000):
            lo, hi = wilson_interval(int(0.05 * n), n)
            w.append(hi - lo)
        assert w[0] > w[1] > w[2]


class TestExactPointwiseTail:
    def test_r_equals_sigma(self):
        assert exact_pointwise_tail(2.0, 4.0) == pytest.approx(math.exp(-1))

    def test_r_zero(self):
        assert exact_pointwise_tail(0.0, 3.7) == 1.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            exact_pointwise_tail(1.0, 0.0)
        with pytest.raises(ConfigError):
            exact_pointwise_tail(-1.0, 1.0)


class TestTailEstimate:
    def test_z0_zero_means_certain(self):
        cfg = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=4, samples=1000, z0=0.0, master_seed=1)
        est = mc_sup_tail("linear", cfg)
        assert est.p_hat == 1.0
        assert est.rate == 0.0
        assert not est.censored

    def test_zero_hits_censored(self):
        est = TailEstimate.from_counts("linear", 0.1, 9.0, 0, 2000)
        assert est.censored
        assert est.rate == pytest.approx(-0.1 * math.log(1 / 2000))
        assert est.ci_low == 0.0

    def test_sample_floor(self):
        cfg = ExperimentConfig(samples=10)
        with pytest.raises(ConfigError):
            mc_sup_tail("linear", cfg)


class TestMcSupTail:
    def test_degenerate_grid_matches_pointwise_law(self):
        cfg0 = ExperimentConfig(epsilon=0.125, theta=0.25, cutoff=16, samples=20000, master_seed=5)
        sig2 = cfg0.sigma2()
        r = math.sqrt(-sig2 * math.log(0.05))
        cfg = ExperimentConfig(
            epsilon=0.125, theta=0.25, cutoff=16, samples=20000, master_seed=5,
            z0=r * math.sqrt(0.125),
        )
        grid = SupGridSpec.single_point(16, t=0.3, x=1.1)
        est = mc_sup_tail("linear", cfg, grid)
        assert est.ci_low <= exact_pointwise_tail(r, sig2) <= est.ci_high

    def test_sup_dominates_point_per_draw(self):
        # same-seed coupling: the full-grid sup exceeds the single-point value
        # for every draw, so the ordering is deterministic
        cfg = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=8, samples=200, master_seed=6)
        grid_full = SupGridSpec.for_flow(8, cfg.horizon())
        grid_pt = SupGridSpec.single_point(8, t=0.0, x=0.0)
        sup_full = sample_sups("modified", cfg, grid_full)
        sup_pt = sample_sups("modified", cfg, grid_pt)
        assert np.all(sup_full >= sup_pt - 1e-7)

    def test_modified_sup_dominates_pointwise_law(self):
        cfg = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=8, samples=2000, master_seed=7, z0=0.9)
        est = mc_sup_tail("modified", cfg)
        point = exact_pointwise_tail(cfg.z0 / math.sqrt(cfg.epsilon), cfg.sigma2())
        assert est.ci_high >= point - 0.01

    def test_worker_count_invariance(self):
        cfg1 = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=6, samples=1000, master_seed=8, workers=1)
        cfg2 = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=6, samples=1000, master_seed=8, workers=2)
        a = sample_sups("modified", cfg1)
        b = sample_sups("modified", cfg2)
        assert np.array_equal(a, b)

    def test_nonlinear_flow_small(self):
        cfg = ExperimentConfig(
            epsilon=0.25, theta=0.25, cutoff=6, samples=1000, master_seed=9, z0=0.4, dt=5e-2,
        )
        est = mc_sup_tail("nonlinear", cfg)
        assert 0 <= est.hits <= cfg.samples
        assert est.ci_low <= est.p_hat <= est.ci_high

    def test_unknown_flow(self):
        with pytest.raises(ConfigError):
            mc_sup_tail("cubic", ExperimentConfig(samples=1000))


class TestRateCurve:
    def test_reference_quadratic_in_z0(self):
        cfg = ExperimentConfig(theta=0.25, cutoff=8, samples=1000, master_seed=10)
        c1 = rate_curve("linear", [0.5, 0.25, 0.125], 0.4, cfg)
        c2 = rate_curve("linear", [0.5, 0.25, 0.125], 0.8, cfg)
        assert c2.reference == pytest.approx(4.0 * c1.reference, rel=1e-12)

    def test_censored_curve_still_returned(self):
        cfg = ExperimentConfig(theta=0.25, cutoff=6, samples=1000, master_seed=11)
        curve = rate_curve("linear", [0.5, 0.25, 0.125], 50.0, cfg)
        assert all(pt.estimate.censored for pt in curve.points)

    def test_requires_three_decreasing(self):
        cfg = ExperimentConfig(samples=1000)
        with pytest.raises(ConfigError):
            rate_curve("linear", [0.5, 0.25], 1.0, cfg)
        with pytest.raises(ConfigError):
            rate_curve("linear", [0.25, 0.5, 0.125], 1.0, cfg)

    def test_single_point_rate_matches_reference_for_every_eps(self):
        # at a single (t, x) the law is exact, so the measured rate equals
        # z0^2/sigma^2 up to Monte-Carlo error, independent of epsilon
        theta, cutoff = 0.25, 8
        grid = SupGridSpec.single_point(cutoff, t=0.4, x=2.0)
        sigma2 = ExperimentConfig(theta=theta, cutoff=cutoff).sigma2()
        for eps in (0.5, 0.25, 0.125):
            r = math.sqrt(-sigma2 * math.log(0.03))
            cfg = ExperimentConfig(
                epsilon=eps, theta=theta, cutoff=cutoff, samples=20000,
                master_seed=31, z0=r * math.sqrt(eps),
            )
            est = mc_sup_tail("linear", cfg, grid)
            reference = cfg.z0**2 / sigma2
            lo, hi = est.rate_interval()
            assert lo <= reference <= hi

    def test_tune_threshold_hits_target(self):
        cfg = ExperimentConfig(epsilon=0.25, theta=0.25, cutoff=8, samples=4000, master_seed=12)
        z0 = tune_threshold("modified", cfg, target_p=0.05, pilot_samples=4000)
        est = mc_sup_tail("modified", ExperimentConfig(
            epsilon=0.25, theta=0.25, cutoff=8, samples=4000, master_seed=12, z0=z0,
        ))
        assert 0.02 <= est.p_hat <= 0.10


class TestErrorScaling:
    def test_eps_zero_all_errors_zero(self):
        cfg = ExperimentConfig(
            theta=0.25, cutoff=6, samples=3, master_seed=13, dt=1e-2, horizon_override=1.0,
        )
        rows = error_scaling_study([0.0], 3, 0.625, cfg)
        assert rows[0].median_err <= 1e-11

    def test_rows_structure_and_scaling(self):
        cfg = ExperimentConfig(theta=0.25, cutoff=16, samples=6, master_seed=14, dt=1e-2)
        rows = error_scaling_study([0.2, 0.1], 6, 0.625, cfg)
        assert [r.epsilon for r in rows] == [0.2, 0.1]
        assert all(r.aborts == 0 and r.seeds_used == 6 for r in rows)
        assert rows[1].median_err < rows[0].median_err

    def test_max_attained_after_start(self):
        # the error starts at 0, so the running max lands at t > 0 in
        # essentially every run
        from nlslab.modified import error_trajectory

        late = 0
        for seed in range(30, 50):
            draw = make_initial_data(0.25, 16, seed)
            flow = AppFlow.from_draw(draw, 0.2)
            cfg = SolverConfig(epsilon=0.2, dt=1e-2, horizon=5.0, record_stride=10,
                               lattice=LatticeSpec(16))
            traj = evolve(draw.field, cfg)
            pts = error_trajectory(traj, flow, 0.625)
            late += max(pts, key=lambda p: p[1])[0] > 0
        assert late == 20


class TestGronwall:
    def _fixture(self, eps, seed=16):
        draw = make_initial_data(0.25, 16, seed)
        flow = AppFlow.from_draw(draw, eps)
        cfg = SolverConfig(epsilon=eps, dt=1e-2, horizon=1.0 / max(eps, 0.1), record_stride=10,
                           lattice=LatticeSpec(16))
        return evolve(draw.field, cfg), flow

    def test_eps_zero_inactive(self):
        traj, flow = self._fixture(0.0)
        rep = gronwall_monitor(traj, flow, 0.625, 0.0)
        assert not rep.active

    def test_deterministic(self):
        a = gronwall_monitor(*self._fixture(0.1), 0.625, 0.1)
        b = gronwall_monitor(*self._fixture(0.1), 0.625, 0.1)
        assert a == b

    def test_stable_across_eps(self):
        reps = []
        for eps in (0.2, 0.1):
            vals = []
            for seed in range(40, 46):
                traj, flow = self._fixture(eps, seed)
                vals.append(gronwall_monitor(traj, flow, 0.625, eps).cstar)
            reps.append(np.median(vals))
        assert reps[0] / reps[1] < 10 and reps[1] / reps[0] < 10


class TestHyperTail:
    def test_k1_exact_law(self):
        spec = CoeffSpec("diagonal", np.array([1.0]))
        rep = hyper_tail_check(1, spec, np.linspace(0.5, 3.0, 26), 2 * 10**5, seed=17)
        assert rep.c_fit == pytest.approx(1.0, abs=0.05)
        assert rep.bound_holds

    def test_scaling_invariance_exact(self):
        lam = np.linspace(0.5, 3.0, 26)
        a = hyper_tail_check(1, CoeffSpec("diagonal", np.array([1.0, 0.5])), lam, 10**5, seed=18)
        b = hyper_tail_check(1, CoeffSpec("diagonal", np.array([7.0, 3.5])), lam, 10**5, seed=18)
        assert np.array_equal(a.p_hat, b.p_hat)

    def test_k3_diagonal_heavy_tail(self):
        spec = CoeffSpec("diagonal", np.array([1.0, 0.7, 0.4]))
        rep = hyper_tail_check(3, spec, np.linspace(2.0, 6.0, 17), 3 * 10**5, seed=19)
        assert rep.slope_fit == pytest.approx(2.0 / 3.0, rel=0.25)

    def test_l2_norm_wick_pairings(self):
        from nlslab.ldp import _l2_norm_exact

        # distinct indices: a single matching permutation, E|g0 g1 g2|^2 = 1
        dense = CoeffSpec("dense", {(0, 1, 2): 2.0})
        assert _l2_norm_exact(3, dense) == pytest.approx(2.0)
        # repeated index: all 3! permutations match, E|g^3|^2 = 6
        cubed = CoeffSpec("dense", {(0, 0, 0): 2.0})
        assert _l2_norm_exact(3, cubed) == pytest.approx(2.0 * math.sqrt(6.0))
        diag = CoeffSpec("diagonal", np.array([2.0]))
        assert _l2_norm_exact(3, diag) == pytest.approx(2.0 * math.sqrt(6.0))

    def test_degenerate_rejected(self):
        with pytest.raises(ConfigError):
            hyper_tail_check(1, CoeffSpec("diagonal", np.zeros(3)), [1.0, 2.0], 10**5, seed=20)

    def test_k_validation(self):
        with pytest.raises(ConfigError):
            hyper_tail_check(4, CoeffSpec("diagonal", np.array([1.0])), [1.0], 10**5, seed=21)
