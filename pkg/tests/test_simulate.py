import numpy as np
import pytest

from commons_mrac import (
    AdaptiveInspection,
    FixedInspection,
    GameParams,
    IntegrationError,
    Phase,
    PopState,
    RegimeLabel,
    Schedule,
    classify_regime,
    detect_convergence,
    integrate,
    sweep_phase_plane,
)
from commons_mrac.simulate import DEFAULT_ADAPT_RATE

from conftest import run_preset


def _fixed_schedule(t_end=200.0, p_hat=0.09):
    return Schedule((Phase(0.0, t_end, FixedInspection(p_hat)),))


class TestSchedule:
    def test_gap_rejected(self):
        with pytest.raises(ValueError, match="contiguous"):
            Schedule((
                Phase(0.0, 10.0, FixedInspection(0.1)),
                Phase(11.0, 20.0, FixedInspection(0.2)),
            ))

    def test_two_adaptive_phases_rejected(self):
        with pytest.raises(ValueError, match="at most one"):
            Schedule((
                Phase(0.0, 10.0, AdaptiveInspection(1e-5)),
                Phase(10.0, 20.0, AdaptiveInspection(1e-5)),
            ))

    def test_adaptive_phase_must_be_last(self):
        with pytest.raises(ValueError, match="last"):
            Schedule((
                Phase(0.0, 10.0, AdaptiveInspection(1e-5)),
                Phase(10.0, 20.0, FixedInspection(0.1)),
            ))

    def test_reversed_phase_rejected(self):
        with pytest.raises(ValueError):
            Phase(10.0, 0.0, FixedInspection(0.1))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Schedule(())


class TestIntegrate:
    def test_pure_cooperation_is_invariant(self, params1):
        traj = integrate(params1, _fixed_schedule(), 1.0, 40.0, 0.5, 50.0, 0.09)
        assert np.all(traj.x == 1.0)

    def test_zero_stock_is_invariant(self, params1):
        traj = integrate(params1, _fixed_schedule(), 0.4, 0.0, 0.5, 50.0, 0.09)
        assert np.all(traj.y == 0.0)

    def test_first_sample_is_initial_condition(self, params1):
        traj = integrate(params1, _fixed_schedule(), 0.37, 42.5, 0.61, 33.25, 0.09)
        assert traj.t[0] == 0.0
        assert traj.x[0] == 0.37 and traj.y[0] == 42.5
        assert traj.x_m[0] == 0.61 and traj.y_m[0] == 33.25

    def test_time_strictly_increasing(self, params1):
        traj = integrate(params1, _fixed_schedule(), 0.5, 50.0, 0.5, 50.0, 0.09, stride=7)
        assert np.all(np.diff(traj.t) > 0)
        assert traj.t[-1] == pytest.approx(200.0, rel=1e-12)

    def test_step_must_divide_phases(self, params1):
        sched = Schedule((
            Phase(0.0, 10.0, FixedInspection(0.09)),
            Phase(10.0, 10.005, FixedInspection(0.07)),
        ))
        with pytest.raises(IntegrationError, match="phase 1"):
            integrate(params1, sched, 0.5, 50.0, 0.5, 50.0, 0.09, 0.01)

    def test_horizon_must_match_schedule(self, params1):
        with pytest.raises(IntegrationError, match="horizon"):
            integrate(params1, _fixed_schedule(200.0), 0.5, 50.0, 0.5, 50.0, 0.09,
                      0.01, horizon=500.0)

    def test_initial_conditions_validated(self, params1):
        with pytest.raises(ValueError, match="x0"):
            integrate(params1, _fixed_schedule(), 1.2, 50.0, 0.5, 50.0, 0.09)
        with pytest.raises(ValueError, match="y0"):
            integrate(params1, _fixed_schedule(), 0.5, 101.0, 0.5, 50.0, 0.09)

    def test_tracking_identity(self, params1):
        traj = integrate(params1, _fixed_schedule(p_hat=0.07), 0.4, 30.0, 0.6, 60.0, 0.07)
        assert np.array_equal(traj.e1, traj.x - traj.x_m)
        assert np.array_equal(traj.e2, traj.y - traj.y_m)

    def test_reference_channel_is_autonomous(self, params1):
        # bit-identical reference states for runs differing only in plant
        # initial conditions and schedule
        a = integrate(params1, _fixed_schedule(p_hat=0.09), 0.2, 70.0, 0.5, 50.0, 0.09)
        sched_b = Schedule((
            Phase(0.0, 100.0, FixedInspection(0.03)),
            Phase(100.0, 200.0, AdaptiveInspection(2e-5)),
        ))
        b = integrate(params1, sched_b, 0.9, 10.0, 0.5, 50.0, 0.03)
        assert np.array_equal(a.x_m, b.x_m)
        assert np.array_equal(a.y_m, b.y_m)

    def test_phase_column_and_inspection_jump(self, params1):
        sched = Schedule((
            Phase(0.0, 5.0, FixedInspection(0.09)),
            Phase(5.0, 10.0, FixedInspection(0.07)),
        ))
        traj = integrate(params1, sched, 0.5, 50.0, 0.5, 50.0, 0.09)
        at_boundary = np.searchsorted(traj.t, 5.0)
        # boundary sample belongs to the phase that ends there
        assert traj.phase_index[at_boundary] == 0
        assert traj.p_hat[at_boundary] == 0.09
        assert traj.p_hat[at_boundary + 1] == 0.07
        assert traj.phase_index[at_boundary + 1] == 1

    def test_zero_length_adaptive_phase_is_a_fixed_run(self, params1):
        plain = integrate(params1, _fixed_schedule(100.0), 0.5, 50.0, 0.5, 50.0, 0.09)
        padded = integrate(
            params1,
            Schedule((
                Phase(0.0, 100.0, FixedInspection(0.09)),
                Phase(100.0, 100.0, AdaptiveInspection(DEFAULT_ADAPT_RATE)),
            )),
            0.5, 50.0, 0.5, 50.0, 0.09,
        )
        for name in ("t", "x", "y", "x_m", "y_m", "p_hat", "v_lyap", "phase_index"):
            assert np.array_equal(getattr(plain, name), getattr(padded, name)), name

    def test_v_column_nan_without_stable_reference(self):
        # r < e_c: no positive-definite gain matrix exists
        p = GameParams(r=0.4, alpha=0.5, beta=0.5, n_players=100,
                       r_max=100.0, b_max=0.5, p_star=0.09)
        traj = integrate(p, _fixed_schedule(50.0), 0.5, 50.0, 0.5, 50.0, 0.09)
        assert np.all(np.isnan(traj.v_lyap))

    def test_unstable_reference_with_adaptive_phase_raises(self):
        from commons_mrac import ReferenceUnstableError

        p = GameParams(r=0.4, alpha=0.5, beta=0.5, n_players=100,
                       r_max=100.0, b_max=0.5, p_star=0.09)
        sched = Schedule((Phase(0.0, 10.0, AdaptiveInspection(1e-5)),))
        with pytest.raises(ReferenceUnstableError):
            integrate(p, sched, 0.5, 50.0, 0.5, 50.0, 0.09)

    @pytest.mark.parametrize("name", ["example1", "example2", "example3"])
    def test_step_halving_leaves_terminal_state(self, name):
        cfg, coarse = run_preset(name)
        fine = integrate(
            cfg.params, cfg.schedule, cfg.x0, cfg.y0, cfg.xm0, cfg.ym0,
            cfg.p_hat0, cfg.step / 2.0, cfg.horizon, clamp_p=cfg.clamp_p, stride=20,
        )
        for a, b in ((coarse.x, fine.x), (coarse.y, fine.y),
                     (coarse.x_m, fine.x_m), (coarse.y_m, fine.y_m)):
            assert abs(a[-1] - b[-1]) < 1e-6

    def test_inspection_violation_flagged(self, params1):
        # a plain fixed phase is allowed to probe out-of-range intensities,
        # and the run must say so
        traj = integrate(params1, _fixed_schedule(10.0, p_hat=1.3), 0.5, 50.0, 0.5, 50.0, 1.3)
        assert traj.p_hat_violation
        assert traj.p_hat_max == 1.3


class TestDetectConvergence:
    def test_constant_at_target(self, params1):
        target = PopState(1.0, params1.desired_stock)
        traj = integrate(params1, _fixed_schedule(200.0), 1.0, target.y, 1.0, target.y, 0.09)
        ok, settle = detect_convergence(traj, target)
        assert ok
        assert settle == 0.0

    def test_far_trajectory_not_converged(self, params1):
        traj = integrate(params1, _fixed_schedule(200.0), 0.5, 50.0, 0.5, 50.0, 0.09)
        ok, settle = detect_convergence(traj, PopState(1.0, params1.desired_stock))
        assert not ok
        assert settle is None

    def test_window_longer_than_run_rejected(self, params1):
        traj = integrate(params1, _fixed_schedule(50.0), 0.5, 50.0, 0.5, 50.0, 0.09)
        with pytest.raises(ValueError, match="window"):
            detect_convergence(traj, PopState(1.0, 16.0), window=500.0)

    def test_settle_time_is_earliest(self, params2):
        cfg, traj = run_preset("example2")
        target = PopState(1.0, params2.desired_stock)
        ok, settle = detect_convergence(traj, target)
        assert ok
        dist = np.maximum(np.abs(traj.x - 1.0), np.abs(traj.y - target.y) / 100.0)
        i = np.searchsorted(traj.t, settle)
        assert np.all(dist[i:] < 1e-3)
        assert dist[i - 1] >= 1e-3


class TestClassifyRegime:
    def test_sufficient_inspection_reaches_desired(self, params2):
        assert classify_regime(params2, 0.2) is RegimeLabel.DESIRED

    def test_collapsed_inspection_reaches_all_defect(self, params2):
        # p_hat*beta = 0.001 below the defector-rate curve: cooperators die
        # out, the stock settles at the all-defector level 6.25
        assert classify_regime(params2, 0.002) is RegimeLabel.ALL_DEFECT_SUSTAINED

    def test_slow_growth_depletes(self):
        p = GameParams(r=0.4, alpha=0.5, beta=0.5, n_players=100,
                       r_max=100.0, b_max=0.5, p_star=0.09)
        assert classify_regime(p, 0.3) is RegimeLabel.DEPLETED

    def test_intermediate_inspection_coexists(self, params1):
        assert classify_regime(params1, 0.07) is RegimeLabel.COEXISTENCE


class TestRegimeConsistency:
    def test_thresholds_predict_reference_convergence(self):
        # p_star > p_upper and r > e_c  <=>  the reference model reaches the
        # all-cooperator sustained point from an interior start.  Sampled
        # away from the thresholds, where the horizon is decisive.
        from commons_mrac import regime_thresholds
        from conftest import sample_params

        rng = np.random.RandomState(60)
        tested = 0
        while tested < 12:
            p = sample_params(rng)
            thr = regime_thresholds(p)
            margin_r = p.r - thr.e_c
            margin_p = (p.p_star - thr.p_upper) * p.beta
            if abs(margin_r) < 0.05 or abs(margin_p) < 0.01 or p.desired_stock < 0.05 * p.r_max:
                continue
            expected = margin_r > 0 and margin_p > 0
            label = classify_regime(p, p.p_star, horizon=4000.0)
            assert (label is RegimeLabel.DESIRED) == expected, (p, thr, label)
            tested += 1

    @pytest.mark.parametrize("name", ["example1", "example2", "example3"])
    def test_preset_inspection_stays_in_unit_interval(self, name):
        _, traj = run_preset(name)
        assert not traj.p_hat_violation


class TestAdmissibleDescent:
    def test_admissible_start_gives_monotone_descent(self, params1):
        # start inside the certified ball (reference transient already
        # settled): V must never rise per step and the error must vanish
        from commons_mrac import check_admissible, maximize_m
        from commons_mrac.controller import ControllerState, ErrorVector

        settle = integrate(params1, _fixed_schedule(3000.0), 0.99, 17.0, 0.99, 17.0, 0.09)
        xm0 = float(settle.x_m[-1])
        ym0 = float(settle.y_m[-1])
        sched = Schedule((Phase(0.0, 2000.0, AdaptiveInspection(1e-5)),))
        traj = integrate(params1, sched, xm0, ym0 + 5e-6, xm0, ym0, 0.09)
        est = maximize_m(params1, traj.gains, traj.adapt_rate, 1.0,
                         np.geomspace(1e-9, 0.9, 46))
        ctrl = ControllerState(gains=traj.gains, a=traj.adapt_rate,
                               p_hat=0.09, p_star=params1.p_star)
        ok, slack = check_admissible(ctrl, ErrorVector(traj.e1[0], traj.e2[0]), est)
        assert ok and slack > 0
        assert np.all(np.diff(traj.v_lyap) <= 1e-8)
        assert np.hypot(traj.e1[-1], traj.e2[-1]) < 1e-4


class TestSweep:
    def test_single_cell_matches_classify(self, params1):
        m = sweep_phase_plane(params1, [0.6], [0.045], horizon=3000.0)
        assert m.labels[0][0] is classify_regime(params1, 0.09, horizon=3000.0)

    def test_rows_are_row_major_and_match_grid(self, params1):
        m = sweep_phase_plane(params1, [0.6, 0.9], [0.02, 0.1], horizon=500.0)
        rows = list(m.rows())
        assert [(r, pb) for r, pb, _ in rows] == [
            (0.6, 0.02), (0.6, 0.1), (0.9, 0.02), (0.9, 0.1)
        ]

    def test_threshold_cells_labelled_boundary(self, params1):
        # r = 0.5 sits exactly on the cooperator gain rate
        m = sweep_phase_plane(params1, [0.46, 0.5, 0.54], [0.06], horizon=500.0)
        assert m.labels[1][0] is RegimeLabel.BOUNDARY

    def test_deterministic(self, params1):
        grid_r = [0.6, 0.9]
        grid_p = [0.02, 0.12]
        a = sweep_phase_plane(params1, grid_r, grid_p, horizon=1000.0)
        b = sweep_phase_plane(params1, grid_r, grid_p, horizon=1000.0)
        assert a.labels == b.labels

    def test_empty_grid_rejected(self, params1):
        with pytest.raises(ValueError):
            sweep_phase_plane(params1, [], [0.1])
