import math

import numpy as np
import pytest

from refugia.diagnostics import (DiagnosticsSettings, TooFewPeaksError, VerdictKind,
                                 classify_attractor, lyapunov_spectrum, peak_analysis)
from refugia.model import State, interior_equilibrium
from refugia.solver import Trajectory, integrate
from refugia.stability import char_coefficients, rightmost_root

SETTINGS = DiagnosticsSettings()


def synthetic_trajectory(params4, y_fn, horizon=300.0, step=0.01):
    times = np.arange(0.0, horizon + step / 2, step)
    y = y_fn(times)
    states = np.column_stack((np.full_like(times, 50.0), y))
    dy = np.gradient(y, step)
    derivs = np.column_stack((np.zeros_like(times), dy))
    return Trajectory(params=params4, phi=State(50.0, y[0]), step=step,
                      times=times, states=states, derivs=derivs)


class TestPeakAnalysis:
    def test_pure_sinusoid_single_cluster(self, params4):
        traj = synthetic_trajectory(params4, lambda t: 100.0 + np.sin(t))
        peaks, clusters = peak_analysis(traj, 50.0, 1e-3)
        assert clusters == 1
        assert len(peaks) >= 30
        assert max(peaks) == pytest.approx(101.0, abs=1e-5)  # quadratic refinement

    def test_two_amplitude_oscillation(self, params4):
        # subharmonic makes consecutive maxima alternate between two heights
        traj = synthetic_trajectory(
            params4, lambda t: 100.0 + np.sin(t) + 0.5 * np.sin(t / 2))
        _, clusters = peak_analysis(traj, 50.0, 1e-3)
        assert clusters == 2

    def test_constant_trajectory_has_no_peaks(self, params4):
        traj = synthetic_trajectory(params4, lambda t: np.full_like(t, 97.0))
        with pytest.raises(TooFewPeaksError):
            peak_analysis(traj, 50.0, 1e-3)

    def test_reference_1T_and_2T(self, params4, phi4):
        for tau2, expect in ((0.3, 1), (0.4, 2)):
            p = params4.with_delays(0.5, tau2)
            traj = integrate(p, phi4, 1500.0, 0.005, keep_from=500.0)
            _, clusters = peak_analysis(traj, 500.0, 1e-3)
            assert clusters == expect

    def test_phase_shift_invariance(self, params4, phi4):
        # moving the transient cut by one orbit period keeps the cluster count
        p = params4.with_delays(0.5, 0.4)
        traj = integrate(p, phi4, 1500.0, 0.005, keep_from=500.0)
        _, c0 = peak_analysis(traj, 500.0, 1e-3)
        y = traj.y
        idx = np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0]
        period = 2.0 * float(np.mean(np.diff(idx))) * traj.step  # 2T orbit
        _, c1 = peak_analysis(traj, 500.0 + period, 1e-3)
        assert c0 == c1 == 2


class TestLyapunov:
    def test_stable_regime_matches_rightmost_root(self, params4, eq4):
        p = params4.with_delays(0.0, 0.18)
        lam = rightmost_root(char_coefficients(p, eq4), 0.0, 0.18)
        spec = lyapunov_spectrum(p, (eq4.x_star, eq4.y_star), 2, SETTINGS)
        assert spec.largest < 0
        assert spec.largest == pytest.approx(lam.real, abs=2e-3)
        assert list(spec.exponents) == sorted(spec.exponents, reverse=True)
        assert spec.state_dim_discretized == 2 * (int(math.ceil(0.18 / 0.005)) + 1)

    def test_limit_cycle_zero_exponent(self, params4, phi4):
        spec = lyapunov_spectrum(params4.with_delays(0.0, 0.23), phi4, 1, SETTINGS)
        assert -0.01 < spec.largest < 0.01

    def test_chaotic_regime_positive(self, params4, phi4):
        spec = lyapunov_spectrum(params4.with_delays(0.7, 0.8), phi4, 2, SETTINGS)
        assert spec.largest > 0.02
        # second exponent ~ 0: the flow direction of the attractor
        assert abs(spec.exponents[1]) < 0.01

    def test_window_doubling_stability(self, params4, phi4):
        p = params4.with_delays(0.7, 0.8)
        short = lyapunov_spectrum(p, phi4, 1,
                                  DiagnosticsSettings(lyap_window=1000.0)).largest
        full = lyapunov_spectrum(p, phi4, 1,
                                 DiagnosticsSettings(lyap_window=2000.0)).largest
        assert abs(full - short) < 0.2 * abs(full)

    def test_validation(self, params4, phi4):
        with pytest.raises(ValueError):
            lyapunov_spectrum(params4, phi4, 0, SETTINGS)
        with pytest.raises(ValueError):
            lyapunov_spectrum(params4, phi4, 3, SETTINGS)  # ODE case: dim 2


class TestClassify:
    @pytest.mark.parametrize("tau1,tau2,kind,n", [
        (0.0, 0.0, VerdictKind.FIXED_POINT, None),
        (0.0, 0.18, VerdictKind.FIXED_POINT, None),
        (0.0, 0.23, VerdictKind.PERIODIC, 1),
        (0.5, 0.53, VerdictKind.PERIODIC, 4),
        (0.7, 0.8, VerdictKind.CHAOTIC, None),
    ])
    def test_reference_regimes(self, params4, phi4, tau1, tau2, kind, n):
        v = classify_attractor(params4.with_delays(tau1, tau2), phi4, SETTINGS)
        assert v.kind is kind
        if n is not None:
            assert v.period_count == n

    def test_fixed_point_only_where_linearly_stable(self, params4, phi4, eq4):
        probes = [(0.0, 0.0), (0.0, 0.1), (0.0, 0.18), (0.1, 0.15), (0.2, 0.12),
                  (0.3, 0.08), (0.4, 0.05), (0.5, 0.02), (0.55, 0.0), (0.3, 0.0),
                  (0.0, 0.23), (0.5, 0.3), (0.5, 0.4), (0.5, 0.53), (0.5, 0.65),
                  (0.7, 0.8), (0.9, 0.9), (0.2, 0.3), (0.1, 0.4), (0.8, 0.2)]
        co = char_coefficients(params4, eq4)
        for tau1, tau2 in probes:
            v = classify_attractor(params4.with_delays(tau1, tau2), phi4, SETTINGS)
            if v.kind is VerdictKind.FIXED_POINT:
                assert rightmost_root(co, tau1, tau2).real < 0, (tau1, tau2)
            if v.kind is VerdictKind.PERIODIC:
                assert abs(v.lle) < 0.01, (tau1, tau2, v.lle)

    def test_verdict_fields(self, params4, phi4):
        v = classify_attractor(params4.with_delays(0.5, 0.4), phi4, SETTINGS)
        assert v.label == "Periodic2"
        assert v.peak_clusters == 2
        assert len(v.peak_values) > 50
        v = classify_attractor(params4, phi4, SETTINGS)
        assert v.label == "FixedPoint" and math.isnan(v.lle)
