import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from refugia.model import (InfeasibleEquilibriumError, ModelParams, State,
                           boundary_equilibria, feasibility_m_bound,
                           feasibility_theta_bound, interior_equilibrium,
                           nondelay_stability_conditions, persistence_conditions,
                           response, rhs)
from refugia.stability import char_coefficients
from conftest import draw_feasible

REF = oracles.section4_reference()


class TestParams:
    def test_rejects_nonpositive_constants(self):
        for field in ("r", "k", "alpha", "h", "theta", "d"):
            with pytest.raises(ValueError, match=field):
                ModelParams(**{**_kw(), field: 0.0})
            with pytest.raises(ValueError, match=field):
                ModelParams(**{**_kw(), field: -1.0})

    def test_rejects_bad_refuge_and_delays(self):
        with pytest.raises(ValueError):
            ModelParams(**{**_kw(), "m": -0.1})
        with pytest.raises(ValueError):
            ModelParams(**{**_kw(), "m": 1.5})
        with pytest.raises(ValueError):
            ModelParams(**{**_kw(), "tau1": -0.1})
        with pytest.raises(ValueError):
            ModelParams(**{**_kw(), "m": math.nan})

    def test_total_refuge_endpoint_allowed(self):
        assert ModelParams(**{**_kw(), "m": 1.0}).m == 1.0


def _kw():
    return dict(r=2.65, k=898.0, alpha=0.045, m=0.45, h=0.0437, theta=0.215, d=1.06)


class TestResponse:
    def test_zero_prey(self, params4):
        assert response(params4, 0.0) == 0.0

    def test_total_refuge(self, params4):
        assert response(replace(params4, m=1.0), 123.4) == 0.0

    def test_equilibrium_identity(self, params4, eq4):
        # theta * g(x*) = d exactly at the interior equilibrium
        assert response(params4, eq4.x_star) == pytest.approx(params4.d / params4.theta,
                                                              rel=1e-12)

    @given(st.floats(0.0, 1e4), st.floats(0.0, 1e4))
    def test_monotone_and_bounded(self, x1, x2):
        p = ModelParams(**_kw())
        lo, hi = sorted((x1, x2))
        assert response(p, lo) <= response(p, hi) <= 1.0 / p.h

    @given(st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(1e-6, 1e4))
    def test_refuge_strictly_decreasing(self, m1, m2, x):
        lo, hi = sorted((m1, m2))
        if hi - lo < 1e-9:
            return  # below float resolution of (1 - m)
        p = _kw()
        assert response(ModelParams(**{**p, "m": hi}), x) \
            < response(ModelParams(**{**p, "m": lo}), x)


class TestRhs:
    def test_equilibrium_annihilates(self, params4, eq4):
        dx, dy = rhs(params4, State(eq4.x_star, eq4.y_star), eq4.x_star, eq4.x_star)
        scale = math.hypot(eq4.x_star, eq4.y_star)
        assert math.hypot(dx, dy) <= 1e-9 * scale

    def test_extinct_predator_stays_extinct(self, params4):
        _, dy = rhs(params4, State(42.0, 0.0), 10.0, 77.0)
        assert dy == 0.0

    def test_matches_independent_evaluation(self, params4):
        # oracle: 40-digit mpmath re-evaluation of the two formulas
        want = oracles.rhs_reference(30.0, 5.83, 30.0, 30.0)
        got = rhs(params4, State(30.0, 5.83), 30.0, 30.0)
        assert got[0] == pytest.approx(want[0], rel=1e-13)
        assert got[1] == pytest.approx(want[1], rel=1e-13)


class TestInteriorEquilibrium:
    def test_section4_point(self, eq4):
        assert eq4.x_star == pytest.approx(REF["x_star"], rel=1e-13)
        assert eq4.y_star == pytest.approx(REF["y_star"], rel=1e-13)
        # reported study values
        assert eq4.x_star == pytest.approx(253.9056, rel=1e-3)
        assert eq4.y_star == pytest.approx(97.8867, rel=1e-3)

    def test_theta_equal_hd_is_infeasible(self):
        p = _kw()
        p["theta"] = p["h"] * p["d"]
        with pytest.raises(InfeasibleEquilibriumError):
            interior_equilibrium(ModelParams(**p))

    def test_refuge_bound(self, params4):
        bound = feasibility_m_bound(params4)
        assert bound == pytest.approx(REF["m_bound"], rel=1e-13)
        assert 0.9 >= bound  # hence m = 0.9 infeasible
        with pytest.raises(InfeasibleEquilibriumError):
            interior_equilibrium(replace(params4, m=0.9))
        with pytest.raises(InfeasibleEquilibriumError):
            interior_equilibrium(replace(params4, m=bound))  # equality rejected

    def test_residual_over_1000_feasible_draws(self):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            p = draw_feasible(rng)
            eq = interior_equilibrium(p)
            assert eq.x_star > 0 and eq.y_star > 0
            dx, dy = rhs(p, State(eq.x_star, eq.y_star), eq.x_star, eq.x_star)
            assert math.hypot(dx, dy) <= 1e-9 * math.hypot(eq.x_star, eq.y_star)

    def test_delay_independence(self, params4, eq4):
        shifted = interior_equilibrium(params4.with_delays(0.7, 1.3))
        assert (shifted.x_star, shifted.y_star) == (eq4.x_star, eq4.y_star)


class TestBoundaryEquilibria:
    def test_section4(self, params4):
        pts = boundary_equilibria(params4)
        assert [(b.x_star, b.y_star) for b in pts] == [(0.0, 0.0), (898.0, 0.0)]

    def test_unit_capacity(self):
        pts = boundary_equilibria(ModelParams(**{**_kw(), "k": 1.0}))
        assert [(b.x_star, b.y_star) for b in pts] == [(0.0, 0.0), (1.0, 0.0)]

    def test_logistic_zero_at_capacity(self, params4):
        dx, _ = rhs(params4, State(params4.k, 0.0), params4.k, params4.k)
        assert dx == 0.0


class TestPersistence:
    def test_section4_holds(self, params4):
        rep = persistence_conditions(params4)
        assert rep.holds and rep.feasible_m_bound and rep.theta_bound
        assert "beta1/beta2" in rep.free_constant_condition

    def test_theta_boundary_is_strict(self, params4):
        p = replace(params4, theta=feasibility_theta_bound(params4))
        assert not persistence_conditions(p).holds

    def test_near_total_refuge_fails(self, params4):
        assert not persistence_conditions(replace(params4, m=0.999)).holds


class TestNondelayStability:
    def test_section4_stable(self, params4):
        rep = nondelay_stability_conditions(params4)
        assert rep.stable and rep.alpha_cond and rep.theta_cond and rep.m_window
        assert rep.m_window_lo == pytest.approx(REF["m_window_lo"], rel=1e-12)
        assert rep.m_window_hi == pytest.approx(REF["m_bound"], rel=1e-12)

    def test_alpha_boundary_is_strict(self, params4):
        p = replace(params4, alpha=1.0 / (params4.k * params4.h))
        assert not nondelay_stability_conditions(p).stable

    def test_m_below_window_destabilizes(self, params4):
        # oracle: A+B sign flips at the closed-form window edge
        m_low = REF["m_window_lo"] - 1e-4
        p = replace(params4, m=m_low)
        assert not nondelay_stability_conditions(p).stable
        co = char_coefficients(p, interior_equilibrium(p))
        assert co.A + co.B < 0
        p = replace(params4, m=REF["m_window_lo"] + 1e-4)
        assert nondelay_stability_conditions(p).stable
        co = char_coefficients(p, interior_equilibrium(p))
        assert co.A + co.B > 0

    def test_consistency_with_characteristic_sign(self):
        """Given feasibility: m_window <=> A+B > 0; on the textbook conditions'
        domain (alpha_cond and theta_cond) the full `stable` flag matches too."""
        rng = np.random.default_rng(4321)
        checked_window = checked_domain = 0
        for _ in range(400):
            p = draw_feasible(rng)
            eq = interior_equilibrium(p)
            co = char_coefficients(p, eq)
            if abs(co.A + co.B) < 1e-10 * co.B:
                continue  # too close to the boundary for float sign agreement
            rep = nondelay_stability_conditions(p)
            assert rep.m_window == (co.A + co.B > 0)
            checked_window += 1
            if rep.stable:
                assert co.A + co.B > 0  # sufficiency holds unconditionally
            if rep.alpha_cond and rep.theta_cond:
                assert rep.stable == (co.A + co.B > 0)
                checked_domain += 1
        assert checked_window >= 300 and checked_domain >= 50
