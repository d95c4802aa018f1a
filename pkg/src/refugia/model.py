"""Two-delay prey-predator model with prey refuge.

The system is

    dx/dt = r x (1 - x(t-tau1)/k) - a x y / (1 + a h x)
    dy/dt = y [ theta a x(t-tau2) / (1 + a h x(t-tau2)) - d ]

with a = alpha (1 - m): the attack coefficient scaled down by the refuge
fraction m. tau1 lags the logistic density feedback of the prey, tau2 is the
predator gestation lag. Delays never move equilibria, so the coexistence
point and all parameter-region predicates below are delay-free algebra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class InfeasibleEquilibriumError(ValueError):
    """Raised when the coexistence equilibrium does not exist for the given parameters."""


@dataclass(frozen=True)
class ModelParams:
    """The seven ecological constants plus the two delays.

    r: intrinsic prey growth rate, k: carrying capacity, alpha: attack
    coefficient, m: refuge fraction in [0, 1], h: handling time,
    theta: conversion efficiency, d: predator death rate,
    tau1/tau2: feedback and gestation delays.
    """

    r: float
    k: float
    alpha: float
    m: float
    h: float
    theta: float
    d: float
    tau1: float = 0.0
    tau2: float = 0.0

    def __post_init__(self):
        for name in ("r", "k", "alpha", "h", "theta", "d"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be strictly positive, got {v!r}")
        # m = 1 kept as the degenerate total-refuge limit (interaction term vanishes)
        if not (math.isfinite(self.m) and 0.0 <= self.m <= 1.0):
            raise ValueError(f"m must lie in [0, 1], got {self.m!r}")
        for name in ("tau1", "tau2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be nonnegative, got {v!r}")

    @property
    def a(self) -> float:
        """Effective attack coefficient alpha (1 - m)."""
        return self.alpha * (1.0 - self.m)

    def with_delays(self, tau1: float, tau2: float) -> "ModelParams":
        return replace(self, tau1=tau1, tau2=tau2)


#: Parameter set used for every simulation figure in the source study.
SECTION4_PARAMS = ModelParams(r=2.65, k=898.0, alpha=0.045, m=0.45, h=0.0437,
                              theta=0.215, d=1.06)

#: Matching initial point (constant history).
SECTION4_PHI = (30.0, 5.83)


@dataclass(frozen=True)
class State:
    """Prey/predator densities."""

    x: float
    y: float


class EquilibriumKind(Enum):
    ORIGIN = "origin"
    AXIAL_PREY_ONLY = "axial_prey_only"
    INTERIOR = "interior"


@dataclass(frozen=True)
class Equilibrium:
    x_star: float
    y_star: float
    kind: EquilibriumKind


def response(params: ModelParams, x: float) -> float:
    """Per-predator consumption rate a x / (1 + a h x).

    Monotone nondecreasing in x, bounded above by 1/h, strictly decreasing
    in the refuge fraction m for fixed x > 0.
    """
    a = params.a
    return a * x / (1.0 + a * params.h * x)


def rhs(params: ModelParams, current: State, x_lag1: float, x_lag2: float) -> tuple[float, float]:
    """Right-hand side of the delayed system at one instant.

    x_lag1 is the prey density tau1 ago (logistic feedback), x_lag2 the prey
    density tau2 ago (gestation).
    """
    x, y = current.x, current.y
    dx = params.r * x * (1.0 - x_lag1 / params.k) - response(params, x) * y
    dy = y * (params.theta * response(params, x_lag2) - params.d)
    return dx, dy


def feasibility_m_bound(params: ModelParams) -> float:
    """Upper refuge bound 1 - d/(alpha k (theta - h d)); E* exists for m strictly below it.

    Only meaningful when theta > h d (positive denominator).
    """
    return 1.0 - params.d / (params.alpha * params.k * (params.theta - params.h * params.d))


def feasibility_theta_bound(params: ModelParams) -> float:
    """Lower conversion-efficiency bound h d + d/(alpha k)."""
    return params.h * params.d + params.d / (params.alpha * params.k)


def interior_equilibrium(params: ModelParams) -> Equilibrium:
    """The unique coexistence equilibrium.

        x* = d / (a (theta - h d)),
        y* = r (k - x*) (1 + a h x*) / (a k),   a = alpha (1 - m).

    Raises InfeasibleEquilibriumError unless both strict feasibility
    conditions hold: theta > h d + d/(alpha k) and m < 1 - d/(alpha k (theta - h d)).
    Equality sits on the y* = 0 / division-by-zero boundary and is rejected.
    """
    if params.theta <= feasibility_theta_bound(params):
        raise InfeasibleEquilibriumError(
            f"theta = {params.theta} must exceed h*d + d/(alpha*k) = "
            f"{feasibility_theta_bound(params)}")
    if params.m >= feasibility_m_bound(params):
        raise InfeasibleEquilibriumError(
            f"m = {params.m} must be below 1 - d/(alpha*k*(theta - h*d)) = "
            f"{feasibility_m_bound(params)}")
    a = params.a
    x_star = params.d / (a * (params.theta - params.h * params.d))
    y_star = params.r * (params.k - x_star) * (1.0 + a * params.h * x_star) / (a * params.k)
    return Equilibrium(x_star, y_star, EquilibriumKind.INTERIOR)


def boundary_equilibria(params: ModelParams) -> list[Equilibrium]:
    """The two boundary equilibria: extinction (0,0) and prey-only (k,0)."""
    return [
        Equilibrium(0.0, 0.0, EquilibriumKind.ORIGIN),
        Equilibrium(params.k, 0.0, EquilibriumKind.AXIAL_PREY_ONLY),
    ]


@dataclass(frozen=True)
class PersistenceReport:
    """Uniform-persistence parameter conditions.

    The average-Lyapunov-function proof also involves free exponents
    beta1, beta2 with no model meaning; their condition beta1/beta2 > d/r is
    satisfiable for any positive parameters and is reported as text only.
    """

    feasible_m_bound: bool
    theta_bound: bool
    holds: bool
    free_constant_condition: str = (
        "beta1/beta2 > d/r for free Lyapunov exponents beta1, beta2 > 0; "
        "always satisfiable, informational only"
    )


def persistence_conditions(params: ModelParams) -> PersistenceReport:
    """Evaluate the two uniform-persistence parameter inequalities (both strict)."""
    theta_ok = params.theta > feasibility_theta_bound(params)
    m_ok = theta_ok and params.m < feasibility_m_bound(params)
    return PersistenceReport(feasible_m_bound=m_ok, theta_bound=theta_ok,
                             holds=m_ok and theta_ok)


@dataclass(frozen=True)
class NondelayStabilityReport:
    """Local stability of E* for tau1 = tau2 = 0, split into the three textbook conditions.

    alpha_cond: alpha > 1/(k h)
    theta_cond: theta > max[h d (alpha k h + 1)/(alpha k h - 1), h d + d/(alpha k)]
    m_window:   1 - (theta + h d)/(alpha k h (theta - h d)) < m < 1 - d/(alpha k (theta - h d))

    `stable` is the conjunction. Given feasibility, the window condition alone
    is equivalent to A + B > 0 in the characteristic polynomial; the first two
    conditions additionally place the lower window edge inside (0, 1).
    """

    alpha_cond: bool
    theta_cond: bool
    m_window: bool
    m_window_lo: float
    m_window_hi: float
    stable: bool


def nondelay_stability_conditions(params: ModelParams) -> NondelayStabilityReport:
    """Evaluate the three non-delay stability conditions (all strict inequalities)."""
    akh = params.alpha * params.k * params.h
    hd = params.h * params.d
    alpha_ok = params.alpha > 1.0 / (params.k * params.h)
    if akh > 1.0:
        theta_ok = params.theta > max(hd * (akh + 1.0) / (akh - 1.0),
                                      feasibility_theta_bound(params))
    else:
        theta_ok = False  # first bound undefined/unbounded at alpha k h <= 1
    if params.theta > hd:
        lo = 1.0 - (params.theta + hd) / (akh * (params.theta - hd))
        hi = feasibility_m_bound(params)
        window_ok = lo < params.m < hi
    else:
        lo, hi = math.nan, math.nan
        window_ok = False
    return NondelayStabilityReport(
        alpha_cond=alpha_ok, theta_cond=theta_ok, m_window=window_ok,
        m_window_lo=lo, m_window_hi=hi,
        stable=alpha_ok and theta_ok and window_ok)
