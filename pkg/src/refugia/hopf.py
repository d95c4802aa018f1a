"""Hopf bifurcation direction and stability via the center-manifold end formulas.

The bifurcation parameter is tau1 at its Case III critical value tau1~ with
tau2~ fixed inside its stable interval [0, tau20). The pipeline is the
classical Hassard-Kazarinoff-Wan reduction specialized to this two-delay
system; the computable endpoints are

    q1, q1*, Dbar      right/left eigenvector data and normalization
    g20, g11, g02, g21 normal-form coefficients (g21 needs W20/W11)
    E1, E2             constant vectors of the second-order manifold terms
    c1(0)              first Lyapunov coefficient
    mu2, beta2, T2     direction, orbit stability, period trend indices

Several printed formulas in the source derivation carry typos that flip or
distort c1(0); the repairs implemented here (adjoint eigenvector sign, the
delay terms of the bilinear normalization, the Holling-curvature Taylor
coefficients, doubled phases in the E1 system, the omega*tau1 scaling of the
W modes) are each marked with a ledger key (h1)..(h6) at the relevant line
and were validated against direct simulation of the bifurcating cycle.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Equilibrium, ModelParams, interior_equilibrium
from .stability import (CharCoefficients, case3_critical, char_coefficients,
                        char_eval, lambda_prime_tau1, newton_root)


class DegenerateNormalizationError(ArithmeticError):
    """The eigenvector normalization denominator is numerically zero."""


class SingularSystemError(ArithmeticError):
    """A 2x2 system for a center-manifold constant vector is numerically singular."""


class Direction(Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"


class OrbitStability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class PeriodTrend(Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class HopfContext:
    """Everything the normal form needs about one critical point."""

    params: ModelParams
    eq: Equilibrium
    coeffs: CharCoefficients
    tau1_crit: float
    tau2_fixed: float
    omega: float
    lambda_prime: complex


@dataclass(frozen=True)
class Eigenvectors:
    q1: complex
    q1_star: complex
    d_bar: complex


@dataclass(frozen=True)
class WTerms:
    """Second-order center-manifold data: constant vectors and the W evaluations g21 needs."""

    E1: tuple[complex, complex]
    E2: tuple[complex, complex]
    W20_0: tuple[complex, complex]
    W20_tau1: tuple[complex, complex]
    W20_tau2: tuple[complex, complex]
    W11_0: tuple[complex, complex]
    W11_tau1: tuple[complex, complex]
    W11_tau2: tuple[complex, complex]


@dataclass(frozen=True)
class HopfReport:
    q1: complex
    q1_star: complex
    D_bar: complex
    g20: complex
    g11: complex
    g02: complex
    g21: complex
    E1: tuple[complex, complex]
    E2: tuple[complex, complex]
    W20_0: tuple[complex, complex]
    W20_tau1: tuple[complex, complex]
    W20_tau2: tuple[complex, complex]
    W11_0: tuple[complex, complex]
    W11_tau1: tuple[complex, complex]
    W11_tau2: tuple[complex, complex]
    c1_0: complex
    lambda_prime: complex
    mu2: float
    beta2: float
    T2: float
    direction: Direction
    orbit_stability: OrbitStability
    period_trend: PeriodTrend


def _linear_pieces(params: ModelParams, eq: Equilibrium) -> tuple[float, float, float, float]:
    """(P, Q, S, G): linearization blocks and the Holling denominator at E*."""
    a = params.a
    G = 1.0 + a * params.h * eq.x_star
    P = a * a * params.h * eq.x_star * eq.y_star / (G * G)
    Q = a * eq.x_star / G
    S = params.theta * a * eq.y_star / (G * G)
    return P, Q, S, G


def critical_context(params: ModelParams, tau2_fixed: float,
                     omega_max: float | None = None) -> HopfContext:
    """Build the context at the Case III critical pair that realizes tau_star."""
    eq = interior_equilibrium(params)
    coeffs = char_coefficients(params, eq)
    res = case3_critical(coeffs, tau2_fixed, n_max=0, omega_max=omega_max)
    best = min((rt for rt in res.roots if rt.branch_index == 0 and not rt.degenerate),
               key=lambda rt: rt.tau_critical)
    omega, tau1 = best.omega, best.tau_critical
    resid = abs(char_eval(coeffs, tau1, tau2_fixed, 1j * omega))
    if resid > 1e-8:
        raise ArithmeticError(f"critical pair residual {resid} exceeds 1e-8")
    lam_p = lambda_prime_tau1(coeffs, tau1, tau2_fixed, 1j * omega)
    if lam_p.real == 0.0:
        raise ArithmeticError("transversality fails: Re(d lambda/d tau1) = 0")
    return HopfContext(params=params, eq=eq, coeffs=coeffs, tau1_crit=tau1,
                       tau2_fixed=tau2_fixed, omega=omega, lambda_prime=lam_p)


def eigenvector_residual(ctx: HopfContext, q1: complex) -> float:
    """|M(i omega) (1, q1)^T| for the delayed 2x2 characteristic matrix."""
    P, Q, S, _ = _linear_pieces(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    row1 = (1j * w - P + ctx.coeffs.B * cmath.exp(-1j * w * t1)) + Q * q1
    row2 = -S * cmath.exp(-1j * w * t2) + 1j * w * q1
    return math.hypot(abs(row1), abs(row2))


def eigenvectors(ctx: HopfContext) -> Eigenvectors:
    """Right/left eigenvector components and the bilinear-form normalization.

    q(theta) = (1, q1)^T e^{i omega theta} with q1 = S e^{-i omega tau2}/(i omega).
    The adjoint row vector is (1, q1*) with q1* = Q/(i omega)  -- ledger (h1):
    this is the left null vector of Delta(-i omega); the source prints the
    opposite sign, which flips Re c1(0).

    Dbar normalizes <q*, q> = 1 under the FDE bilinear form, whose delay
    atoms contribute the tau-weighted terms -- ledger (h2):

        Dbar = 1 / [1 + conj(q1*) q1 - tau1~ B e^{-i omega tau1~}
                      + tau2~ S conj(q1*) e^{-i omega tau2~}].
    """
    if not ctx.omega > 0.0:
        raise ValueError(f"omega must be positive, got {ctx.omega}")
    P, Q, S, _ = _linear_pieces(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    e1m = cmath.exp(-1j * w * t1)
    e2m = cmath.exp(-1j * w * t2)
    q1 = S * e2m / (1j * w)
    q1_star = Q / (1j * w)
    denom = 1.0 + q1_star.conjugate() * q1 - t1 * ctx.coeffs.B * e1m \
        + t2 * S * q1_star.conjugate() * e2m
    if abs(denom) < 1e-12:
        raise DegenerateNormalizationError(f"|normalization denominator| = {abs(denom)}")
    return Eigenvectors(q1=q1, q1_star=q1_star, d_bar=1.0 / denom)


def normalization_denominator(ctx: HopfContext, vecs: Eigenvectors) -> complex:
    """The denominator whose reciprocal is d_bar (so d_bar * this == 1)."""
    _, _, S, _ = _linear_pieces(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    return (1.0 + vecs.q1_star.conjugate() * vecs.q1
            - t1 * ctx.coeffs.B * cmath.exp(-1j * w * t1)
            + t2 * S * vecs.q1_star.conjugate() * cmath.exp(-1j * w * t2))


def _taylor(params: ModelParams, eq: Equilibrium):
    """Quadratic/cubic Taylor coefficients of the rhs at E* in deviation variables.

    With g the response function and gp/gpp/gppp its derivatives at x*
    -- ledger (h3): the source expansion drops the Holling denominator and
    the y*-curvature terms; the true coefficients are used here --

        f1 = K1 u0 u1 + K2 u0 v0 + K3 u0^2 + K4 u0^2 v0 + K5 u0^3 + ...
        f2 = L1 u2 v0 + L2 u2^2 + L3 u2^2 v0 + L4 u2^3 + ...

    u0/v0 current prey/predator deviations, u1 = u(t - tau1), u2 = u(t - tau2).
    """
    a = params.a
    G = 1.0 + a * params.h * eq.x_star
    gp = a / G**2
    gpp = -2.0 * a**2 * params.h / G**3
    gppp = 6.0 * a**3 * params.h**2 / G**4
    ys = eq.y_star
    K = (-params.r / params.k, -gp, -gpp * ys / 2.0, -gpp / 2.0, -gppp * ys / 6.0)
    L = (params.theta * gp, params.theta * gpp * ys / 2.0,
         params.theta * gpp / 2.0, params.theta * gppp * ys / 6.0)
    return K, L


def _f_quadratic_vectors(ctx: HopfContext, q1: complex):
    """z^2 and z zbar coefficient vectors of the nonlinearity (F20, F11)."""
    (K1, K2, K3, _, _), (L1, L2, _, _) = _taylor(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    e1m, e1p = cmath.exp(-1j * w * t1), cmath.exp(1j * w * t1)
    e2m, e2p = cmath.exp(-1j * w * t2), cmath.exp(1j * w * t2)
    q1b = q1.conjugate()
    F20 = (K1 * e1m + K2 * q1 + K3,
           L1 * q1 * e2m + L2 * e2m * e2m)
    F11 = (K1 * (e1p + e1m) + 2.0 * K2 * q1.real + 2.0 * K3,
           L1 * (q1b * e2m + q1 * e2p) + 2.0 * L2)
    return F20, F11


def quadratic_g(ctx: HopfContext, vecs: Eigenvectors) -> tuple[complex, complex, complex]:
    """g20, g11, g02 (independent of the W terms)."""
    t1 = ctx.tau1_crit
    row2 = vecs.q1_star.conjugate()
    F20, F11 = _f_quadratic_vectors(ctx, vecs.q1)
    F02 = (F20[0].conjugate(), F20[1].conjugate())  # f is real: F02 = conj(F20)
    g20 = 2.0 * t1 * vecs.d_bar * (F20[0] + row2 * F20[1])
    g11 = t1 * vecs.d_bar * (F11[0] + row2 * F11[1])
    g02 = 2.0 * t1 * vecs.d_bar * (F02[0] + row2 * F02[1])
    return g20, g11, g02


def center_manifold_terms(ctx: HopfContext, vecs: Eigenvectors,
                          g20: complex, g11: complex) -> WTerms:
    """E1/E2 from their 2x2 systems and the W20/W11 evaluations g21 consumes.

    E1 solves [2 i omega I - B1 - B2 e^{-2 i omega tau1~} - B3 e^{-2 i omega tau2~}] E1 = 2 F20
    -- ledger (h4): the 2 i omega Fourier mode carries doubled delay phases --
    and E2 solves [-B1 - B2 - B3] E2 = 2 F11 (real system, so E2 is real).

    W20(-s) = (i g20/(omega tau1~)) q(0) e^{-i omega s}
              + (i conj(g02)/(3 omega tau1~)) conj(q(0)) e^{i omega s} + E1 e^{-2 i omega s},
    W11(-s) = -(i g11/(omega tau1~)) q(0) e^{-i omega s}
              + (i conj(g11)/(omega tau1~)) conj(q(0)) e^{i omega s} + E2,
    evaluated at s in {0, tau1~, tau2~} -- ledger (h5): the omega tau1~
    denominators (scaled eigenvalue), not bare omega.
    """
    P, Q, S, _ = _linear_pieces(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    B = ctx.coeffs.B
    F20, F11 = _f_quadratic_vectors(ctx, vecs.q1)
    e1m2 = cmath.exp(-2j * w * t1)
    e2m2 = cmath.exp(-2j * w * t2)
    M1 = np.array([[2j * w - P + B * e1m2, Q], [-S * e2m2, 2j * w]], dtype=complex)
    det1 = M1[0, 0] * M1[1, 1] - M1[0, 1] * M1[1, 0]
    if abs(det1) < 1e-12:
        raise SingularSystemError(f"|det| = {abs(det1)} in the E1 system")
    E1 = np.linalg.solve(M1, 2.0 * np.asarray(F20, dtype=complex))

    M2 = np.array([[-P + B, Q], [-S, 0.0]], dtype=complex)
    det2 = M2[0, 0] * M2[1, 1] - M2[0, 1] * M2[1, 0]
    if abs(det2) < 1e-12:
        raise SingularSystemError(f"|det| = {abs(det2)} in the E2 system")
    E2 = np.linalg.solve(M2, 2.0 * np.asarray(F11, dtype=complex))

    q0 = np.array([1.0, vecs.q1], dtype=complex)
    q0b = q0.conjugate()
    wt = w * t1
    g02_conj = quadratic_g(ctx, vecs)[2].conjugate()

    def w20(s: float) -> tuple[complex, complex]:
        ph = cmath.exp(-1j * w * s)
        v = (1j * g20 / wt) * q0 * ph + (1j * g02_conj / (3.0 * wt)) * q0b / ph + E1 * ph * ph
        return complex(v[0]), complex(v[1])

    def w11(s: float) -> tuple[complex, complex]:
        ph = cmath.exp(-1j * w * s)
        v = -(1j * g11 / wt) * q0 * ph + (1j * g11.conjugate() / wt) * q0b / ph + E2
        return complex(v[0]), complex(v[1])

    return WTerms(E1=(complex(E1[0]), complex(E1[1])),
                  E2=(complex(E2[0]), complex(E2[1])),
                  W20_0=w20(0.0), W20_tau1=w20(t1), W20_tau2=w20(t2),
                  W11_0=w11(0.0), W11_tau1=w11(t1), W11_tau2=w11(t2))


def e1_system(ctx: HopfContext, vecs: Eigenvectors):
    """(matrix, rhs) of the E1 linear system, for residual verification."""
    P, Q, S, _ = _linear_pieces(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    F20, _ = _f_quadratic_vectors(ctx, vecs.q1)
    M1 = np.array([[2j * w - P + ctx.coeffs.B * cmath.exp(-2j * w * t1), Q],
                   [-S * cmath.exp(-2j * w * t2), 2j * w]], dtype=complex)
    return M1, 2.0 * np.asarray(F20, dtype=complex)


def e2_system(ctx: HopfContext, vecs: Eigenvectors):
    """(matrix, rhs) of the E2 linear system."""
    P, Q, S, _ = _linear_pieces(ctx.params, ctx.eq)
    _, F11 = _f_quadratic_vectors(ctx, vecs.q1)
    M2 = np.array([[-P + ctx.coeffs.B, Q], [-S, 0.0]], dtype=complex)
    return M2, 2.0 * np.asarray(F11, dtype=complex)


def g_coefficients(ctx: HopfContext, vecs: Eigenvectors,
                   w_terms: WTerms) -> tuple[complex, complex, complex, complex]:
    """All four normal-form coefficients; g21 consumes the W evaluations.

    g21 is assembled from the z^2 zbar coefficient of q*(0) . f(x_t) with the
    true Taylor coefficients -- ledger (h6): resolves the printed index
    irregularities by pairing each W component with its matching delay argument.
    """
    (K1, K2, K3, K4, K5), (L1, L2, L3, L4) = _taylor(ctx.params, ctx.eq)
    w, t1, t2 = ctx.omega, ctx.tau1_crit, ctx.tau2_fixed
    e1m, e1p = cmath.exp(-1j * w * t1), cmath.exp(1j * w * t1)
    e2m, e2p = cmath.exp(-1j * w * t2), cmath.exp(1j * w * t2)
    q1 = vecs.q1
    q1b = q1.conjugate()
    row2 = vecs.q1_star.conjugate()
    g20, g11, g02 = quadratic_g(ctx, vecs)

    W20_0, W20_1, W20_2 = w_terms.W20_0, w_terms.W20_tau1, w_terms.W20_tau2
    W11_0, W11_1, W11_2 = w_terms.W11_0, w_terms.W11_tau1, w_terms.W11_tau2

    f1_cubic = (
        K1 * (W11_1[0] + W11_0[0] * e1m + W20_1[0] / 2.0 + W20_0[0] * e1p / 2.0)
        + K2 * (q1 * W11_0[0] + W11_0[1] + (q1b * W20_0[0] + W20_0[1]) / 2.0)
        + K3 * (W20_0[0] + 2.0 * W11_0[0])
        + K4 * (q1b + 2.0 * q1)
        + 3.0 * K5)
    f2_cubic = (
        L1 * (e2m * W11_0[1] + e2p * W20_0[1] / 2.0 + q1 * W11_2[0] + q1b * W20_2[0] / 2.0)
        + L2 * (e2p * W20_2[0] + 2.0 * e2m * W11_2[0])
        + L3 * (q1b * e2m * e2m + 2.0 * q1)
        + 3.0 * L4 * e2m)
    g21 = 2.0 * t1 * vecs.d_bar * (f1_cubic + row2 * f2_cubic)
    return g20, g11, g02, g21


def first_lyapunov_coefficient(ctx: HopfContext, g20: complex, g11: complex,
                               g02: complex, g21: complex) -> complex:
    """c1(0) = i/(2 omega tau1~) (g20 g11 - 2|g11|^2 - |g02|^2/3) + g21/2."""
    wt = ctx.omega * ctx.tau1_crit
    return (1j / (2.0 * wt)) * (g20 * g11 - 2.0 * abs(g11) ** 2 - abs(g02) ** 2 / 3.0) \
        + g21 / 2.0


def _check_lambda_prime(ctx: HopfContext, rel_tol: float = 1e-4) -> None:
    """Finite-difference cross-check of the implicit transversality derivative."""
    dt = 1e-6
    lam_p = newton_root(ctx.coeffs, ctx.tau1_crit + dt, ctx.tau2_fixed, 1j * ctx.omega)
    lam_m = newton_root(ctx.coeffs, ctx.tau1_crit - dt, ctx.tau2_fixed, 1j * ctx.omega)
    fd = (lam_p - lam_m) / (2.0 * dt)
    if abs(fd - ctx.lambda_prime) > rel_tol * abs(ctx.lambda_prime):
        raise ArithmeticError(
            f"transversality cross-check failed: implicit {ctx.lambda_prime}, "
            f"finite difference {fd}")


def classify(ctx: HopfContext) -> HopfReport:
    """Full normal-form evaluation and Hopf classification at the critical point.

    mu2 > 0 means supercritical (the periodic orbit exists past tau1~);
    beta2 < 0 means the orbit is stable; T2 > 0 means its period grows.
    beta2 = 2 Re c1(0) and mu2 = -Re c1(0)/Re lambda' hold by construction.
    """
    resid = abs(char_eval(ctx.coeffs, ctx.tau1_crit, ctx.tau2_fixed, 1j * ctx.omega))
    if resid > 1e-8:
        raise ArithmeticError(f"context is not a critical point: |Delta(i omega)| = {resid}")
    _check_lambda_prime(ctx)
    vecs = eigenvectors(ctx)
    g20, g11, g02 = quadratic_g(ctx, vecs)
    w_terms = center_manifold_terms(ctx, vecs, g20, g11)
    g20, g11, g02, g21 = g_coefficients(ctx, vecs, w_terms)
    c1 = first_lyapunov_coefficient(ctx, g20, g11, g02, g21)
    lam_p = ctx.lambda_prime
    mu2 = -c1.real / lam_p.real
    beta2 = 2.0 * c1.real
    T2 = -(c1.imag + mu2 * lam_p.imag) / (ctx.omega * ctx.tau1_crit)
    return HopfReport(
        q1=vecs.q1, q1_star=vecs.q1_star, D_bar=vecs.d_bar,
        g20=g20, g11=g11, g02=g02, g21=g21,
        E1=w_terms.E1, E2=w_terms.E2,
        W20_0=w_terms.W20_0, W20_tau1=w_terms.W20_tau1, W20_tau2=w_terms.W20_tau2,
        W11_0=w_terms.W11_0, W11_tau1=w_terms.W11_tau1, W11_tau2=w_terms.W11_tau2,
        c1_0=c1, lambda_prime=lam_p, mu2=mu2, beta2=beta2, T2=T2,
        direction=Direction.SUPERCRITICAL if mu2 > 0 else Direction.SUBCRITICAL,
        orbit_stability=OrbitStability.STABLE if beta2 < 0 else OrbitStability.UNSTABLE,
        period_trend=PeriodTrend.INCREASING if T2 > 0 else PeriodTrend.DECREASING)
