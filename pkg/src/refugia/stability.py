"""Delay-dependent linear stability of the coexistence equilibrium.

Everything here lives on the characteristic quasi-polynomial of the
linearization at E*:

    Delta(lambda) = lambda^2 + A lambda + B lambda e^(-lambda tau1) + C e^(-lambda tau2)

with A < 0, B > 0, C > 0 at any feasible interior equilibrium. The five
classical delay cases are:

    I    tau1 = tau2 = 0           quadratic, stable iff A+B > 0 (C > 0 automatic)
    II   tau1 = 0,  tau2 free      unique crossing frequency
    III  tau2 fixed, tau1 free     transcendental frequency equation
    IV   tau2 = 0,  tau1 free      biquadratic, up to two crossing frequencies
    V    tau1 fixed, tau2 free     transcendental frequency equation

Cases III and V report ALL positive frequency roots on a bracket, and every
delay angle is quadrant-corrected by solving (cos, sin) jointly: the
principal-branch arccos alone picks the wrong branch whenever the matching
sine is negative (which happens for the smaller Case IV root and for the
smallest Case III root at the reference parameters).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .model import Equilibrium, EquilibriumKind, ModelParams

TWO_PI = 2.0 * math.pi

#: Default number of delay branches reported per frequency root.
DEFAULT_N_MAX = 3

#: Scan resolution for bracketing roots of the transcendental frequency equations.
SCAN_POINTS = 4096

#: |F| at a scan minimum below this, without a sign change, flags a tangency.
DEGENERACY_TOL = 1e-9


class NoHopfError(ValueError):
    """No positive frequency root exists: no delay-induced crossing in this case."""


class NewtonDivergenceError(RuntimeError):
    """Newton correction of a characteristic root failed to converge."""


@dataclass(frozen=True)
class CharCoefficients:
    """Coefficients (A, B, C) of the characteristic quasi-polynomial."""

    A: float
    B: float
    C: float


def char_coefficients(params: ModelParams, eq: Equilibrium) -> CharCoefficients:
    """Closed forms at the interior equilibrium.

        A = -a^2 h x* y* / G^2,  B = r x* / k,  C = theta a^2 x* y* / G^3,

    with a = alpha(1-m) and G = 1 + a h x*. Note the exact identity
    C = -theta A / (h G).
    """
    if eq.kind is not EquilibriumKind.INTERIOR:
        raise ValueError("characteristic coefficients are defined at the interior equilibrium only")
    a = params.a
    xs, ys = eq.x_star, eq.y_star
    G = 1.0 + a * params.h * xs
    A = -(a * a) * params.h * xs * ys / (G * G)
    B = params.r * xs / params.k
    C = params.theta * a * a * xs * ys / (G * G * G)
    return CharCoefficients(A, B, C)


def char_eval(coeffs: CharCoefficients, tau1: float, tau2: float, lam: complex) -> complex:
    """Evaluate Delta(lambda) for given delays."""
    return (lam * lam + coeffs.A * lam
            + coeffs.B * lam * cmath.exp(-lam * tau1)
            + coeffs.C * cmath.exp(-lam * tau2))


def char_eval_dlambda(coeffs: CharCoefficients, tau1: float, tau2: float, lam: complex) -> complex:
    """d Delta / d lambda (used by Newton correction and the implicit delay derivatives)."""
    e1 = cmath.exp(-lam * tau1)
    e2 = cmath.exp(-lam * tau2)
    return 2.0 * lam + coeffs.A + coeffs.B * e1 * (1.0 - lam * tau1) - coeffs.C * tau2 * e2


def lambda_prime_tau1(coeffs: CharCoefficients, tau1: float, tau2: float, lam: complex) -> complex:
    """d lambda / d tau1 along a root branch, by implicit differentiation of Delta = 0."""
    num = coeffs.B * lam * lam * cmath.exp(-lam * tau1)
    return num / char_eval_dlambda(coeffs, tau1, tau2, lam)


def lambda_prime_tau2(coeffs: CharCoefficients, tau1: float, tau2: float, lam: complex) -> complex:
    """d lambda / d tau2 along a root branch."""
    num = coeffs.C * lam * cmath.exp(-lam * tau2)
    return num / char_eval_dlambda(coeffs, tau1, tau2, lam)


@dataclass(frozen=True)
class CriticalRoot:
    """One (frequency, delay) crossing candidate.

    transversality_sign: +1 / -1 for the sign of d(Re lambda)/d(delay) at the
    crossing, 0 when numerically undetermined. degenerate marks tangency
    roots found as near-zero scan minima without a sign change.
    """

    omega: float
    tau_critical: float
    branch_index: int
    transversality_sign: int
    degenerate: bool = False


@dataclass(frozen=True)
class CriticalDelayResult:
    case_id: str
    fixed_delay: tuple[str, float] | None
    roots: list[CriticalRoot]
    tau_star: float | None
    details: str = ""


def _transversality_sign(value: complex) -> int:
    re = value.real
    tol = 1e-12 * max(1.0, abs(value))
    if re > tol:
        return 1
    if re < -tol:
        return -1
    return 0


def _quadrant_angle(cos_v: float, sin_v: float) -> float:
    """Angle in [0, 2 pi) with the given cosine/sine signs (quadrant corrected)."""
    ang = math.atan2(sin_v, cos_v)
    return ang + TWO_PI if ang < 0.0 else ang


def _branches(omega: float, angle: float, n_max: int,
              sign_fn, degenerate: bool = False) -> list[CriticalRoot]:
    out = []
    for n in range(n_max + 1):
        tau = (angle + TWO_PI * n) / omega
        out.append(CriticalRoot(omega, tau, n, sign_fn(tau), degenerate))
    return out


def _tau_star(roots: list[CriticalRoot]) -> float | None:
    zero = [rt.tau_critical for rt in roots if rt.branch_index == 0 and not rt.degenerate]
    return min(zero) if zero else None


def case2_critical(coeffs: CharCoefficients, n_max: int = DEFAULT_N_MAX) -> CriticalDelayResult:
    """tau1 = 0, tau2 the bifurcation parameter.

    Crossing frequency is the unique positive root of
    w^4 + (A+B)^2 w^2 - C^2 = 0; delays come from cos(w tau2) = w^2/C,
    sin(w tau2) = (A+B) w / C. Transversality is the closed form
    (2 w^2 + (A+B)^2)/C^2 > 0, so the sign is always +1.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    if C == 0.0:
        raise NoHopfError("C = 0: no crossing frequency in case II")
    s = A + B
    w2 = (-s * s + math.hypot(s * s, 2.0 * C)) / 2.0
    w = math.sqrt(w2)
    angle = _quadrant_angle(w2 / C, s * w / C)
    roots = _branches(w, angle, n_max, lambda tau: 1)
    return CriticalDelayResult("II", None, roots, _tau_star(roots))


def freq_case3(coeffs: CharCoefficients, tau2: float, omega: float) -> float:
    """Case III frequency function F(w); crossings are its positive zeros.

    F(w) = w^4 + (A^2 - B^2) w^2 + C^2 - 2 C w^2 cos(w tau2) - 2 A C w sin(w tau2),
    obtained by eliminating tau1 from Re Delta = Im Delta = 0. F(0) = C^2 > 0.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    return (omega**4 + (A * A - B * B) * omega**2 + C * C
            - 2.0 * C * omega**2 * math.cos(omega * tau2)
            - 2.0 * A * C * omega * math.sin(omega * tau2))


def freq_case5(coeffs: CharCoefficients, tau1: float, omega: float) -> float:
    """Case V frequency function; crossings are its positive zeros.

    Phi(w) = w^4 + (A^2 + B^2) w^2 - C^2 - 2 B w^3 sin(w tau1) + 2 A B w^2 cos(w tau1).
    Phi(0) = -C^2 < 0, so at least one positive root always exists.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    return (omega**4 + (A * A + B * B) * omega**2 - C * C
            - 2.0 * B * omega**3 * math.sin(omega * tau1)
            + 2.0 * A * B * omega**2 * math.cos(omega * tau1))


def default_omega_max(coeffs: CharCoefficients) -> float:
    """Generous scan bracket: all crossing frequencies satisfy w^4 <= O(C^2 + ...)."""
    return 10.0 * max(1.0, math.sqrt(abs(coeffs.C)))


def _bisect(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def scan_roots(f, omega_max: float, n_points: int = SCAN_POINTS) -> tuple[list[float], list[float]]:
    """Bracket sign changes of f on (0, omega_max] and bisect each to 1e-12.

    Returns (roots, degenerate) where degenerate holds local scan minima with
    |f| < DEGENERACY_TOL but no sign change (tangency candidates).
    """
    step = omega_max / n_points
    grid = [step * i for i in range(1, n_points + 1)]
    vals = [f(w) for w in grid]
    roots: list[float] = []
    degenerate: list[float] = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(_bisect(f, grid[i], grid[i + 1]))
    if vals and vals[-1] == 0.0:
        roots.append(grid[-1])
    for i in range(1, len(grid) - 1):
        if (abs(vals[i]) < DEGENERACY_TOL and vals[i - 1] * vals[i] > 0.0
                and vals[i] * vals[i + 1] > 0.0
                and abs(vals[i]) <= abs(vals[i - 1]) and abs(vals[i]) <= abs(vals[i + 1])):
            degenerate.append(grid[i])
    return roots, degenerate


def case3_critical(coeffs: CharCoefficients, tau2_fixed: float,
                   n_max: int = DEFAULT_N_MAX,
                   omega_max: float | None = None) -> CriticalDelayResult:
    """tau2 fixed in its stable range, tau1 the bifurcation parameter.

    All positive roots of freq_case3 on (0, omega_max] are found; for each the
    delay angle solves cos(w tau1) = (C sin(w tau2) - A w)/(B w) and
    sin(w tau1) = (w^2 - C cos(w tau2))/(B w) jointly. Transversality from the
    implicit derivative d lambda/d tau1 at each candidate.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    if omega_max is None:
        omega_max = default_omega_max(coeffs)
    ws, degs = scan_roots(lambda w: freq_case3(coeffs, tau2_fixed, w), omega_max)
    if not ws and not degs:
        raise NoHopfError(f"no positive frequency root in (0, {omega_max}] for tau2 = {tau2_fixed}")
    roots: list[CriticalRoot] = []
    for w, is_deg in [(w, False) for w in ws] + [(w, True) for w in degs]:
        cos_v = (C * math.sin(w * tau2_fixed) - A * w) / (B * w)
        sin_v = (w * w - C * math.cos(w * tau2_fixed)) / (B * w)
        angle = _quadrant_angle(cos_v, sin_v)
        sign_fn = lambda tau, w=w: _transversality_sign(
            lambda_prime_tau1(coeffs, tau, tau2_fixed, 1j * w))
        roots.extend(_branches(w, angle, n_max, sign_fn, is_deg))
    return CriticalDelayResult("III", ("tau2", tau2_fixed), roots, _tau_star(roots),
                               details=f"{len(ws)} frequency roots, {len(degs)} degenerate")


def case4_critical(coeffs: CharCoefficients, n_max: int = DEFAULT_N_MAX) -> CriticalDelayResult:
    """tau2 = 0, tau1 the bifurcation parameter.

    Frequencies are positive roots of the biquadratic
    w^4 + (A^2 - B^2 - 2C) w^2 + C^2 = 0 (0, 1 or 2 of them); the delay angle
    solves cos(w tau1) = -A/B, sin(w tau1) = (w^2 - C)/(B w) jointly.
    tau_star takes the minimum over the roots' quadrant-corrected branch-0
    delays, which need not come from the larger frequency.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    if B == 0.0:
        raise NoHopfError("B = 0: tau1 does not enter the characteristic equation")
    M = A * A - B * B - 2.0 * C
    disc = M * M - 4.0 * C * C
    if disc < 0.0:
        raise NoHopfError(f"complex biquadratic roots (M = {M}, M^2 - 4C^2 = {disc})")
    sq = math.sqrt(disc)
    w2s = [z for z in ((-M + sq) / 2.0, (-M - sq) / 2.0) if z > 0.0]
    if not w2s:
        raise NoHopfError(f"no positive biquadratic root (M = {M})")
    roots: list[CriticalRoot] = []
    for z in w2s:
        w = math.sqrt(z)
        angle = _quadrant_angle(-A / B, (z - C) / (B * w))
        sign_fn = lambda tau, w=w: _transversality_sign(
            lambda_prime_tau1(coeffs, tau, 0.0, 1j * w))
        roots.extend(_branches(w, angle, n_max, sign_fn))
    return CriticalDelayResult("IV", None, roots, _tau_star(roots),
                               details=f"M = {M}")


def case5_critical(coeffs: CharCoefficients, tau1_fixed: float,
                   n_max: int = DEFAULT_N_MAX,
                   omega_max: float | None = None) -> CriticalDelayResult:
    """tau1 fixed in its stable range, tau2 the bifurcation parameter.

    All positive roots of freq_case5 on (0, omega_max]; the delay angle solves
    cos(w tau2) = (w^2 - B w sin(w tau1))/C and
    sin(w tau2) = (A w + B w cos(w tau1))/C jointly. At tau1 = 0 this reduces
    exactly to case II.
    """
    A, B, C = coeffs.A, coeffs.B, coeffs.C
    if omega_max is None:
        omega_max = default_omega_max(coeffs)
    ws, degs = scan_roots(lambda w: freq_case5(coeffs, tau1_fixed, w), omega_max)
    if not ws and not degs:
        raise NoHopfError(f"no positive frequency root in (0, {omega_max}] for tau1 = {tau1_fixed}")
    roots: list[CriticalRoot] = []
    for w, is_deg in [(w, False) for w in ws] + [(w, True) for w in degs]:
        cos_v = (w * w - B * w * math.sin(w * tau1_fixed)) / C
        sin_v = (A * w + B * w * math.cos(w * tau1_fixed)) / C
        angle = _quadrant_angle(cos_v, sin_v)
        sign_fn = lambda tau, w=w: _transversality_sign(
            lambda_prime_tau2(coeffs, tau1_fixed, tau, 1j * w))
        roots.extend(_branches(w, angle, n_max, sign_fn, is_deg))
    return CriticalDelayResult("V", ("tau1", tau1_fixed), roots, _tau_star(roots),
                               details=f"{len(ws)} frequency roots, {len(degs)} degenerate")


@dataclass(frozen=True)
class ComplexRoot:
    """A numerically tracked root of the characteristic equation."""

    lam: complex
    tau1: float
    tau2: float
    residual: float = field(default=0.0, compare=False)


def newton_root(coeffs: CharCoefficients, tau1: float, tau2: float, seed: complex,
                max_iter: int = 60, tol: float = 1e-13) -> complex:
    """Newton-correct a characteristic root from a seed."""
    lam = seed
    for _ in range(max_iter):
        f = char_eval(coeffs, tau1, tau2, lam)
        if abs(f) <= tol * max(1.0, abs(lam) ** 2):
            return lam
        df = char_eval_dlambda(coeffs, tau1, tau2, lam)
        if df == 0:
            break
        step = f / df
        lam = lam - step
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            break
    f = char_eval(coeffs, tau1, tau2, lam)
    if abs(f) <= 1e-10 * max(1.0, abs(lam) ** 2):
        return lam
    raise NewtonDivergenceError(
        f"Newton failed from seed {seed} at (tau1, tau2) = ({tau1}, {tau2}); |Delta| = {abs(f)}")


def root_track(coeffs: CharCoefficients, tau1_path, tau2_path,
               lambda_seed: complex) -> list[ComplexRoot]:
    """Continue a characteristic root along a delay path.

    tau1_path/tau2_path are equal-length sequences (scalars are broadcast);
    the root at each node seeds Newton at the next. Raises
    NewtonDivergenceError if correction fails anywhere on the path.
    """
    t1s = list(tau1_path) if hasattr(tau1_path, "__len__") else None
    t2s = list(tau2_path) if hasattr(tau2_path, "__len__") else None
    if t1s is None and t2s is None:
        t1s, t2s = [float(tau1_path)], [float(tau2_path)]
    elif t1s is None:
        t1s = [float(tau1_path)] * len(t2s)
    elif t2s is None:
        t2s = [float(tau2_path)] * len(t1s)
    if len(t1s) != len(t2s):
        raise ValueError("tau1_path and tau2_path must have equal length")
    out: list[ComplexRoot] = []
    lam = lambda_seed
    for t1, t2 in zip(t1s, t2s):
        lam = newton_root(coeffs, t1, t2, lam)
        out.append(ComplexRoot(lam, t1, t2, abs(char_eval(coeffs, t1, t2, lam))))
    return out


def rightmost_root(coeffs: CharCoefficients, tau1: float, tau2: float,
                   omega_max: float | None = None) -> complex:
    """Best-effort rightmost characteristic root from a grid of Newton seeds.

    Exhaustive for the moderate-frequency roots that decide stability here;
    quasi-polynomials have root chains with Re -> -inf which are irrelevant.
    """
    if omega_max is None:
        omega_max = default_omega_max(coeffs)
    seeds: list[complex] = []
    s, C = coeffs.A + coeffs.B, coeffs.C
    disc = s * s - 4.0 * C
    if disc >= 0:  # tau = 0 quadratic roots as seeds
        seeds += [complex((-s + math.sqrt(disc)) / 2), complex((-s - math.sqrt(disc)) / 2)]
    else:
        seeds += [complex(-s / 2, math.sqrt(-disc) / 2)]
    for sigma in (-1.0, -0.4, -0.1, 0.0, 0.1, 0.4):
        for k in range(1, 13):
            seeds.append(complex(sigma, omega_max * k / 12.0))
    best: complex | None = None
    for seed in seeds:
        try:
            lam = newton_root(coeffs, tau1, tau2, seed)
        except NewtonDivergenceError:
            continue
        if lam.imag < 0:
            lam = lam.conjugate()  # roots come in conjugate pairs
        if best is None or lam.real > best.real + 1e-12:
            best = lam
    if best is None:
        raise NewtonDivergenceError("no characteristic root converged from any seed")
    return best
