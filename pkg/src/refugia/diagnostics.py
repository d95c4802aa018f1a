"""Attractor classification and Lyapunov spectra for the delay system.

The taxonomy follows the regimes the model exhibits as the delays grow:
fixed point, nT-periodic orbits (period-doubling cascades), chaos. Verdicts
combine three independent measurements:

  * tail amplitude relative to the equilibrium scale (fixed-point test),
  * predator peak heights clustered at a relative tolerance (period count),
  * the largest Lyapunov exponent from tangent-space evolution on the
    discretized history segment (chaos vs. quasi-regularity guard).

The delay system's state is a function segment; its finite-dimensional proxy
here is the solver mesh spanning [t - max(tau1, tau2), t], re-orthonormalized
Gram-Schmidt style at fixed intervals (the standard recipe for delay
equations).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import _kernels
from .model import InfeasibleEquilibriumError, ModelParams, interior_equilibrium
from .solver import (DEFAULT_STEP, NegativeStateError, NonFiniteStateError,
                     Trajectory, _coerce_state, _steps_for, _validate_step, integrate)


#: Minimum post-transient peak count before the peak map is meaningful.
MIN_PEAKS = 8


class TooFewPeaksError(ValueError):
    """Fewer than the minimum number of post-transient peaks: fixed-point candidate."""

    def __init__(self, message: str, peaks: tuple[float, ...]):
        super().__init__(message)
        self.peaks = peaks


class VerdictKind(Enum):
    FIXED_POINT = "FixedPoint"
    PERIODIC = "PeriodicN"
    CHAOTIC = "Chaotic"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class DiagnosticsSettings:
    """Knobs for classification and Lyapunov runs (defaults resolve the nT labels)."""

    transient: float = 500.0
    record: float = 1000.0
    step: float = DEFAULT_STEP
    peak_rel_tol: float = 1e-3      # single-linkage gap for distinct peak heights
    eps_fp: float = 1e-4            # tail amplitude below this (relative) = fixed point
    tail_fraction: float = 0.5      # amplitude measured over this last part of the record
    cluster_cap: int = 16
    lle_threshold: float = 0.005
    lyap_transient: float = 500.0
    lyap_window: float = 2000.0
    ortho_interval: float = 1.0


@dataclass(frozen=True)
class AttractorVerdict:
    kind: VerdictKind
    period_count: int | None
    peak_values: tuple[float, ...]
    peak_clusters: int
    lle: float
    details: str = ""

    @property
    def label(self) -> str:
        if self.kind is VerdictKind.PERIODIC:
            return f"Periodic{self.period_count}"
        return self.kind.value


@dataclass(frozen=True)
class LyapunovSpectrum:
    exponents: tuple[float, ...]
    n_exponents: int
    ortho_interval: float
    state_dim_discretized: int

    @property
    def largest(self) -> float:
        return self.exponents[0]


def peak_analysis(traj: Trajectory, transient: float,
                  rel_tol: float) -> tuple[tuple[float, ...], int]:
    """Predator peak heights after the transient and their cluster count.

    Local maxima come from the 3-point discrete test refined by a quadratic
    fit through the neighbors (suppresses grid aliasing in the heights).
    Clusters merge peaks closer than rel_tol relative to the peak scale.
    Raises TooFewPeaksError below the minimum peak count.
    """
    y = traj.y
    start = int(np.searchsorted(traj.times, transient, side="left"))
    start = max(start, 1)
    inner = y[start:-1] if len(y) - start > 2 else y[0:0]
    if inner.size == 0:
        raise TooFewPeaksError("trajectory too short after transient", ())
    left = y[start - 1:-2]
    right = y[start + 1:]
    mask = (inner > left) & (inner >= right)
    idx = np.nonzero(mask)[0] + start
    peaks = []
    for i in idx:
        ym, y0, yp = y[i - 1], y[i], y[i + 1]
        denom = ym - 2.0 * y0 + yp
        peaks.append(y0 - (yp - ym) ** 2 / (8.0 * denom) if denom < 0 else y0)
    if len(peaks) < MIN_PEAKS:
        raise TooFewPeaksError(f"only {len(peaks)} peaks after transient", tuple(peaks))
    peaks_arr = np.sort(np.asarray(peaks))
    scale = max(abs(peaks_arr[0]), abs(peaks_arr[-1]), 1e-300)
    clusters = 1 + int(np.count_nonzero(np.diff(peaks_arr) > rel_tol * scale))
    return tuple(peaks), clusters


def lyapunov_spectrum(params: ModelParams, phi, n_exp: int,
                      settings: DiagnosticsSettings = DiagnosticsSettings()) -> LyapunovSpectrum:
    """Leading Lyapunov exponents of the attractor reached from phi.

    Evolves n_exp tangent history segments along the base trajectory,
    Gram-Schmidt re-orthonormalizing every ortho_interval; each exponent is
    the mean log gain of its orthogonalized norm over the post-transient
    window. Deterministic: seeds are fixed mesh profiles.
    """
    if n_exp < 1:
        raise ValueError("n_exp must be >= 1")
    phi = _coerce_state(phi)
    _validate_step(params, settings.step)
    step = settings.step
    ortho_every = _steps_for(settings.ortho_interval, step, "ortho_interval")
    transient_steps = math.ceil(_steps_for(settings.lyap_transient, step, "lyap_transient")
                                / ortho_every) * ortho_every
    window_steps = math.ceil(_steps_for(settings.lyap_window, step, "lyap_window")
                             / ortho_every) * ortho_every
    n_steps = transient_steps + window_steps

    tau_max = max(params.tau1, params.tau2)
    n_hist = int(math.ceil(tau_max / step)) if tau_max > 0 else 0
    dim = 2 * (n_hist + 1)
    if n_exp > dim:
        raise ValueError(f"n_exp = {n_exp} exceeds discretized state dimension {dim}")

    status, i_fail, xs, ys, dxs, dys = _kernels.integrate(
        params.r, params.k, params.a, params.h, params.theta, params.d,
        params.tau1, params.tau2, phi.x, phi.y, step, n_steps, 0, False)
    if status == _kernels.NONFINITE:
        raise NonFiniteStateError(f"non-finite base state at t = {i_fail * step}")
    if status == _kernels.NEGATIVE:
        raise NegativeStateError(f"negative base density at t = {i_fail * step}")

    status, i_fail, logs = _kernels.lyapunov(
        params.r, params.k, params.a, params.h, params.theta, params.d,
        params.tau1, params.tau2, xs, ys, dxs, dys, step, n_steps,
        n_exp, transient_steps, ortho_every)
    if status != _kernels.OK:
        raise NonFiniteStateError(f"non-finite tangent state at t = {i_fail * step}")

    window_time = window_steps * step
    exponents = tuple(sorted((logs / window_time).tolist(), reverse=True))
    return LyapunovSpectrum(exponents=exponents, n_exponents=n_exp,
                            ortho_interval=ortho_every * step,
                            state_dim_discretized=dim)


def _equilibrium_scale(params: ModelParams, traj: Trajectory) -> float:
    try:
        eq = interior_equilibrium(params)
        return math.hypot(eq.x_star, eq.y_star)
    except InfeasibleEquilibriumError:
        return float(np.linalg.norm(traj.states, axis=1).mean())


def _tail_amplitude(traj: Trajectory, t_from: float) -> float:
    i0 = int(np.searchsorted(traj.times, t_from, side="left"))
    tail = traj.states[i0:]
    return float((tail.max(axis=0) - tail.min(axis=0)).max())


def classify_attractor(params: ModelParams, phi,
                       settings: DiagnosticsSettings = DiagnosticsSettings()) -> AttractorVerdict:
    """Integrate from phi and classify the attractor reached.

    Order of tests: relative tail amplitude below eps_fp -> FixedPoint;
    else peak clusters n <= cluster_cap with LLE <= threshold -> PeriodicN(n);
    else LLE > threshold -> Chaotic; else Undetermined (e.g. long transients
    or quasiperiodicity: many clusters but no positive exponent).
    """
    phi = _coerce_state(phi)
    s = settings
    horizon = s.transient + s.record
    traj = integrate(params, phi, horizon, s.step, keep_from=s.transient)
    return _classify_trajectory(traj, params, phi, s)


def _classify_trajectory(traj: Trajectory, params: ModelParams, phi,
                         s: DiagnosticsSettings) -> AttractorVerdict:
    horizon = float(traj.times[-1])
    scale = _equilibrium_scale(params, traj)
    amp = _tail_amplitude(traj, horizon - s.tail_fraction * s.record)
    if amp < s.eps_fp * scale:
        return AttractorVerdict(VerdictKind.FIXED_POINT, None, (), 0, math.nan,
                                details=f"tail amplitude {amp:.3g} vs scale {scale:.6g}")
    try:
        peaks, clusters = peak_analysis(traj, s.transient, s.peak_rel_tol)
    except TooFewPeaksError as err:
        return AttractorVerdict(VerdictKind.FIXED_POINT, None, err.peaks, 0, math.nan,
                                details=f"fixed-point candidate: {err}")
    lle = lyapunov_spectrum(params, phi, 1, s).largest
    if clusters <= s.cluster_cap and lle <= s.lle_threshold:
        return AttractorVerdict(VerdictKind.PERIODIC, clusters, peaks, clusters, lle)
    if lle > s.lle_threshold:
        return AttractorVerdict(VerdictKind.CHAOTIC, None, peaks, clusters, lle)
    return AttractorVerdict(VerdictKind.UNDETERMINED, None, peaks, clusters, lle,
                            details="many clusters but no positive exponent")


def settings_with(settings: DiagnosticsSettings, **kwargs) -> DiagnosticsSettings:
    """Convenience: dataclasses.replace with keyword validation."""
    return replace(settings, **kwargs)
