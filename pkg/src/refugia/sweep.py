"""Batch parameter scans: bifurcation diagrams, delay-plane maps, refuge sweeps.

Grid points are independent work items executed on a thread pool (the
integrator kernels release the GIL); results are gathered in deterministic
row-major order whatever the worker count. With continuation enabled a 1-D
scan line is integrated sequentially, warm-starting each point's constant
initial history from the previous point's final state (useful to follow an
attractor branch through a cascade); distinct lines of a 2-D scan still run
in parallel. Per-point failures never abort a scan: they become rows with an
error note.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import (AttractorVerdict, DiagnosticsSettings, VerdictKind,
                          _classify_trajectory)
from .model import InfeasibleEquilibriumError, ModelParams, State, interior_equilibrium
from .solver import integrate
from .stability import NoHopfError, case2_critical, case3_critical, case4_critical, \
    case5_critical, char_coefficients

#: Spec-level default grid sizes.
DEFAULT_SCAN_N = 400
DEFAULT_REGION_N = 100

AXIS_NAMES = ("tau1", "tau2", "m")


def worker_count() -> int:
    """Thread-pool size; the REFUGIA_THREADS environment variable caps it."""
    n = min(8, os.cpu_count() or 1)
    cap = os.environ.get("REFUGIA_THREADS")
    if cap:
        n = max(1, min(n, int(cap)))
    return n


@dataclass(frozen=True)
class ScanAxis:
    name: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if not (self.lo < self.hi):
            raise ValueError(f"axis range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ValueError(f"axis needs n >= 2, got {self.n}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class ScanGrid:
    axis1: ScanAxis
    fixed: ModelParams
    phi: State
    axis2: ScanAxis | None = None
    settings: DiagnosticsSettings = DiagnosticsSettings()
    continuation: bool = False


@dataclass(frozen=True)
class ScanRow:
    axis1_value: float
    axis2_value: float | None
    verdict: str
    period_count: int | None
    clusters: int
    lle: float
    peaks: tuple[float, ...] | None
    error: str | None = None


@dataclass(frozen=True)
class CurvePoint:
    """One point of an analytic critical curve overlaid on the delay plane."""

    case_id: str
    tau1: float
    tau2: float


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    overlay: list[CurvePoint] | None = None


def _with_axis(params: ModelParams, name: str, value: float) -> ModelParams:
    return replace(params, **{name: float(value)})


def _effective_settings(params: ModelParams, settings: DiagnosticsSettings) -> DiagnosticsSettings:
    # halve the step until every nonzero grid delay spans >= 4 steps (halving
    # preserves horizon divisibility); tiny delays below 12 halvings error out
    step = settings.step
    positive = [tau for tau in (params.tau1, params.tau2) if tau > 0.0]
    if positive:
        needed = min(positive) / 4.0
        for _ in range(12):
            if step <= needed + 1e-15:
                break
            step /= 2.0
    if step == settings.step:
        return settings
    return replace(settings, step=step)


def _point(params: ModelParams, phi, settings: DiagnosticsSettings,
           a1: float, a2: float | None, keep_peaks: bool):
    """Classify one grid point; returns (row, final_state_or_None)."""
    try:
        settings = _effective_settings(params, settings)
        horizon = settings.transient + settings.record
        traj = integrate(params, phi, horizon, settings.step, keep_from=settings.transient)
        v = _classify_trajectory(traj, params, phi, settings)
        final = (float(traj.states[-1, 0]), float(traj.states[-1, 1]))
        return ScanRow(a1, a2, v.label, v.period_count, v.peak_clusters, v.lle,
                       v.peak_values if keep_peaks else None), final
    except Exception as err:  # per-point failures become rows
        return ScanRow(a1, a2, "Error", None, 0, math.nan, None,
                       error=f"{type(err).__name__}: {err}"), None


def bifurcation_scan(grid: ScanGrid) -> ScanResult:
    """1-D scan emitting every post-transient predator peak plus the verdict."""
    if grid.axis2 is not None:
        raise ValueError("bifurcation_scan takes a 1-D grid (axis2 must be None)")
    values = grid.axis1.values()
    if grid.continuation:
        rows = []
        phi = grid.phi
        for v in values:
            row, final = _point(_with_axis(grid.fixed, grid.axis1.name, v),
                                phi, grid.settings, float(v), None, True)
            rows.append(row)
            if final is not None and final[0] > 0 and final[1] > 0:
                phi = State(*final)
        return ScanResult(rows)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(
            lambda v: _point(_with_axis(grid.fixed, grid.axis1.name, v),
                             grid.phi, grid.settings, float(v), None, True)[0],
            values))
    return ScanResult(rows)


def critical_curves(params: ModelParams, tau_max: float = 1.0,
                    n_points: int = 25) -> list[CurvePoint]:
    """Analytic Hopf boundary in the (tau1, tau2) plane.

    Case II and IV give the axis intercepts, Cases III and V the curves for
    the other delay held inside its stable interval.
    """
    eq = interior_equilibrium(params)
    coeffs = char_coefficients(params, eq)
    out: list[CurvePoint] = []
    tau20 = case2_critical(coeffs, n_max=0).tau_star
    tau10 = case4_critical(coeffs, n_max=0).tau_star
    if tau20 is not None:
        out.append(CurvePoint("II", 0.0, tau20))
        for t2 in np.linspace(0.0, tau20, n_points + 1)[1:-1]:
            try:
                ts = case3_critical(coeffs, float(t2), n_max=0).tau_star
            except NoHopfError:
                continue
            if ts is not None and ts <= tau_max:
                out.append(CurvePoint("III", ts, float(t2)))
    if tau10 is not None:
        out.append(CurvePoint("IV", tau10, 0.0))
        for t1 in np.linspace(0.0, tau10, n_points + 1)[1:-1]:
            try:
                ts = case5_critical(coeffs, float(t1), n_max=0).tau_star
            except NoHopfError:
                continue
            if ts is not None and ts <= tau_max:
                out.append(CurvePoint("V", float(t1), ts))
    return out


def region_scan(grid: ScanGrid) -> ScanResult:
    """2-D (tau1, tau2) verdict map with the analytic critical curves attached."""
    if grid.axis2 is None:
        raise ValueError("region_scan needs axis2")
    if (grid.axis1.name, grid.axis2.name) != ("tau1", "tau2"):
        raise ValueError("region_scan expects axis1 = tau1, axis2 = tau2")
    v1 = grid.axis1.values()
    v2 = grid.axis2.values()

    def scan_line(a1: float) -> list[ScanRow]:
        rows = []
        phi = grid.phi
        for a2 in v2:
            params = _with_axis(_with_axis(grid.fixed, "tau1", a1), "tau2", float(a2))
            row, final = _point(params, phi, grid.settings, float(a1), float(a2), False)
            rows.append(row)
            if grid.continuation and final is not None and final[0] > 0 and final[1] > 0:
                phi = State(*final)
        return rows

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        lines = list(pool.map(scan_line, [float(a) for a in v1]))
    rows = [row for line in lines for row in line]
    overlay = critical_curves(grid.fixed, tau_max=max(grid.axis1.hi, grid.axis2.hi))
    return ScanResult(rows, overlay)


@dataclass(frozen=True)
class RefugeRow:
    m: float
    feasible: bool
    x_star: float
    y_star: float
    tau2_case2: float
    tau1_case4: float
    error: str | None = None


@dataclass(frozen=True)
class RefugeSweepResult:
    rows: list[RefugeRow]
    tau2_trend: str
    tau1_trend: str


def _trend(values: list[float]) -> str:
    diffs = np.diff(values)
    if len(diffs) == 0:
        return "undetermined"
    if np.all(diffs > 0):
        return "increasing"
    if np.all(diffs < 0):
        return "decreasing"
    return "non-monotonic"


def refuge_sweep(axis: ScanAxis, fixed: ModelParams) -> RefugeSweepResult:
    """Critical delays as functions of the refuge strength m.

    For each m the interior equilibrium and (A, B, C) are recomputed and the
    two single-delay critical values extracted. Infeasible m are flagged, the
    sweep continues. Trends are recorded, not asserted.
    """
    if axis.name != "m":
        raise ValueError("refuge_sweep expects the m axis")
    rows: list[RefugeRow] = []
    for m in axis.values():
        params = replace(fixed, m=float(m))
        try:
            eq = interior_equilibrium(params)
            coeffs = char_coefficients(params, eq)
            t20 = case2_critical(coeffs, n_max=0).tau_star
            t10 = case4_critical(coeffs, n_max=0).tau_star
            rows.append(RefugeRow(float(m), True, eq.x_star, eq.y_star,
                                  t20 if t20 is not None else math.nan,
                                  t10 if t10 is not None else math.nan))
        except (InfeasibleEquilibriumError, NoHopfError) as err:
            rows.append(RefugeRow(float(m), False, math.nan, math.nan, math.nan, math.nan,
                                  error=f"{type(err).__name__}: {err}"))
    good = [r for r in rows if r.feasible and math.isfinite(r.tau2_case2)]
    return RefugeSweepResult(
        rows,
        tau2_trend=_trend([r.tau2_case2 for r in good]),
        tau1_trend=_trend([r.tau1_case4 for r in good if math.isfinite(r.tau1_case4)]))
