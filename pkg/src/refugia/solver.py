"""Fixed-step RK4 integrator for the two-delay system with dense output.

Method of steps: the solver advances on a uniform grid storing value and
derivative samples, and every delayed-prey lookup interpolates that history
with a cubic Hermite (4th-order accurate on smooth stretches). Constant
initial history only. Steps must resolve the delays: each nonzero delay has
to span at least four steps so stage lookups never reach past the computed
front.

Determinism: identical inputs produce bit-identical trajectories (fixed
step, fixed evaluation order, no adaptivity).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ModelParams, State

#: Default integration step (time units).
DEFAULT_STEP = 0.005


class StepTooLargeError(ValueError):
    """The step does not resolve a nonzero delay (needs step <= tau/4)."""


class NonFiniteStateError(ArithmeticError):
    """A state component left the representable range (step too large)."""


class NegativeStateError(ArithmeticError):
    """The scheme produced a negative density (surface it; clamping is opt-in)."""


def _coerce_state(value) -> State:
    if isinstance(value, State):
        return value
    x, y = value
    return State(float(x), float(y))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution with dense-output history.

    times[0] equals t_start (0 unless a keep_from cut was requested); states
    and derivs are (n, 2) arrays aligned with times. `at` interpolates
    piecewise-cubically inside the stored range and returns the constant
    initial history phi for t <= 0.
    """

    params: ModelParams
    phi: State
    step: float
    times: np.ndarray
    states: np.ndarray
    derivs: np.ndarray

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    def at(self, t: float) -> tuple[float, float]:
        if t <= 0.0:
            return self.phi.x, self.phi.y
        if t < self.t_start - 1e-9 or t > self.t_end + 1e-9:
            raise ValueError(f"t = {t} outside stored range [{self.t_start}, {self.t_end}]")
        p = (t - self.t_start) / self.step
        j = min(int(p), len(self.times) - 2)
        th = p - j
        out = []
        for c in (0, 1):
            out.append(_kernels._hermite.py_func(
                self.states[j, c], self.states[j + 1, c],
                self.derivs[j, c], self.derivs[j + 1, c], th, self.step))
        return out[0], out[1]


def _validate_step(params: ModelParams, step: float) -> None:
    if not (step > 0 and math.isfinite(step)):
        raise ValueError(f"step must be positive, got {step}")
    positive = [tau for tau in (params.tau1, params.tau2) if tau > 0]
    if positive and step > min(positive) / 4 + 1e-15:
        raise StepTooLargeError(
            f"step = {step} must be <= min nonzero delay / 4 = {min(positive) / 4}")


def _steps_for(horizon: float, step: float, what: str = "horizon") -> int:
    n = round(horizon / step)
    if n < 1 or abs(n * step - horizon) > 1e-9 * max(1.0, abs(horizon)):
        raise ValueError(f"{what} = {horizon} must be a positive integer multiple of step = {step}")
    return n


def integrate(params: ModelParams, phi, horizon: float, step: float = DEFAULT_STEP,
              *, keep_from: float = 0.0, clamp_negative: bool = False) -> Trajectory:
    """Integrate from the constant history phi over [0, horizon].

    keep_from drops storage of the transient before that time (the integrator
    still runs through it, retaining only the ring needed for lookups).
    clamp_negative=False surfaces any negative density as NegativeStateError;
    True clamps to zero and keeps going (with a warning).
    """
    phi = _coerce_state(phi)
    if not (phi.x > 0 and phi.y > 0):
        raise ValueError(f"initial history must be componentwise positive, got {phi}")
    _validate_step(params, step)
    n_steps = _steps_for(horizon, step)
    if horizon < step:
        raise ValueError("horizon must be at least one step")
    k0 = 0 if keep_from == 0.0 else _steps_for(keep_from, step, "keep_from")
    if k0 > n_steps:
        raise ValueError("keep_from must not exceed horizon")

    status, i_fail, xs, ys, dxs, dys = _kernels.integrate(
        params.r, params.k, params.a, params.h, params.theta, params.d,
        params.tau1, params.tau2, phi.x, phi.y, step, n_steps, k0, clamp_negative)
    if status == _kernels.NONFINITE:
        raise NonFiniteStateError(f"non-finite state at t = {i_fail * step} (step too large?)")
    if status == _kernels.NEGATIVE:
        raise NegativeStateError(f"negative density at t = {i_fail * step}")
    if clamp_negative and (np.any(xs == 0.0) or np.any(ys == 0.0)):
        warnings.warn("negative densities were clamped to zero", RuntimeWarning, stacklevel=2)

    times = (k0 + np.arange(n_steps - k0 + 1)) * step
    return Trajectory(params=params, phi=phi, step=step, times=times,
                      states=np.column_stack((xs, ys)),
                      derivs=np.column_stack((dxs, dys)))


def linearized_integrate(params: ModelParams, base: Trajectory, v_phi) -> Trajectory:
    """Integrate the variational (tangent) equation along a base trajectory.

    Coefficients are the rhs partials with respect to current and delayed
    states evaluated along `base`, which must start at t = 0 and carry the
    same parameters/step. v_phi is the constant perturbation history. The
    returned Trajectory holds perturbation components (sign-indefinite).
    """
    if base.params != params:
        raise ValueError("base trajectory was computed with different parameters")
    if base.t_start != 0.0:
        raise ValueError("base trajectory must cover the run from t = 0 (keep_from = 0)")
    v = _coerce_state(v_phi)
    step = base.step
    n_steps = len(base.times) - 1

    status, i_fail, vx, vy, dvx, dvy = _kernels.linearized(
        params.r, params.k, params.a, params.h, params.theta, params.d,
        params.tau1, params.tau2, base.phi.x,
        np.ascontiguousarray(base.states[:, 0]), np.ascontiguousarray(base.states[:, 1]),
        np.ascontiguousarray(base.derivs[:, 0]), np.ascontiguousarray(base.derivs[:, 1]),
        v.x, v.y, step, n_steps)
    if status == _kernels.NONFINITE:
        raise NonFiniteStateError(f"non-finite perturbation at t = {i_fail * step}")

    return Trajectory(params=params, phi=v, step=step, times=base.times.copy(),
                      states=np.column_stack((vx, vy)),
                      derivs=np.column_stack((dvx, dvy)))
