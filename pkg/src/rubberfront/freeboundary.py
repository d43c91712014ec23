"""Front kinetics, the integral front map, trajectory norms and the mollifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import FrontCollapseError, ParameterError
from .model import ModelParams, sigma

SIMPSON_INTERVALS = 64


def _ro(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FrontTrajectory:
    """Nodal front positions on a uniform window grid.

    ``s_t_values`` holds one velocity per interval (length M for M+1 nodes);
    s is piecewise linear in time and s_t piecewise constant.
    """

    times: np.ndarray
    s_values: np.ndarray
    s_t_values: np.ndarray

    def __post_init__(self) -> None:
        times, s, s_t = _ro(self.times), _ro(self.s_values), _ro(self.s_t_values)
        if times.ndim != 1 or times.size < 2 or s.shape != times.shape:
            raise ParameterError("trajectory needs >= 2 nodes with matching s values")
        if s_t.shape != (times.size - 1,):
            raise ParameterError("trajectory needs one velocity per interval")
        if np.any(np.diff(times) <= 0):
            raise ParameterError("trajectory times must be strictly increasing")
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(s_t)):
            raise ParameterError("trajectory values must be finite")
        if np.any(s <= 0):
            raise FrontCollapseError("trajectory leaves s>0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "s_values", s)
        object.__setattr__(self, "s_t_values", s_t)

    @classmethod
    def from_positions(cls, times, s_values) -> "FrontTrajectory":
        times = np.asarray(times, dtype=float)
        s_values = np.asarray(s_values, dtype=float)
        return cls(times, s_values, np.diff(s_values) / np.diff(times))

    @classmethod
    def constant(cls, s: float, times) -> "FrontTrajectory":
        times = np.asarray(times, dtype=float)
        return cls(times, np.full(times.size, float(s)), np.zeros(times.size - 1))

    @property
    def s0(self) -> float:
        return float(self.s_values[0])

    @property
    def dts(self) -> np.ndarray:
        return np.diff(self.times)

    def w12_norm(self) -> float:
        return _w12(self.s_values, self.s_t_values, self.dts)


@dataclass(frozen=True)
class BoundaryTrace:
    """Time series of the right-boundary value u(t, 1)."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times, values = _ro(self.times), _ro(self.values)
        if times.shape != values.shape or times.ndim != 1:
            raise ParameterError("trace needs matching 1-D times and values")
        if not np.all(np.isfinite(values)):
            raise ParameterError("trace values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)


def ode_step(s: float, u1: float, params: ModelParams, dt: float, implicit: bool = False):
    """One step of s_t = a0 (sigma(u1) - alpha s).

    The explicit variant returns s_t evaluated at ``s``. The implicit
    variant treats the damping term at the new position, so the returned
    velocity a0 (sigma(u1) - alpha s_new) equals (s_new - s)/dt and the
    update cannot overshoot through zero.
    """
    if not s > 0:
        raise FrontCollapseError(f"s = {s!r} violates s>0")
    if not dt > 0:
        raise ParameterError("dt must be positive")
    a0, alpha = params.a0, params.alpha
    if implicit:
        s_new = (s + dt * a0 * sigma(u1)) / (1.0 + dt * a0 * alpha)
        s_t = a0 * (sigma(u1) - alpha * s_new)
    else:
        s_t = a0 * (sigma(u1) - alpha * s)
        s_new = s + dt * s_t
    if s_new <= 0:
        raise FrontCollapseError(f"front collapsed: s_new = {s_new!r}")
    return s_new, s_t


def gamma_map(s_traj: FrontTrajectory, trace: BoundaryTrace, params: ModelParams) -> FrontTrajectory:
    """Integral update s -> s(t_0) + int a0 (sigma(trace) - alpha s) by trapezoid.

    The anchor is the trajectory's first value, i.e. s0 on the first
    window and the committed seam value on later ones.
    """
    if trace.times.shape != s_traj.times.shape or not np.allclose(trace.times, s_traj.times, rtol=0, atol=1e-12):
        raise ParameterError("trajectory and trace must share the time grid")
    integrand = params.a0 * (sigma(trace.values) - params.alpha * s_traj.s_values)
    s_new = s_traj.s0 + cumulative_trapezoid(integrand, s_traj.times, initial=0.0)
    s_new[0] = s_traj.s0
    if np.any(s_new <= 0):
        raise FrontCollapseError("front map left the admissible set s>0")
    s_t = 0.5 * (integrand[1:] + integrand[:-1])
    return FrontTrajectory(s_traj.times, s_new, s_t)


def _w12(ds: np.ndarray, ds_t: np.ndarray, dts: np.ndarray) -> float:
    l2_s = np.sum(0.5 * dts * (ds[1:] ** 2 + ds[:-1] ** 2))
    l2_st = np.sum(dts * ds_t**2)
    return float(np.sqrt(l2_s + l2_st))


def w12_distance(a: FrontTrajectory, b: FrontTrajectory) -> float:
    """Discrete W^{1,2} distance: trapezoid L2 of s plus L2 of the piecewise-constant s_t."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12):
        raise ParameterError("trajectories must share the time grid")
    return _w12(a.s_values - b.s_values, a.s_t_values - b.s_t_values, a.dts)


def _simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * n)


def bump(x):
    """Unnormalized bump exp(-1/(1-x^2)) on (-1, 1), zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def mollify(trace: BoundaryTrace, epsilon: float) -> BoundaryTrace:
    """Convolve the zero-extended trace with a bump of half-width ``epsilon``.

    Composite Simpson on 64 subintervals of [-epsilon, epsilon]; the kernel
    is normalized by the same quadrature so its discrete mass is exactly one.
    """
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    x = np.linspace(-1.0, 1.0, SIMPSON_INTERVALS + 1)
    w = _simpson_weights(SIMPSON_INTERVALS) * bump(x)
    w /= w.sum()
    t = trace.times
    tau = t[:, None] - epsilon * x[None, :]
    inside = (tau >= t[0]) & (tau <= t[-1])
    extended = np.where(inside, np.interp(tau, t, trace.values), 0.0)
    return BoundaryTrace(t, extended @ w)
