"""Domain types and closed-form reference quantities.

All value objects are frozen; array fields are copied and marked read-only
on construction so a single instance can be shared across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the penetration model.

    Parameters
    ----------
    a0 : float
        Kinetic rate constant of the front law.
    alpha : float
        Breaking coefficient. ``alpha = 0`` is allowed and recovers the
        non-breaking regime in which the front grows without bound.
    beta : float
        Surface mass-transfer coefficient of the Robin condition.
    gamma : float
        Henry-type partition coefficient.
    s0 : float
        Initial front position.
    T : float
        Time horizon.
    """

    a0: float
    alpha: float
    beta: float
    gamma: float
    s0: float
    T: float

    def __post_init__(self) -> None:
        checks = (
            ("a0", self.a0 > 0, "a_0>0"),
            ("alpha", self.alpha >= 0, "alpha>=0"),
            ("beta", self.beta > 0, "beta>0"),
            ("gamma", self.gamma > 0, "gamma>0"),
            ("s0", self.s0 > 0, "s_0>0"),
            ("T", self.T > 0, "T>0"),
        )
        for name, ok, constraint in checks:
            value = getattr(self, name)
            if not math.isfinite(value) or not ok:
                raise ParameterError(f"{name} = {value!r} violates {constraint}")

    @property
    def s_min(self) -> float:
        """Front-collapse threshold."""
        return 1e-8 * self.s0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class BoundaryDrive:
    """Piecewise-linear ambient concentration b(t).

    The derivative is the exact piecewise-constant slope between knots, so
    the L1 and L2 norms of b_t are computed without quadrature error.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = _frozen_array(self.times)
        values = _frozen_array(self.values)
        if times.ndim != 1 or times.shape != values.shape or times.size < 1:
            raise ParameterError("drive times and values must be 1-D arrays of equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ParameterError("drive times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ParameterError("drive values must be finite")
        if np.any(values < 0):
            raise ParameterError("drive violates b>=0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in ("times", "values"))

    __hash__ = None

    @classmethod
    def constant(cls, value: float, T: float = 1.0) -> "BoundaryDrive":
        return cls(np.array([0.0, T]), np.array([value, value]))

    @classmethod
    def from_function(cls, func, T: float, n_knots: int = 201) -> "BoundaryDrive":
        t = np.linspace(0.0, T, n_knots)
        return cls(t, np.array([func(ti) for ti in t], dtype=float))

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def slopes(self) -> np.ndarray:
        if self.times.size < 2:
            return np.zeros(0)
        return np.diff(self.values) / np.diff(self.times)

    def derivative(self, t):
        """b_t at ``t``; knots take the slope of the interval to their right."""
        slopes = self.slopes()
        if slopes.size == 0:
            return np.zeros_like(np.asarray(t, dtype=float))
        idx = np.searchsorted(self.times, t, side="right") - 1
        idx = np.clip(idx, 0, slopes.size - 1)
        inside = (np.asarray(t) >= self.times[0]) & (np.asarray(t) < self.times[-1])
        return np.where(inside, slopes[idx], 0.0)

    def _windowed(self, T: float | None):
        if T is None or self.times.size < 2:
            return self.slopes(), np.diff(self.times)
        lo = np.clip(self.times[:-1], None, T)
        hi = np.clip(self.times[1:], None, T)
        return self.slopes(), hi - lo

    def bt_l1(self, T: float | None = None) -> float:
        """|b_t|_{L1(0,T)}; the whole knot range when ``T`` is None."""
        slopes, widths = self._windowed(T)
        return float(np.sum(np.abs(slopes) * widths))

    def bt_l2(self, T: float | None = None) -> float:
        """|b_t|_{L2(0,T)}."""
        slopes, widths = self._windowed(T)
        return float(np.sqrt(np.sum(slopes**2 * widths)))

    def max_value(self, T: float | None = None) -> float:
        if T is None:
            return float(np.max(self.values))
        inside = self.values[self.times <= T]
        end = float(self(T))
        return float(max(np.max(inside), end)) if inside.size else end


@dataclass(frozen=True, eq=False)
class InitialProfile:
    """Samples of u0 at physical coordinates in [0, s0]."""

    z: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        z = _frozen_array(self.z)
        values = _frozen_array(self.values)
        if z.ndim != 1 or z.shape != values.shape or z.size < 1:
            raise ParameterError("initial profile needs matching 1-D z and u arrays")
        if z.size > 1 and np.any(np.diff(z) <= 0):
            raise ParameterError("initial profile z must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ParameterError("initial profile must be bounded")
        if np.any(values < 0):
            raise ParameterError("initial profile violates u_0>=0")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in ("z", "values"))

    __hash__ = None

    @classmethod
    def constant(cls, value: float, s0: float) -> "InitialProfile":
        return cls(np.array([0.0, s0]), np.array([value, value]))

    @classmethod
    def from_function(cls, func, s0: float, n: int = 201) -> "InitialProfile":
        z = np.linspace(0.0, s0, n)
        return cls(z, np.array([func(zi) for zi in z], dtype=float))

    def max_value(self) -> float:
        return float(np.max(self.values))

    def on_fixed_grid(self, s0: float, N: int) -> np.ndarray:
        """Resample to y_j = j/N via linear interpolation of u0(y s0)."""
        y = np.linspace(0.0, 1.0, N + 1)
        return np.interp(y * s0, self.z, self.values)


@dataclass(frozen=True)
class SimState:
    """Fixed-domain state: clock, front, front velocity, nodal profile."""

    t: float
    s: float
    s_t: float
    u: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        u = _frozen_array(self.u)
        if u.ndim != 1 or u.size < 3:
            raise ParameterError("state profile must be a 1-D array with at least 3 nodes")
        if not np.all(np.isfinite(u)):
            raise ParameterError("state profile must be finite")
        if not (self.s > 0):
            raise ParameterError(f"state front s = {self.s!r} violates s>0")
        object.__setattr__(self, "u", u)

    @property
    def N(self) -> int:
        return self.u.size - 1


def sigma(r):
    """Positive part: ``r`` where ``r >= 0``, else 0."""
    if np.ndim(r) == 0:
        r = float(r)
        return r if r >= 0.0 else 0.0
    return np.maximum(np.asarray(r, dtype=float), 0.0)


def u_star(alpha: float, l: float, b_star: float, gamma: float) -> float:
    """Sup bound max(alpha*l, b*/gamma) for the concentration."""
    if not l > 0:
        raise ParameterError("u_star needs l > 0")
    if not gamma > 0:
        raise ParameterError("u_star needs gamma > 0")
    return max(alpha * l, b_star / gamma)


def b_star(drive: BoundaryDrive, u0: InitialProfile, gamma: float, T: float | None = None) -> float:
    """max(max_t b, gamma * max u0).

    The factor multiplying |u0|_inf is taken to be gamma, which makes
    u0 <= b*/gamma hold by construction.
    """
    return max(drive.max_value(T), gamma * u0.max_value())


def equilibrium(params: ModelParams, b_const: float) -> tuple[float, float]:
    """Stationary front and concentration (s_inf, u_inf) for constant b."""
    if params.alpha <= 0:
        raise ParameterError("equilibrium needs alpha>0; with alpha=0 the front grows without bound")
    if b_const <= 0:
        raise ParameterError("equilibrium needs b>0; b=0 gives s=0, violating s>0")
    u_inf = b_const / params.gamma
    return u_inf / params.alpha, u_inf


def initial_state(params: ModelParams, u0: InitialProfile, N: int) -> SimState:
    u = u0.on_fixed_grid(params.s0, N)
    s_t = params.a0 * (sigma(u[-1]) - params.alpha * params.s0)
    return SimState(0.0, params.s0, s_t, u)
