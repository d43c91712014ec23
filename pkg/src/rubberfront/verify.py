"""Verification studies: manufactured solutions, mollifier limit, alpha = 0 regression.

Manufactured solutions
----------------------
Each case fixes a closed-form profile u(t, y) and front s(t) and feeds the
scheme the data that makes them exact for the fixed-domain equation

    u_t - u_yy / s^2 - (y s_t / s) u_y = F(t, y).

Left data comes from the Robin condition, b = gamma u(t, 0) - u_y(t, 0)/(beta s).
On the right the front-coupled law imposes G = sigma(u(1)) s_t, while the
exact profile carries the flux g = -u_y(t, 1)/s; the scheme receives
``flux_offset = sigma(u(t, 1)) s_t - g`` so the imposed flux equals g at the
exact solution. All derivatives below were taken by hand.

``static_cosine``: u = exp(-t) cos(pi y), s = 1.
    u_t = -u, u_yy = -pi^2 u, so F = (pi^2 - 1) u. u_y vanishes at both
    ends, hence b = gamma exp(-t) and g = 0; s_t = 0 kills the offset.

``constant_moving``: u = c, s = 1 + t/4.
    Every derivative of u vanishes: F = 0, b = gamma c, g = 0, and the
    offset is c/4. The scheme reproduces constants exactly.

``moving_cosine``: u = 1 + exp(-t) cos(pi y)/2, s = 1 + t/4.
    u_t = -exp(-t) cos/2, u_y = -pi exp(-t) sin(pi y)/2,
    u_yy = -pi^2 exp(-t) cos/2, so
    F = exp(-t) [(pi^2/(2 s^2) - 1/2) cos(pi y) + (pi y s_t/(2 s)) sin(pi y)].
    u_y(0) = u_y(1) = 0 gives b = gamma u(t, 0), g = 0 and offset u(t, 1)/4.
    First-order upwinding of the transport term limits this case to order one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import pde
from .bounds import apriori_front_cap, grad_norm_sq, h_norm_sq
from .coupler import COMPLETED, RunConfig, run_sequential, solve_ap1_window, solve_ap2_eps_window
from .errors import ParameterError
from .freeboundary import FrontTrajectory
from .model import BoundaryDrive, InitialProfile, ModelParams, SimState, sigma
from .pde import RightBoundaryLaw, StepInputs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    params: ModelParams
    u_exact: Callable[[float, np.ndarray], np.ndarray]
    s_exact: Callable[[float], float]
    forcing: Callable[[float, np.ndarray], np.ndarray]
    b_exact: Callable[[float], float]
    right_flux_exact: Callable[[float], float]
    t_final: float = 0.1

    def inputs(self, state: SimState, t_new: float) -> StepInputs:
        """Step data from ``state`` to ``t_new`` along the exact front."""
        N = state.N
        y = np.linspace(0.0, 1.0, N + 1)
        dt = t_new - state.t
        s_new = self.s_exact(t_new)
        s_t = (s_new - self.s_exact(state.t)) / dt
        u1 = float(self.u_exact(t_new, np.array([1.0]))[0])
        offset = sigma(u1) * s_t - self.right_flux_exact(t_new)
        return StepInputs(
            state=state,
            s_new=s_new,
            s_t=s_t,
            dt=dt,
            b_now=self.b_exact(t_new),
            law=RightBoundaryLaw.pc(),
            params=self.params,
            forcing=self.forcing(t_new, y),
            flux_offset=offset,
        )

    def exact_state(self, t: float, N: int) -> SimState:
        y = np.linspace(0.0, 1.0, N + 1)
        return SimState(t, self.s_exact(t), 0.0, self.u_exact(t, y))


_UNIT = ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=1.0)


def static_cosine(params: ModelParams = _UNIT, t_final: float = 0.1) -> ManufacturedCase:
    g = params.gamma
    return ManufacturedCase(
        name="static_cosine",
        params=params.with_(s0=1.0),
        u_exact=lambda t, y: math.exp(-t) * np.cos(np.pi * y),
        s_exact=lambda t: 1.0,
        forcing=lambda t, y: (np.pi**2 - 1.0) * math.exp(-t) * np.cos(np.pi * y),
        b_exact=lambda t: g * math.exp(-t),
        right_flux_exact=lambda t: 0.0,
        t_final=t_final,
    )


def constant_moving(c: float = 0.7, params: ModelParams = _UNIT, t_final: float = 0.1) -> ManufacturedCase:
    g = params.gamma
    return ManufacturedCase(
        name="constant_moving",
        params=params.with_(s0=1.0),
        u_exact=lambda t, y: np.full(np.shape(y), c),
        s_exact=lambda t: 1.0 + 0.25 * t,
        forcing=lambda t, y: np.zeros(np.shape(y)),
        b_exact=lambda t: g * c,
        right_flux_exact=lambda t: 0.0,
        t_final=t_final,
    )


def moving_cosine(params: ModelParams = _UNIT, t_final: float = 0.1) -> ManufacturedCase:
    g = params.gamma
    s_t = 0.25

    def s(t):
        return 1.0 + s_t * t

    def forcing(t, y):
        e, st = math.exp(-t), s(t)
        return e * (
            (np.pi**2 / (2.0 * st**2) - 0.5) * np.cos(np.pi * y)
            + np.pi * y * s_t / (2.0 * st) * np.sin(np.pi * y)
        )

    return ManufacturedCase(
        name="moving_cosine",
        params=params.with_(s0=1.0),
        u_exact=lambda t, y: 1.0 + 0.5 * math.exp(-t) * np.cos(np.pi * y),
        s_exact=s,
        forcing=forcing,
        b_exact=lambda t: g * (1.0 + 0.5 * math.exp(-t)),
        right_flux_exact=lambda t: 0.0,
        t_final=t_final,
    )


CASES = {"static_cosine": static_cosine, "constant_moving": constant_moving, "moving_cosine": moving_cosine}


def solve_case(case: ManufacturedCase, N: int, dt: float, t_final: float | None = None) -> SimState:
    t_final = case.t_final if t_final is None else t_final
    n = int(round(t_final / dt))
    if n < 1 or not math.isclose(n * dt, t_final, rel_tol=1e-9):
        raise ParameterError(f"dt = {dt!r} must divide t_final = {t_final!r}")
    state = case.exact_state(0.0, N)
    for k in range(1, n + 1):
        t_new = t_final * k / n
        inputs = case.inputs(state, t_new)
        state = SimState(t_new, inputs.s_new, inputs.s_t, pde.step(inputs))
    return state


def case_error(case: ManufacturedCase, N: int, dt: float, t_final: float | None = None) -> float:
    state = solve_case(case, N, dt, t_final)
    exact = case.exact_state(state.t, N)
    return float(np.max(np.abs(state.u - exact.u)))


def truncation_residual(case: ManufacturedCase, N: int, dt: float, t: float = 0.0) -> float:
    """Max nodal weak residual of the exact solution over one step, divided by the hat mass."""
    old = case.exact_state(t, N)
    new = case.exact_state(t + dt, N)
    inputs = case.inputs(old, t + dt)
    res = pde.residual_vector(old, new.u, inputs)
    h = 1.0 / N
    mass = np.full(N + 1, h)
    mass[0] = mass[-1] = 0.5 * h
    return float(np.max(np.abs(res / mass)))


@dataclass
class ConvergenceRow:
    N: int
    dt: float
    error: float
    order: float


@dataclass
class ConvergenceTable:
    case: str
    rows: list[ConvergenceRow]
    passed: bool
    message: str = ""

    @property
    def orders(self) -> list[float]:
        return [r.order for r in self.rows[1:]]

    def format(self) -> str:
        lines = [f"case {self.case}", f"{'N':>6} {'dt':>12} {'error':>12} {'order':>7}"]
        for r in self.rows:
            order = "" if math.isnan(r.order) else f"{r.order:7.3f}"
            lines.append(f"{r.N:6d} {r.dt:12.4e} {r.error:12.4e} {order:>7}")
        lines.append("status: " + ("ok" if self.passed else f"FAILED {self.message}"))
        return "\n".join(lines)


def convergence_study(case: ManufacturedCase, grids, t_final: float | None = None) -> ConvergenceTable:
    """Max-norm errors at the final time and observed orders between levels.

    The order between consecutive levels is log(e_coarse/e_fine)/log(r)
    with r the refinement ratio of N, or of 1/dt when N is held fixed.
    A study whose errors do not decrease monotonically is marked failed.
    """
    grids = [(int(N), float(dt)) for N, dt in grids]
    if len(grids) < 3:
        raise ParameterError("convergence_study needs at least 3 grid levels")
    for (N0, dt0), (N1, dt1) in zip(grids, grids[1:]):
        if N1 < N0 or dt1 > dt0 or (N1 == N0 and dt1 == dt0):
            raise ParameterError("grid levels must refine monotonically")
    rows = []
    for k, (N, dt) in enumerate(grids):
        err = case_error(case, N, dt, t_final)
        order = math.nan
        if k:
            Np, dtp = grids[k - 1]
            prev = rows[-1].error
            ratio = N / Np if N != Np else dtp / dt
            if prev > 0 and err > 0:
                order = math.log(prev / err) / math.log(ratio)
        rows.append(ConvergenceRow(N, dt, err, order))
    errors = [r.error for r in rows]
    passed = all(b < a for a, b in zip(errors, errors[1:])) or max(errors) < 1e-13
    return ConvergenceTable(case.name, rows, passed, "" if passed else "errors not monotone")


def v_norm(diffs: list[np.ndarray], times: np.ndarray) -> float:
    """Discrete |z|_{L_inf(H)} + |z_y|_{L2(H)} with trapezoid in time."""
    h_part = max(math.sqrt(h_norm_sq(d)) for d in diffs)
    g = np.array([grad_norm_sq(d) for d in diffs])
    dts = np.diff(times)
    return h_part + math.sqrt(float(np.sum(0.5 * dts * (g[1:] + g[:-1]))))


@dataclass
class EpsilonRow:
    epsilon: float
    deviation: float
    iterations: int
    in_range: bool


@dataclass
class EpsilonTable:
    rows: list[EpsilonRow]
    passed: bool
    message: str = ""

    def format(self) -> str:
        lines = [f"{'epsilon':>10} {'deviation':>14} {'iters':>6} {'checked':>8}"]
        for r in self.rows:
            lines.append(f"{r.epsilon:10.4g} {r.deviation:14.6e} {r.iterations:6d} {str(r.in_range):>8}")
        lines.append("status: " + ("ok" if self.passed else f"FAILED {self.message}"))
        return "\n".join(lines)


def epsilon_study(
    params: ModelParams,
    drive: BoundaryDrive,
    u0: InitialProfile,
    epsilons,
    N: int = 100,
    dt: float = 2e-3,
    slack: float = 0.05,
) -> EpsilonTable:
    """Distance between the mollified-trace fixed point and the direct solve.

    The front is frozen to the sequential solution on [0, T] and shared by
    every epsilon, as is the time grid. Epsilons at or above T are reported
    but excluded from the monotonicity check.
    """
    eps = [float(e) for e in epsilons]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ParameterError("epsilons must be strictly decreasing")
    base = run_sequential(params, drive, u0, RunConfig(N=N, dt=dt))
    times = base.times
    s_traj = FrontTrajectory.from_positions(times, base.s_values)
    start = base.states[0]
    direct, _ = solve_ap1_window(s_traj, params, drive, start)
    rows = []
    for e in eps:
        states, _, _, iters = solve_ap2_eps_window(s_traj, params, drive, start, e)
        dev = v_norm([a.u - b.u for a, b in zip(states, direct)], times)
        rows.append(EpsilonRow(e, dev, iters, e < params.T))
    checked = [r.deviation for r in rows if r.in_range]
    bad = [
        (a, b) for a, b in zip(checked, checked[1:]) if b > a * (1.0 + slack) + 1e-12
    ]
    msg = "" if not bad else f"deviation increased: {bad[0][0]:.4g} -> {bad[0][1]:.4g}"
    return EpsilonTable(rows, not bad, msg)


@dataclass
class AlphaReport:
    min_s_t: float
    s_initial: float
    s_final: float
    increasing_after: float | None
    paired_max_s: float
    paired_M_front: float
    drive_positive: bool
    statuses: tuple[str, str]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def format(self) -> str:
        lines = [
            f"alpha=0 run: min s_t = {self.min_s_t:.6e}, s(0) = {self.s_initial:.6g}, s(T) = {self.s_final:.6g}",
            f"  strictly increasing after t = {self.increasing_after}",
            f"paired alpha=1 run: max s = {self.paired_max_s:.6g} <= M = {self.paired_M_front:.6g}",
        ]
        lines += [f"  {name}: {'ok' if ok else 'FAILED'}" for name, ok in self.checks.items()]
        return "\n".join(lines)


def _increasing_after(times: np.ndarray, s: np.ndarray) -> float | None:
    inc = np.diff(s) > 0
    if not inc.size or not inc[-1]:
        return None
    bad = np.nonzero(~inc)[0]
    return float(times[0] if bad.size == 0 else times[bad[-1] + 1])


def alpha_regression(
    params_with_alpha0: ModelParams,
    drive: BoundaryDrive,
    u0: InitialProfile,
    horizon: float,
    N: int = 100,
    dt: float = 1e-3,
) -> AlphaReport:
    """Monotone front growth without breaking, and the capped paired run with alpha = 1."""
    if params_with_alpha0.alpha != 0:
        raise ParameterError("alpha_regression needs alpha = 0")
    cfg = RunConfig(N=N, dt=dt, stop_time=horizon)
    free = run_sequential(params_with_alpha0.with_(T=horizon), drive, u0, cfg)
    s = free.s_values
    times = free.times
    s_t = np.array([st.s_t for st in free.states[1:]])
    drive_positive = drive.max_value(horizon) > 0

    paired_params = params_with_alpha0.with_(alpha=1.0, T=horizon)
    paired = run_sequential(paired_params, drive, u0, cfg)
    cap = apriori_front_cap(paired_params, drive, u0).M_front
    checks = {
        "s_t >= -1e-12": bool(np.min(s_t) >= -1e-12),
        "s(T) > s0 when b > 0": bool(s[-1] > s[0]) if drive_positive else bool(np.allclose(s, s[0])),
        "paired max s <= M_front": bool(np.max(paired.s_values) <= cap),
        "runs completed": free.status == COMPLETED and paired.status == COMPLETED,
    }
    return AlphaReport(
        min_s_t=float(np.min(s_t)),
        s_initial=float(s[0]),
        s_final=float(s[-1]),
        increasing_after=_increasing_after(times, s),
        paired_max_s=float(np.max(paired.s_values)),
        paired_M_front=cap,
        drive_positive=bool(drive_positive),
        statuses=(free.status, paired.status),
        checks=checks,
    )
