"""Full simulations of the coupled front/concentration system.

Two drivers share one time grid and one invariant monitor:

* ``run_sequential`` marches front and profile together: implicit front
  update from the current boundary value, then a PDE step with the
  front-coupled flux sigma(u) s_t.
* ``run_picard`` reproduces the fixed-point construction: on each window
  the front trajectory is iterated through s -> Gamma(s), where Gamma
  integrates the front law against the boundary trace of the auxiliary
  problem driven by s. Windows that fail to contract are halved down to
  four steps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import pde
from .bounds import AprioriBounds, apriori_front_cap, grad_norm_sq, h_norm_sq
from .errors import FrontCollapseError, NewtonFailure, ParameterError, PicardFailure, SingularSystemError
from .freeboundary import BoundaryTrace, FrontTrajectory, gamma_map, mollify, ode_step, w12_distance
from .model import BoundaryDrive, InitialProfile, ModelParams, SimState, b_star, initial_state
from .pde import RightBoundaryLaw, StepInputs

logger = logging.getLogger(__name__)

SEQUENTIAL = "sequential"
PICARD = "picard"

COMPLETED = "completed"
FRONT_COLLAPSE = "front_collapse"
PICARD_FAILURE = "picard_failure"
INVARIANT_VIOLATION = "invariant_violation"

MIN_WINDOW_STEPS = 4
INVARIANT_RTOL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    mode: str = SEQUENTIAL
    N: int = 200
    dt: float = 1e-3
    stop_time: float | None = None
    window: float | None = None
    picard_tol: float | None = None
    picard_max_iters: int | None = None
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in (SEQUENTIAL, PICARD):
            raise ParameterError(f"mode must be {SEQUENTIAL!r} or {PICARD!r}, got {self.mode!r}")
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError("N must be an integer >= 2")
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if self.stop_time is not None and not self.stop_time > 0:
            raise ParameterError("stop_time must be positive")
        picard_fields = (self.window, self.picard_tol, self.picard_max_iters)
        if self.mode == PICARD:
            if any(v is None for v in picard_fields):
                raise ParameterError("picard mode needs window, picard_tol and picard_max_iters")
            if not (self.window > 0 and self.picard_tol > 0 and self.picard_max_iters >= 1):
                raise ParameterError("picard fields must be positive")
        elif any(v is not None for v in picard_fields) or self.epsilon is not None:
            raise ParameterError("picard fields are only allowed in picard mode")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ParameterError("epsilon must be positive")

    def horizon(self, params: ModelParams) -> float:
        return params.T if self.stop_time is None else self.stop_time


@dataclass(frozen=True)
class InvariantRecord:
    t: float
    s: float
    s_t: float
    u_left: float
    u_right: float
    min_u: float
    max_u: float
    energy: float
    weak_residual_max: float
    u_star_bound: float
    M_front_bound: float
    nonneg_ok: bool = True
    sup_ok: bool = True
    cap_ok: bool = True
    violations: tuple[str, ...] = ()


@dataclass
class WindowLog:
    t_start: float
    t_end: float
    iterations: int
    distances: list[float]
    converged: bool

    @property
    def ratios(self) -> list[float]:
        d = self.distances
        return [d[k + 1] / d[k] for k in range(len(d) - 1) if d[k] > 0]


@dataclass
class RunResult:
    states: list[SimState]
    report: list[InvariantRecord]
    status: str
    message: str = ""
    windows: list[WindowLog] = field(default_factory=list)
    bounds: AprioriBounds | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    @property
    def s_values(self) -> np.ndarray:
        return np.array([st.s for st in self.states])

    @property
    def max_u(self) -> float:
        return float(max(np.max(st.u) for st in self.states))

    @property
    def min_u(self) -> float:
        return float(min(np.min(st.u) for st in self.states))


class InvariantMonitor:
    """Per-step record of the sign, sup and front-cap invariants plus energy."""

    def __init__(self, params: ModelParams, drive: BoundaryDrive, u0: InitialProfile, horizon: float):
        self.params = params
        self.b_over_gamma = b_star(drive, u0, params.gamma, horizon) / params.gamma
        self.bounds = None
        self.M_front = math.inf
        if params.alpha > 0:
            self.bounds = apriori_front_cap(params.with_(T=horizon), drive, u0)
            self.M_front = self.bounds.M_front
        self.max_s = 0.0
        self.dissipation = 0.0
        self._last: tuple[float, float] | None = None

    def record(self, state: SimState, residual_max: float = 0.0) -> InvariantRecord:
        p = self.params
        self.max_s = max(self.max_s, state.s)
        g = grad_norm_sq(state.u)
        if self._last is not None:
            t_prev, g_prev = self._last
            self.dissipation += 0.5 * (state.t - t_prev) * (g + g_prev)
        self._last = (state.t, g)
        energy = h_norm_sq(state.u) + self.dissipation

        bound = max(p.alpha * self.max_s, self.b_over_gamma)
        lo, hi = float(np.min(state.u)), float(np.max(state.u))
        nonneg_ok = lo >= -INVARIANT_RTOL * bound
        sup_ok = hi <= bound * (1.0 + INVARIANT_RTOL)
        cap_ok = state.s <= self.M_front * (1.0 + INVARIANT_RTOL)
        violations = []
        if not nonneg_ok:
            violations.append(f"min u = {lo:.6g} < 0")
        if not sup_ok:
            violations.append(f"max u = {hi:.6g} exceeds u* = {bound:.6g}")
        if not cap_ok:
            violations.append(f"s = {state.s:.6g} exceeds M = {self.M_front:.6g}")
        return InvariantRecord(
            t=state.t,
            s=state.s,
            s_t=state.s_t,
            u_left=float(state.u[0]),
            u_right=float(state.u[-1]),
            min_u=lo,
            max_u=hi,
            energy=energy,
            weak_residual_max=residual_max,
            u_star_bound=bound,
            M_front_bound=self.M_front,
            nonneg_ok=nonneg_ok,
            sup_ok=sup_ok,
            cap_ok=cap_ok,
            violations=tuple(violations),
        )

    def record_step(self, old: SimState, new: SimState, inputs: StepInputs) -> InvariantRecord:
        res = pde.residual_vector(old, new.u, inputs)
        return self.record(new, float(np.max(np.abs(res))))


def time_grid(stop_time: float, dt: float) -> np.ndarray:
    n = max(1, int(math.ceil(stop_time / dt - 1e-9)))
    times = np.arange(n + 1) * dt
    times[-1] = stop_time
    return np.minimum(times, stop_time)


def _as_state(u_init, params: ModelParams, N: int | None) -> SimState:
    if isinstance(u_init, SimState):
        return u_init
    if isinstance(u_init, InitialProfile):
        return initial_state(params, u_init, N)
    u = np.asarray(u_init, dtype=float)
    return SimState(0.0, params.s0, 0.0, u)


def run_sequential(params: ModelParams, drive: BoundaryDrive, u0: InitialProfile, config: RunConfig) -> RunResult:
    if config.mode != SEQUENTIAL:
        raise ParameterError("run_sequential needs mode = sequential")
    horizon = config.horizon(params)
    times = time_grid(horizon, config.dt)
    monitor = InvariantMonitor(params, drive, u0, horizon)
    state = initial_state(params, u0, config.N)
    states = [state]
    report = [monitor.record(state)]
    law = RightBoundaryLaw.pc()
    status, message = COMPLETED, ""
    for t_new in times[1:]:
        dt = float(t_new - state.t)
        try:
            s_new, s_t = ode_step(state.s, state.u[-1], params, dt, implicit=True)
            inputs = StepInputs(state, s_new, s_t, dt, float(drive(t_new)), law, params)
            u_new = pde.step(inputs)
        except FrontCollapseError as exc:
            status, message = FRONT_COLLAPSE, f"t={t_new:.6g}: {exc}"
            break
        new = SimState(float(t_new), s_new, s_t, u_new)
        rec = monitor.record_step(state, new, inputs)
        states.append(new)
        report.append(rec)
        if rec.violations:
            status, message = INVARIANT_VIOLATION, f"t={t_new:.6g}: " + "; ".join(rec.violations)
            break
        state = new
    return RunResult(states, report, status, message, bounds=monitor.bounds)


def _march(s_traj: FrontTrajectory, params: ModelParams, drive: BoundaryDrive, start: SimState, law_at):
    """Step the profile along a frozen trajectory; ``law_at(k)`` gives the law for step k -> k+1."""
    states = [start]
    inputs_list = []
    state = start
    for k in range(s_traj.times.size - 1):
        t_new = float(s_traj.times[k + 1])
        dt = t_new - float(s_traj.times[k])
        s_new = float(s_traj.s_values[k + 1])
        s_t = float(s_traj.s_t_values[k])
        inputs = StepInputs(state, s_new, s_t, dt, float(drive(t_new)), law_at(k), params)
        state = SimState(t_new, s_new, s_t, pde.step(inputs))
        states.append(state)
        inputs_list.append(inputs)
    return states, inputs_list


def _trace(states: list[SimState]) -> BoundaryTrace:
    return BoundaryTrace(np.array([st.t for st in states]), np.array([st.u[-1] for st in states]))


def solve_ap1_window(s_traj: FrontTrajectory, params: ModelParams, drive: BoundaryDrive, u_init, config: RunConfig | None = None):
    """Profile driven by the frozen front ``s_traj`` with the quadratic boundary flux.

    Returns all states on the window (the initial one included) and the
    right-boundary trace u(., 1).
    """
    start = _as_state(u_init, params, None if config is None else config.N)
    law = RightBoundaryLaw.ap1()
    states, _ = _march(s_traj, params, drive, start, lambda k: law)
    return states, _trace(states)


def solve_ap2_eps_window(
    s_traj: FrontTrajectory,
    params: ModelParams,
    drive: BoundaryDrive,
    u_init,
    epsilon: float,
    tol: float = 1e-11,
    max_iters: int = 200,
    N: int | None = None,
):
    """Fixed point of eta -> profile of the problem with mollified frozen trace eta.

    The breaking term uses sigma(rho_eps * eta) with eta extended by zero
    outside the window. Returns (states, trace, inputs, iterations).
    """
    start = _as_state(u_init, params, N)
    eta = BoundaryTrace(s_traj.times, np.full(s_traj.times.size, start.u[-1]))
    for it in range(1, max_iters + 1):
        smooth = mollify(eta, epsilon).values
        states, inputs = _march(s_traj, params, drive, start, lambda k: RightBoundaryLaw.ap2(smooth[k + 1]))
        trace = _trace(states)
        change = float(np.max(np.abs(trace.values - eta.values)))
        eta = trace
        if change <= tol * max(1.0, float(np.max(np.abs(trace.values)))):
            return states, trace, inputs, it
    raise PicardFailure(f"mollified trace iteration did not converge in {max_iters} iterations")


def run_picard(params: ModelParams, drive: BoundaryDrive, u0: InitialProfile, config: RunConfig) -> RunResult:
    if config.mode != PICARD:
        raise ParameterError("run_picard needs mode = picard")
    horizon = config.horizon(params)
    times = time_grid(horizon, config.dt)
    n_steps = times.size - 1
    monitor = InvariantMonitor(params, drive, u0, horizon)
    state = initial_state(params, u0, config.N)
    states = [state]
    report = [monitor.record(state)]
    windows: list[WindowLog] = []
    ap1 = RightBoundaryLaw.ap1()
    m = max(MIN_WINDOW_STEPS, int(round(config.window / config.dt)))
    i0 = 0
    status, message = COMPLETED, ""

    while i0 < n_steps:
        i1 = min(i0 + m, n_steps)
        s_traj = FrontTrajectory.constant(state.s, times[i0 : i1 + 1])
        distances: list[float] = []
        converged = False
        collapsed = False
        try:
            for _ in range(config.picard_max_iters):
                if config.epsilon is None:
                    w_states, w_inputs = _march(s_traj, params, drive, state, lambda k: ap1)
                    trace = _trace(w_states)
                else:
                    w_states, trace, w_inputs, _ = solve_ap2_eps_window(
                        s_traj, params, drive, state, config.epsilon
                    )
                s_next = gamma_map(s_traj, trace, params)
                distances.append(w12_distance(s_next, s_traj))
                if distances[-1] < config.picard_tol:
                    converged = True
                    break
                s_traj = s_next
        except FrontCollapseError:
            collapsed = True
        except (NewtonFailure, SingularSystemError, PicardFailure) as exc:
            logger.debug("window [%g, %g] failed: %s", times[i0], times[i1], exc)
        windows.append(WindowLog(float(times[i0]), float(times[i1]), len(distances), distances, converged))

        if not converged:
            if i1 - i0 <= MIN_WINDOW_STEPS:
                if collapsed:
                    status, message = FRONT_COLLAPSE, f"front collapsed in window at t={times[i0]:.6g}"
                else:
                    status = PICARD_FAILURE
                    message = f"no contraction at minimum window starting t={times[i0]:.6g}"
                break
            m = max(MIN_WINDOW_STEPS, m // 2)
            logger.info("halving Picard window to %d steps at t=%g", m, times[i0])
            continue

        violated = False
        for k, new in enumerate(w_states[1:]):
            rec = monitor.record_step(w_states[k], new, w_inputs[k])
            states.append(new)
            report.append(rec)
            if rec.violations:
                status, message = INVARIANT_VIOLATION, f"t={new.t:.6g}: " + "; ".join(rec.violations)
                violated = True
                break
        if violated:
            break
        state = w_states[-1]
        i0 = i1
    return RunResult(states, report, status, message, windows=windows, bounds=monitor.bounds)


def run(params: ModelParams, drive: BoundaryDrive, u0: InitialProfile, config: RunConfig) -> RunResult:
    if config.mode == PICARD:
        return run_picard(params, drive, u0, config)
    return run_sequential(params, drive, u0, config)
