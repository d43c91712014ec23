"""One backward-Euler step of the fixed-domain parabolic problem.

Discretization on y_j = j/N, h = 1/N, with s = s_new and c_j = y_j s_t / s::

    (u_j - u_j^n)/dt - (u_{j+1} - 2u_j + u_{j-1})/(s h)^2 - c_j (D u)_j = f_j

``D`` is the one-sided difference upwinded on the sign of s_t. Both Robin
conditions are imposed through ghost nodes eliminated into the end rows:

* y = 0: u_{-1} = u_1 + 2 h s beta (b - gamma u_0)
* y = 1: u_{N+1} = u_{N-1} - 2 h s G, with G the right-boundary flux, and
  the advection term there uses u_y(1) = -s G taken from the same condition.

The end rows therefore read::

    (u_0 - u_0^n)/dt + 2(u_0 - u_1)/(s h)^2 + 2 beta (gamma u_0 - b)/(s h) = f_0
    (u_N - u_N^n)/dt + 2(u_N - u_{N-1})/(s h)^2 + (2/(s h) + s_t) G(u_N) = f_N

Multiplying every row by the lumped hat-function mass (h inside, h/2 at the
ends) gives exactly the discrete weak form, which is what
:func:`weak_residual` evaluates.

``G`` is the only nonlinearity. Because the rest of the system is linear,
u = p + G q for two banded solves p, q, and the boundary row collapses to a
scalar equation v = p_N + q_N G(v) for v = u_N, solved by semismooth Newton
with sigma'(0) taken as 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .errors import FrontCollapseError, NewtonFailure, ParameterError, SingularSystemError
from .model import ModelParams, SimState, sigma

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITERS = 50
PICARD_FALLBACK_ITERS = 500

AP1 = "AP1"
AP2 = "AP2"
PC = "PC"


@dataclass(frozen=True)
class RightBoundaryLaw:
    """Flux G(u(1)) = -(1/s) u_y(1) imposed at the right end.

    ``AP1``: a0 sigma(u)(sigma(u) - alpha s).
    ``AP2``: a0 (sigma(u)^2 - alpha sigma(eta) s) with ``frozen_trace`` = eta(t, 1).
    ``PC``:  sigma(u) s_t with the step's externally supplied s_t.
    """

    variant: str
    frozen_trace: float | None = None

    def __post_init__(self) -> None:
        if self.variant not in (AP1, AP2, PC):
            raise ParameterError(f"unknown boundary law {self.variant!r}")
        if (self.variant == AP2) != (self.frozen_trace is not None):
            raise ParameterError("frozen_trace is required for AP2 and only for AP2")

    @classmethod
    def ap1(cls) -> "RightBoundaryLaw":
        return cls(AP1)

    @classmethod
    def ap2(cls, eta: float) -> "RightBoundaryLaw":
        return cls(AP2, float(eta))

    @classmethod
    def pc(cls) -> "RightBoundaryLaw":
        return cls(PC)

    def flux(self, v: float, s: float, s_t: float, params: ModelParams) -> float:
        sv = sigma(v)
        if self.variant == AP1:
            return params.a0 * sv * (sv - params.alpha * s)
        if self.variant == AP2:
            return params.a0 * (sv * sv - params.alpha * sigma(self.frozen_trace) * s)
        return sv * s_t

    def dflux(self, v: float, s: float, s_t: float, params: ModelParams) -> float:
        if v <= 0.0:
            return 0.0
        if self.variant == AP1:
            return params.a0 * (2.0 * v - params.alpha * s)
        if self.variant == AP2:
            return 2.0 * params.a0 * v
        return s_t


@dataclass(frozen=True)
class StepInputs:
    """Data for advancing ``state`` by ``dt`` to a front at ``s_new``.

    ``forcing`` is a nodal source added to every row (manufactured
    solutions). ``flux_offset`` is subtracted from the law's flux, i.e. the
    imposed right flux is G(u) - flux_offset. ``advection_field``, when
    given, replaces the implicit advection by the explicit upwind transport
    of that fixed nodal field, which makes the step affine in its data.
    """

    state: SimState
    s_new: float
    s_t: float
    dt: float
    b_now: float
    law: RightBoundaryLaw
    params: ModelParams
    forcing: np.ndarray | None = None
    flux_offset: float = 0.0
    advection_field: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ParameterError(f"dt = {self.dt!r} must be positive")
        if not self.s_new > 0:
            raise FrontCollapseError(f"s_new = {self.s_new!r} violates s>0")
        n = self.state.u.size
        for name in ("forcing", "advection_field"):
            arr = getattr(self, name)
            if arr is not None and np.shape(arr) != (n,):
                raise ParameterError(f"{name} must have {n} nodal values")


@dataclass
class _System:
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    kappa: float


def _upwind_coefficients(N: int, s: float, s_t: float):
    """Diagonal/off-diagonal contributions of -c_j (D u)_j on interior rows."""
    h = 1.0 / N
    c = np.linspace(0.0, 1.0, N + 1) * s_t / s
    w = np.abs(c) / h
    w[0] = 0.0
    w[-1] = 0.0
    if s_t > 0:
        return w, np.zeros_like(w), -w  # diag, sub, sup
    return w, -w, np.zeros_like(w)


def _assemble(inputs: StepInputs, u_old: np.ndarray) -> _System:
    p = inputs.params
    N = u_old.size - 1
    h = 1.0 / N
    s = inputs.s_new
    dt = inputs.dt
    D = 1.0 / (s * h) ** 2

    diag = np.full(N + 1, 1.0 / dt + 2.0 * D)
    sub = np.full(N + 1, -D)
    sup = np.full(N + 1, -D)
    sub[0] = 0.0
    sup[-1] = 0.0
    sup[0] = -2.0 * D
    sub[-1] = -2.0 * D
    rhs = u_old / dt

    kappa = 2.0 / (s * h)
    if inputs.advection_field is None:
        kappa += inputs.s_t
        a_diag, a_sub, a_sup = _upwind_coefficients(N, s, inputs.s_t)
        diag += a_diag
        sub += a_sub
        sup += a_sup
    else:
        f = np.asarray(inputs.advection_field, dtype=float)
        c = np.linspace(0.0, 1.0, N + 1) * inputs.s_t / s
        grad = np.empty(N + 1)
        if inputs.s_t > 0:
            grad[:-1] = (f[1:] - f[:-1]) / h
            grad[-1] = (f[-1] - f[-2]) / h
        else:
            grad[1:] = (f[1:] - f[:-1]) / h
            grad[0] = 0.0
        rhs = rhs + c * grad

    diag[0] += 2.0 * p.beta * p.gamma / (s * h)
    rhs = rhs.copy()
    rhs[0] += 2.0 * p.beta * inputs.b_now / (s * h)
    if inputs.forcing is not None:
        rhs += np.asarray(inputs.forcing, dtype=float)
    return _System(sub, diag, sup, rhs, kappa)


def _banded(system: _System) -> np.ndarray:
    n = system.diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = system.sup[:-1]
    ab[1] = system.diag
    ab[2, :-1] = system.sub[1:]
    return ab


def _boundary_solve(p_N: float, q_N: float, G, dG, v0: float) -> float:
    """Solve v = p_N + q_N G(v) for the right boundary value."""
    v = v0
    for _ in range(NEWTON_MAX_ITERS):
        phi = v - p_N - q_N * G(v)
        dphi = 1.0 - q_N * dG(v)
        if dphi == 0.0 or not np.isfinite(dphi):
            break
        dv = phi / dphi
        v -= dv
        if abs(dv) <= NEWTON_TOL * max(1.0, abs(v)):
            return v
    logger.debug("boundary Newton failed to converge, falling back to Picard")
    v = v0
    for _ in range(PICARD_FALLBACK_ITERS):
        v_next = p_N + q_N * G(v)
        if not np.isfinite(v_next):
            break
        if abs(v_next - v) <= NEWTON_TOL * max(1.0, abs(v_next)):
            return v_next
        v = v_next
    raise NewtonFailure("right-boundary solve did not converge; reduce dt")


def step(inputs: StepInputs) -> np.ndarray:
    """Advance the nodal profile by one implicit step and return it."""
    p = inputs.params
    if inputs.s_new <= p.s_min:
        raise FrontCollapseError(f"s_new = {inputs.s_new!r} below s_min = {p.s_min!r}")
    u_old = inputs.state.u
    system = _assemble(inputs, u_old)
    N = u_old.size - 1

    rhs = np.zeros((N + 1, 2))
    rhs[:, 0] = system.rhs
    rhs[N, 1] = -system.kappa
    try:
        sol = solve_banded((1, 1), _banded(system), rhs, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"implicit step matrix is singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystemError("implicit step produced non-finite values")
    p_vec, q_vec = sol[:, 0], sol[:, 1]

    law, s, s_t, off = inputs.law, inputs.s_new, inputs.s_t, inputs.flux_offset

    def G(v):
        return law.flux(v, s, s_t, p) - off

    def dG(v):
        return law.dflux(v, s, s_t, p)

    v = _boundary_solve(p_vec[N], q_vec[N], G, dG, float(u_old[N]))
    return p_vec + G(v) * q_vec


def residual_vector(state_old: SimState, u_new: np.ndarray, inputs: StepInputs) -> np.ndarray:
    """Discrete weak residuals against every hat function z_j."""
    u_new = np.asarray(u_new, dtype=float)
    system = _assemble(inputs, state_old.u)
    N = u_new.size - 1
    h = 1.0 / N
    Au = system.diag * u_new
    Au[1:] += system.sub[1:] * u_new[:-1]
    Au[:-1] += system.sup[:-1] * u_new[1:]
    G = inputs.law.flux(u_new[N], inputs.s_new, inputs.s_t, inputs.params) - inputs.flux_offset
    Au[N] += system.kappa * G
    weights = np.full(N + 1, h)
    weights[0] = weights[-1] = 0.5 * h
    return weights * (Au - system.rhs)


def weak_residual(state_old: SimState, state_new, inputs: StepInputs, test_index: int) -> float:
    """Weak-form residual of one step tested against hat function ``test_index``.

    ``state_new`` may be a :class:`SimState` or a bare nodal array.
    """
    u_new = state_new.u if isinstance(state_new, SimState) else state_new
    return float(residual_vector(state_old, u_new, inputs)[test_index])


def advection_dt_limit(N: int, s: float, s_t: float) -> float:
    """Largest dt keeping every row diagonally dominant (non-negativity).

    Only a receding front (s_t < 0) restricts dt; it weakens the boundary
    row by (2N/s + s_t)|s_t|. With |s_t| <= a0 alpha s this is implied by
    2 N a0 alpha dt <= 1.
    """
    if s_t >= 0:
        return np.inf
    loss = (2.0 * N / s + s_t) * (-s_t)
    return np.inf if loss <= 0 else 1.0 / loss
