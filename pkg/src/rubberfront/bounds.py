"""Executable a-priori estimates: front cap, sup bound and energy monitor.

The front cap follows the energy inequality obtained by testing the
concentration equation with s (u - b/gamma)::

    (alpha^2/12) s^3(t) <= M(eta0) + J1/(2 gamma^2) + (b*/gamma^2) J2 + J3/(2 beta gamma^3)

with J1 = int s^3 b_t^2, J2 = int s |b_t|, J3 = int s^2 b_t^2, and

    M(eta) = s0 |u0 - b(0)/gamma|_H^2 / 2 + alpha^2 s0^3 / 6
             + 2 (b*^2 / (2 gamma^2))^{3/2} / (3 eta^{3/2}),

where eta0^3 = alpha^2/4 turns the coefficient alpha^2/6 - eta^3/3 into
alpha^2/12. Gronwall on J1 gives the factor N(T), and with l = max s the
remaining terms are bounded by J2 <= l |b_t|_1 and J3 <= l^2 |b_t|_2^2,
leaving the cubic inequality

    (alpha^2/12) l^3 <= C + A l + B l^2.

The cap is the unique positive root of that cubic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .model import BoundaryDrive, InitialProfile, ModelParams, SimState, b_star, u_star

logger = logging.getLogger(__name__)

_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class AprioriBounds:
    eta0: float
    M_eta0: float
    N_T: float
    J_caps: tuple[float, float, float]
    M_front: float
    u_star: float
    b_star: float
    cubic_coefficients: tuple[float, float, float, float]
    young_cap: float


def h_norm_sq(values: np.ndarray) -> float:
    """Trapezoid L2(0,1) norm squared of nodal values on a uniform grid."""
    h = 1.0 / (values.size - 1)
    w = np.full(values.size, h)
    w[0] = w[-1] = 0.5 * h
    return float(np.sum(w * values**2))


def _largest_positive_root(lead: float, B: float, A: float, C: float) -> float:
    """Positive root of lead l^3 - B l^2 - A l - C with lead > 0, A, B, C >= 0."""
    if A == 0.0 and B == 0.0:
        return (C / lead) ** (1.0 / 3.0)
    roots = np.roots([lead, -B, -A, -C])
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots.real))].real
    guess = float(np.max(real))

    def poly(x):
        return ((lead * x - B) * x - A) * x - C

    def dpoly(x):
        return (3.0 * lead * x - 2.0 * B) * x - A

    x = guess
    for _ in range(20):
        d = dpoly(x)
        if d == 0.0:
            break
        dx = poly(x) / d
        x -= dx
        if abs(dx) <= 1e-15 * abs(x):
            break
    return float(x)


def apriori_front_cap(
    params: ModelParams,
    drive: BoundaryDrive,
    u0: InitialProfile,
    grid_size: int = 400,
) -> AprioriBounds:
    """Explicit cap on s(t) over [0, T] and the derived sup bound on u."""
    alpha, beta, gamma, s0 = params.alpha, params.beta, params.gamma, params.s0
    if alpha <= 0:
        raise ParameterError("front cap needs alpha>0")
    T = params.T
    bs = b_star(drive, u0, gamma, T)
    l1 = drive.bt_l1(T)
    l2sq = drive.bt_l2(T) ** 2

    eta0 = (alpha**2 / 4.0) ** (1.0 / 3.0)
    dev = u0.on_fixed_grid(s0, grid_size) - float(drive(0.0)) / gamma
    M_eta0 = (
        s0 * h_norm_sq(dev) / 2.0
        + alpha**2 * s0**3 / 6.0
        + 2.0 * (bs**2 / (2.0 * gamma**2)) ** 1.5 / (3.0 * eta0**1.5)
    )
    exponent = 6.0 / (gamma * alpha) ** 2 * l2sq
    gronwall = math.exp(exponent) if exponent < _MAX_EXPONENT else math.inf
    N_T = 12.0 / alpha**2 * l2sq * gronwall
    factor = 1.0 + N_T / (2.0 * gamma**2)

    C = M_eta0 * factor
    A = bs / gamma**2 * factor * l1
    B = factor / (2.0 * beta * gamma**3) * l2sq
    lead = alpha**2 / 12.0
    if not math.isfinite(factor):
        # the Gronwall factor overflows: the estimate is vacuous
        logger.debug("front cap overflow: exponent %.3g", exponent)
        return AprioriBounds(eta0, M_eta0, N_T, (math.inf,) * 3, math.inf, math.inf, bs, (lead, B, A, C), math.inf)
    with np.errstate(over="ignore", invalid="ignore"):
        M_front = _largest_positive_root(lead, B, A, C)
    if not math.isfinite(M_front):
        M_front = math.inf

    # Young absorption of the l and l^2 terms down to alpha^2/24; a looser,
    # reference-only cap.
    x = -1.0 + math.sqrt(1.0 + alpha**2 / 8.0)
    try:
        young_rhs = C + 2.0 / (3.0 * x) * A**1.5 + B**3 / (3.0 * x**2)
    except OverflowError:
        young_rhs = math.inf
    young_cap = (24.0 * young_rhs / alpha**2) ** (1.0 / 3.0)

    J2 = M_front * l1
    J3 = M_front**2 * l2sq
    J1 = (
        12.0 * M_eta0 / alpha**2 * l2sq
        + 12.0 / alpha**2 * (bs / gamma**2 * J2 + J3 / (2.0 * beta * gamma**3)) * l2sq
    ) * gronwall
    return AprioriBounds(
        eta0=eta0,
        M_eta0=M_eta0,
        N_T=N_T,
        J_caps=(J1, J2, J3),
        M_front=M_front,
        u_star=u_star(alpha, M_front, bs, gamma),
        b_star=bs,
        cubic_coefficients=(lead, B, A, C),
        young_cap=young_cap,
    )


@dataclass
class EnergySeries:
    """E(t) = |u(t)|_H^2 + int_0^t |u_y|_H^2 with its two parts."""

    times: np.ndarray
    E: np.ndarray
    h_norm_sq: np.ndarray
    dissipation: np.ndarray
    warnings: list[str] = field(default_factory=list)


def grad_norm_sq(u: np.ndarray) -> float:
    """|u_y|_H^2 of the piecewise-linear interpolant."""
    N = u.size - 1
    return float(N * np.sum(np.diff(u) ** 2))


def energy_monitor(states: list[SimState]) -> EnergySeries:
    """Energy series over committed states; warns when E doubles within a unit time."""
    if not states:
        raise ParameterError("energy_monitor needs at least one state")
    times = np.array([st.t for st in states])
    hn = np.array([h_norm_sq(st.u) for st in states])
    g = np.array([grad_norm_sq(st.u) for st in states])
    diss = np.zeros_like(hn)
    if len(states) > 1:
        diss[1:] = np.cumsum(0.5 * np.diff(times) * (g[1:] + g[:-1]))
    E = hn + diss
    return EnergySeries(times, E, hn, diss, doubling_warnings(times, E))


def doubling_warnings(times: np.ndarray, E: np.ndarray) -> list[str]:
    out: list[str] = []
    j = 0
    # Compare each point with the smallest E over the preceding unit interval.
    for i in range(times.size):
        while times[i] - times[j] > 1.0:
            j += 1
        lo = float(np.min(E[j : i + 1]))
        if lo > 0 and E[i] > 2.0 * lo:
            msg = f"energy doubled within unit time at t={times[i]:.6g} ({lo:.6g} -> {E[i]:.6g})"
            out.append(msg)
    if out:
        logger.warning("%s (%d occurrences)", out[0], len(out))
    return out
