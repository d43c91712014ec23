import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rubberfront import pde
from rubberfront.errors import FrontCollapseError, ParameterError
from rubberfront.model import ModelParams, SimState, equilibrium
from rubberfront.pde import RightBoundaryLaw, StepInputs

UNIT = ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=1.0)


def inputs_for(u, s=1.0, s_t=0.0, dt=1e-2, b=0.0, law=None, params=UNIT, **extra):
    state = SimState(0.0, s, s_t, np.asarray(u, dtype=float))
    return StepInputs(state, s, s_t, dt, b, law or RightBoundaryLaw.ap1(), params, **extra)


def test_law_requires_trace_only_for_ap2():
    with pytest.raises(ParameterError):
        RightBoundaryLaw("AP2")
    with pytest.raises(ParameterError):
        RightBoundaryLaw("AP1", 1.0)
    with pytest.raises(ParameterError):
        RightBoundaryLaw("XYZ")


@pytest.mark.parametrize(
    "law, v, expected",
    [
        (RightBoundaryLaw.ap1(), 2.0, 2.0 * (2.0 - 0.5 * 3.0)),
        (RightBoundaryLaw.ap1(), -1.0, 0.0),
        (RightBoundaryLaw.ap2(4.0), 2.0, 4.0 - 0.5 * 4.0 * 3.0),
        (RightBoundaryLaw.ap2(-4.0), 2.0, 4.0),
        (RightBoundaryLaw.pc(), 2.0, 2.0 * 0.25),
        (RightBoundaryLaw.pc(), -2.0, 0.0),
    ],
)
def test_law_flux(law, v, expected):
    params = UNIT.with_(alpha=0.5)
    assert law.flux(v, 3.0, 0.25, params) == pytest.approx(expected)


def test_step_input_validation():
    state = SimState(0.0, 1.0, 0.0, np.zeros(5))
    with pytest.raises(ParameterError):
        StepInputs(state, 1.0, 0.0, 0.0, 0.0, RightBoundaryLaw.ap1(), UNIT)
    with pytest.raises(FrontCollapseError):
        StepInputs(state, 0.0, 0.0, 0.1, 0.0, RightBoundaryLaw.ap1(), UNIT)
    with pytest.raises(ParameterError):
        StepInputs(state, 1.0, 0.0, 0.1, 0.0, RightBoundaryLaw.ap1(), UNIT, forcing=np.zeros(3))


def test_step_below_s_min_is_collapse():
    with pytest.raises(FrontCollapseError):
        pde.step(inputs_for(np.zeros(5), s=1e-9))


@pytest.mark.parametrize("law", [RightBoundaryLaw.ap1(), RightBoundaryLaw.ap2(0.0), RightBoundaryLaw.pc()])
def test_zero_is_fixed_point(law):
    np.testing.assert_array_equal(pde.step(inputs_for(np.zeros(21), law=law)), np.zeros(21))


@pytest.mark.parametrize("alpha, gamma, b", [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (1.0, 2.0, 4.0), (0.3, 1.5, 0.7)])
def test_equilibrium_is_stationary(alpha, gamma, b):
    params = UNIT.with_(alpha=alpha, gamma=gamma)
    s_inf, u_inf = equilibrium(params, b)
    u = np.full(41, u_inf)
    out = pde.step(inputs_for(u, s=s_inf, b=b, params=params, dt=0.1))
    np.testing.assert_allclose(out, u, rtol=1e-12)


def test_step_output_has_zero_weak_residual(rng):
    u = rng.uniform(0.0, 2.0, 51)
    inp = inputs_for(u, s=1.3, s_t=0.4, b=1.2, dt=5e-3)
    out = pde.step(inp)
    scale = np.max(np.abs(u)) / inp.dt
    for j in (0, 7, 25, 50):
        assert abs(pde.weak_residual(inp.state, out, inp, j)) <= 1e-10 * scale


def test_zero_residual_for_zero_data():
    inp = inputs_for(np.zeros(11))
    assert pde.weak_residual(inp.state, np.zeros(11), inp, 4) == 0.0


@pytest.mark.parametrize("s_t", [0.0, 0.6, -0.6])
def test_perturbing_interior_node_changes_residual_by_row_sum(rng, s_t):
    N, s, dt, j = 40, 1.5, 1e-2, 17
    u = rng.uniform(0.0, 1.0, N + 1)
    inp = inputs_for(u, s=s, s_t=s_t, dt=dt, b=0.5)
    bumped = u.copy()
    bumped[j] += 1.0
    h = 1.0 / N
    # mass h/dt + stiffness 2/(s^2 h) + upwind |y_j s_t / s|
    expected = h / dt + 2.0 / (s**2 * h) + abs(j * h * s_t / s)
    change = pde.weak_residual(inp.state, bumped, inp, j) - pde.weak_residual(inp.state, u, inp, j)
    assert change == pytest.approx(expected, rel=1e-12)


def test_mms_nodal_error_scales_with_grid():
    from rubberfront.verify import case_error, static_cosine

    case = static_cosine()
    coarse = case_error(case, 20, 2.0 / 400)
    fine = case_error(case, 40, 2.0 / 1600)
    assert fine < coarse / 3.5


def test_dt_limit():
    assert pde.advection_dt_limit(10, 1.0, 0.5) == np.inf
    assert pde.advection_dt_limit(10, 1.0, -0.5) == pytest.approx(1.0 / ((20.0 - 0.5) * 0.5))


profiles = st.lists(st.floats(0.0, 1.0), min_size=5, max_size=40).map(np.array)


@settings(max_examples=60, deadline=None)
@given(profiles, st.floats(0.1, 3.0), st.floats(0.0, 1.0), st.floats(1e-4, 1.0), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_discrete_maximum_principle(frac, s, b_frac, dt, beta, gamma):
    b_star = 2.0
    params = UNIT.with_(beta=beta, gamma=gamma)
    u = frac * b_star / gamma
    out = pde.step(inputs_for(u, s=s, dt=dt, b=b_frac * b_star, law=RightBoundaryLaw.pc(), params=params))
    assert out.min() >= -1e-12 * b_star / gamma
    assert out.max() <= b_star / gamma * (1.0 + 1e-12)


@settings(max_examples=80, deadline=None)
@given(
    profiles,
    st.floats(0.1, 3.0),
    st.floats(-1.0, 1.0),
    st.floats(0.0, 2.0),
    st.sampled_from(["AP1", "PC"]),
    st.floats(0.05, 2.0),
)
def test_non_negativity_under_dt_limit(frac, s, st_frac, b, variant, alpha):
    params = UNIT.with_(alpha=alpha)
    u = 2.0 * frac
    s_t = st_frac * params.a0 * alpha * s
    N = u.size - 1
    dt = min(0.1, 1.0 / (2.0 * N * params.a0 * alpha), pde.advection_dt_limit(N, s, s_t))
    out = pde.step(inputs_for(u, s=s, s_t=s_t, dt=dt, b=b, law=RightBoundaryLaw(variant), params=params))
    assert out.min() >= -1e-12 * max(1.0, np.max(np.abs(u)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1.0), st.floats(-1.0, 1.0))
def test_frozen_advection_step_is_linear(seed, dt, s_t):
    rng = np.random.default_rng(seed)
    N = 24

    def data():
        return dict(
            u=rng.uniform(1.0, 2.0, N + 1),
            b=rng.uniform(0.0, 2.0),
            forcing=rng.uniform(0.0, 1.0, N + 1),
            advection_field=rng.uniform(0.0, 1.0, N + 1),
            flux_offset=rng.uniform(-1.0, 0.0),
        )

    def solve(d):
        return pde.step(
            inputs_for(
                d["u"], s=1.2, s_t=s_t, dt=dt, b=d["b"], law=RightBoundaryLaw.pc(),
                forcing=d["forcing"], advection_field=d["advection_field"], flux_offset=d["flux_offset"],
            )
        )

    a, c = data(), data()
    total = {k: a[k] + c[k] for k in a}
    ua, uc, ut = solve(a), solve(c), solve(total)
    # sigma is linear on the positive cone only
    assume(min(ua.min(), uc.min(), ut.min()) > 0)
    np.testing.assert_allclose(ut, ua + uc, rtol=1e-10, atol=1e-10)
