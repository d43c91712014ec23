
import numpy as np
import pytest

from rubberfront.errors import ParameterError
from rubberfront.model import BoundaryDrive, InitialProfile, ModelParams
from rubberfront.presets import generic_drive, generic_initial
from rubberfront.verify import (
    CASES,
    alpha_regression,
    case_error,
    constant_moving,
    convergence_study,
    epsilon_study,
    static_cosine,
    truncation_residual,
)

UNIT = ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=1.0)


@pytest.mark.parametrize("name", sorted(CASES))
def test_forcing_matches_numerical_derivatives(name):
    case = CASES[name]()
    y = np.linspace(0.05, 0.95, 19)
    t, dt, dy = 0.3, 1e-5, 1e-4

    def u(t_, y_):
        return case.u_exact(t_, np.asarray(y_, dtype=float))

    s = case.s_exact(t)
    s_t = (case.s_exact(t + dt) - case.s_exact(t - dt)) / (2 * dt)
    u_t = (u(t + dt, y) - u(t - dt, y)) / (2 * dt)
    u_y = (u(t, y + dy) - u(t, y - dy)) / (2 * dy)
    u_yy = (u(t, y + dy) - 2 * u(t, y) + u(t, y - dy)) / dy**2
    numeric = u_t - u_yy / s**2 - y * s_t / s * u_y
    np.testing.assert_allclose(case.forcing(t, y), numeric, atol=1e-5)


@pytest.mark.parametrize("name", sorted(CASES))
def test_boundary_data_match_exact_fluxes(name):
    case = CASES[name]()
    p = case.params
    t, dy = 0.2, 1e-6
    s = case.s_exact(t)
    u0 = case.u_exact(t, np.array([0.0]))[0]
    u_y0 = (case.u_exact(t, np.array([dy]))[0] - u0) / dy
    # Robin condition -(1/s) u_y = beta (b - gamma u) at y = 0
    assert -u_y0 / s == pytest.approx(p.beta * (case.b_exact(t) - p.gamma * u0), abs=1e-5)


def test_static_case_spatial_order():
    table = convergence_study(static_cosine(), [(N, 2.0 / N**2) for N in (50, 100, 200)])
    assert table.passed
    assert min(table.orders) >= 1.9


def test_constant_case_is_exact():
    case = constant_moving()
    for N, dt in [(10, 1e-2), (40, 5e-3)]:
        assert case_error(case, N, dt) <= 1e-13


def test_truncation_residuals_vanish_with_refinement():
    case = static_cosine()
    coarse = truncation_residual(case, 50, 2.0 / 50**2)
    fine = truncation_residual(case, 100, 2.0 / 100**2)
    assert fine < coarse / 3.0


def test_convergence_study_is_reproducible():
    grids = [(20, 1e-2), (40, 1e-2 / 4), (80, 1e-2 / 16)]
    a = convergence_study(static_cosine(), grids)
    b = convergence_study(static_cosine(), grids)
    assert a.rows == b.rows
    assert "static_cosine" in a.format()


@pytest.mark.parametrize(
    "grids",
    [[(10, 1e-2), (20, 1e-3)], [(20, 1e-2), (10, 1e-3), (40, 1e-4)], [(10, 1e-2), (10, 1e-2), (20, 1e-3)]],
)
def test_convergence_study_rejects_bad_grids(grids):
    with pytest.raises(ParameterError):
        convergence_study(static_cosine(), grids)


def test_epsilon_study_on_generic_data():
    params = ModelParams(a0=1.0, alpha=0.5, beta=2.0, gamma=1.0, s0=1.0, T=0.5)
    table = epsilon_study(params, generic_drive(), generic_initial(), (0.1, 0.05, 0.025), N=40, dt=5e-3)
    assert table.passed
    devs = [r.deviation for r in table.rows]
    assert devs[0] > devs[-1]


def test_epsilon_study_on_equilibrium_data():
    table = epsilon_study(UNIT, BoundaryDrive.constant(1.0), InitialProfile.constant(1.0, 1.0), (0.1, 0.05, 0.025), N=40, dt=5e-3)
    # only the zero extension near t = 0 and t = T perturbs the constant trace
    assert table.passed
    assert all(r.deviation < 0.1 for r in table.rows)


def test_epsilon_above_horizon_is_excluded():
    params = UNIT.with_(T=0.2)
    table = epsilon_study(params, generic_drive(0.2), generic_initial(), (0.5, 0.05), N=20, dt=1e-2)
    assert [r.in_range for r in table.rows] == [False, True]


def test_alpha_regression_growth():
    params = UNIT.with_(alpha=0.0)
    report = alpha_regression(params, BoundaryDrive.constant(1.0, 2.0), InitialProfile.constant(0.0, 1.0), 2.0, N=40, dt=1e-2)
    assert report.passed, report.format()
    assert report.increasing_after is not None and report.increasing_after < 0.1
    assert report.paired_max_s <= report.paired_M_front


def test_alpha_regression_without_drive_is_stationary():
    params = UNIT.with_(alpha=0.0)
    report = alpha_regression(params, BoundaryDrive.constant(0.0, 1.0), InitialProfile.constant(0.0, 1.0), 1.0, N=20, dt=1e-2)
    assert report.s_final == report.s_initial == 1.0
    assert report.checks["s(T) > s0 when b > 0"]


def test_alpha_regression_requires_alpha_zero():
    with pytest.raises(ParameterError):
        alpha_regression(UNIT, BoundaryDrive.constant(1.0), InitialProfile.constant(0.0, 1.0), 1.0)
