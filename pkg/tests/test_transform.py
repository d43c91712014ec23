import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rubberfront.errors import ParameterError
from rubberfront.model import SimState
from rubberfront.transform import PhysicalProfile, fixed_grid, to_fixed, to_physical


def profile(func, s, n=401):
    z = np.linspace(0.0, s, n)
    return PhysicalProfile(z, func(z), s)


@pytest.mark.parametrize("s", [0.3, 1.0, 7.5])
def test_constant_maps_to_constant(s):
    np.testing.assert_array_equal(to_fixed(profile(lambda z: np.full_like(z, 0.7), s), 16), np.full(17, 0.7))


def test_linear_profile():
    np.testing.assert_allclose(to_fixed(profile(lambda z: z, 2.0), 10), 2.0 * fixed_grid(10), atol=1e-14)


def test_quadratic_at_midpoint():
    # u(z) = z^2, s = 3, y = 0.5: u(1.5) = 2.25 (z = 1.5 is a node of the 401-point grid)
    assert to_fixed(profile(lambda z: z**2, 3.0), 2)[1] == pytest.approx(2.25, abs=1e-12)


def test_to_physical_identity_at_unit_front():
    state = SimState(0.0, 1.0, 0.0, np.full(6, 0.4))
    prof = to_physical(state)
    np.testing.assert_array_equal(prof.z_nodes, fixed_grid(5))
    np.testing.assert_array_equal(prof.values, state.u)


def test_to_physical_stretches():
    state = SimState(0.0, 2.0, 0.0, fixed_grid(8))
    prof = to_physical(state)
    np.testing.assert_allclose(prof.values, prof.z_nodes / 2.0)
    assert prof.z_nodes[-1] == 2.0


def test_round_trip_error_is_second_order():
    s = 1.7

    def errors(N):
        fine = to_fixed(profile(np.sin, s, N + 1), 3 * N)
        exact = np.sin(fixed_grid(3 * N) * s)
        return np.max(np.abs(fine - exact))

    e1, e2 = errors(20), errors(40)
    assert np.log2(e1 / e2) > 1.9


@given(
    arrays(float, st.integers(3, 40), elements=st.floats(-5, 5)),
    st.floats(0.01, 50.0),
)
def test_round_trip_exact_at_nodes_and_range(u, s):
    state = SimState(0.0, s, 0.0, u)
    prof = to_physical(state)
    back = to_fixed(prof, state.N)
    np.testing.assert_allclose(back, u, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(u))))
    finer = to_fixed(prof, 3 * state.N)
    assert finer.min() >= u.min() and finer.max() <= u.max()


@pytest.mark.parametrize(
    "z, v, s",
    [([0.0, 0.5], [1.0, 1.0], 1.0), ([0.1, 1.0], [1.0, 1.0], 1.0), ([0.0, 1.0], [1.0, 1.0], 0.0), ([0.0, 0.6, 0.5, 1.0], [0, 0, 0, 0], 1.0)],
)
def test_profile_validation(z, v, s):
    with pytest.raises(ParameterError):
        PhysicalProfile(z, v, s)


def test_grid_size_validation():
    with pytest.raises(ParameterError):
        to_fixed(profile(np.cos, 1.0), 1)
