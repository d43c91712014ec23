"""Landau change of variables between [0, s(t)] and the fixed interval [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .model import SimState


@dataclass(frozen=True)
class PhysicalProfile:
    """Concentration u(z) sampled on [0, s]."""

    z_nodes: np.ndarray
    values: np.ndarray
    s: float

    def __post_init__(self) -> None:
        z = np.array(self.z_nodes, dtype=float)
        v = np.array(self.values, dtype=float)
        if not self.s > 0:
            raise ParameterError(f"front s = {self.s!r} violates s>0")
        if z.ndim != 1 or z.shape != v.shape or z.size < 2:
            raise ParameterError("profile needs matching 1-D z_nodes and values")
        if np.any(np.diff(z) <= 0):
            raise ParameterError("z_nodes must be strictly increasing")
        if z[0] != 0.0 or not np.isclose(z[-1], self.s, rtol=1e-12, atol=0.0):
            raise ParameterError("z_nodes must span [0, s]")
        z.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "z_nodes", z)
        object.__setattr__(self, "values", v)


def fixed_grid(N: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, N + 1)


def to_fixed(profile: PhysicalProfile, grid_size: int) -> np.ndarray:
    """Values u(y_j s) at the uniform nodes y_j = j/N.

    Linear interpolation keeps the result inside [min u, max u].
    """
    if grid_size < 2:
        raise ParameterError("grid_size must be >= 2")
    z = fixed_grid(grid_size) * profile.s
    return np.interp(z, profile.z_nodes, profile.values)


def to_physical(state: SimState) -> PhysicalProfile:
    z = fixed_grid(state.N) * state.s
    return PhysicalProfile(z, state.u.copy(), state.s)
