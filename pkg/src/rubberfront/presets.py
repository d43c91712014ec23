"""Built-in configurations, addressable by name from the command line."""

from __future__ import annotations

import math

import numpy as np

from .config import Config, ConfigError, parse_text, to_text
from .coupler import PICARD, RunConfig
from .model import BoundaryDrive, InitialProfile, ModelParams


def _generic_params() -> ModelParams:
    return ModelParams(a0=1.0, alpha=0.5, beta=2.0, gamma=1.0, s0=1.0, T=1.0)


def generic_drive(T: float = 1.0) -> BoundaryDrive:
    return BoundaryDrive.from_function(lambda t: 1.0 + 0.5 * math.sin(2.0 * math.pi * t), T, 41)


def generic_initial(s0: float = 1.0) -> InitialProfile:
    return InitialProfile.from_function(lambda z: 0.5 + 0.25 * math.cos(math.pi * z / s0), s0, 21)


def _constant(params: ModelParams, b: float, u: float, run: RunConfig, sweep=()) -> Config:
    return Config(
        params,
        BoundaryDrive.constant(b, params.T),
        InitialProfile.constant(u, params.s0),
        run,
        sweep=sweep,
    )


def _build() -> dict[str, str]:
    unit = ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=1.0)
    g = _generic_params()
    configs = {
        # stationary data: u = b/gamma, s = b/(gamma alpha)
        "equilibrium": _constant(unit, 1.0, 1.0, RunConfig(N=100, dt=1e-3)),
        # smooth oscillating drive, sequential and windowed fixed-point modes
        "generic": Config(g, generic_drive(), generic_initial(), RunConfig(N=100, dt=1e-3)),
        "generic_picard": Config(
            g,
            generic_drive(),
            generic_initial(),
            RunConfig(mode=PICARD, N=100, dt=1e-3, window=0.25, picard_tol=1e-10, picard_max_iters=50),
        ),
        # relaxation from an empty, short front to equilibrium over 20/(a0 alpha)
        "relax": _constant(unit.with_(s0=0.5, T=20.0), 1.0, 0.0, RunConfig(N=50, dt=1e-2)),
        # b = 0 with strong breaking: s decays like exp(-a0 alpha t) below s_min
        "collapse": _constant(unit.with_(alpha=50.0), 0.0, 0.0, RunConfig(N=50, dt=1e-2)),
        # no breaking: monotone growth
        "alpha0": _constant(unit.with_(alpha=0.0, T=2.0), 1.0, 0.0, RunConfig(N=100, dt=1e-3)),
        "sweep_alpha": _constant(
            unit.with_(T=40.0), 1.0, 0.0, RunConfig(N=50, dt=1e-2), sweep=(("alpha", (0.5, 1.0, 2.0)),)
        ),
    }
    texts = {name: to_text(cfg) for name, cfg in configs.items()}
    texts["invalid_s0"] = texts["equilibrium"].replace("s0 = 1.0", "s0 = 0.0", 1)
    return texts


PRESETS: dict[str, str] = _build()

# constant-b presets replayed by the bounds suite
CONSTANT_B = ("equilibrium", "relax", "alpha0_paired")


def preset_text(name: str) -> str:
    if name == "alpha0_paired":
        return PRESETS["alpha0"].replace("alpha = 0.0", "alpha = 1.0", 1)
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None


def load_preset(name: str) -> Config:
    return parse_text(preset_text(name), f"<preset {name}>")


def random_admissible(rng: np.random.Generator, T: float = 1.0, N: int = 200, dt: float = 1e-3) -> Config:
    """Random data satisfying the standing assumptions, with 2 N a0 alpha dt <= 1."""
    a0 = rng.uniform(0.2, 2.0)
    alpha_max = min(2.0, 1.0 / (2.0 * N * a0 * dt))
    alpha = 0.0 if rng.random() < 0.1 else rng.uniform(0.05, alpha_max)
    params = ModelParams(
        a0=a0,
        alpha=alpha,
        beta=rng.uniform(0.2, 5.0),
        gamma=rng.uniform(0.5, 2.0),
        s0=rng.uniform(0.3, 2.0),
        T=T,
    )
    knots = np.linspace(0.0, T, 11)
    if rng.random() < 0.3:
        b = np.full(knots.size, rng.uniform(0.0, 2.0))
    else:
        b = rng.uniform(0.0, 2.0, knots.size)
    z = np.linspace(0.0, params.s0, 9)
    u = rng.uniform(0.0, 2.0, z.size) * (rng.random() < 0.8)
    return Config(params, BoundaryDrive(knots, b), InitialProfile(z, u), RunConfig(N=N, dt=dt))
