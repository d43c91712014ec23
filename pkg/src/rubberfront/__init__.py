"""Moving-front solver for diffusant penetration into rubber with breaking."""

from .coupler import RunConfig, RunResult, run, run_picard, run_sequential
from .errors import FrontCollapseError, ParameterError, PicardFailure, SimulationError
from .model import BoundaryDrive, InitialProfile, ModelParams, SimState, equilibrium, sigma

__all__ = [
    "BoundaryDrive",
    "FrontCollapseError",
    "InitialProfile",
    "ModelParams",
    "ParameterError",
    "PicardFailure",
    "RunConfig",
    "RunResult",
    "SimState",
    "SimulationError",
    "equilibrium",
    "run",
    "run_picard",
    "run_sequential",
    "sigma",
]
