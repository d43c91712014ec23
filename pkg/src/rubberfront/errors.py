"""Exception hierarchy shared by the solver modules."""


class ParameterError(ValueError):
    """A model parameter or input datum violates its admissibility constraint."""


class SimulationError(RuntimeError):
    """Base class for failures raised while marching a simulation."""


class FrontCollapseError(SimulationError):
    """The front position left the admissible region s > s_min."""


class SingularSystemError(SimulationError):
    """The implicit step produced a singular tridiagonal system."""


class NewtonFailure(SimulationError):
    """The boundary-row scalar solve did not converge."""


class PicardFailure(SimulationError):
    """The window iteration failed to converge at the minimum window size."""
