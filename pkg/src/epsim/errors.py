"""Exception hierarchy shared across the simulator.

The CLI maps these onto process exit codes (config -> 1, safety -> 2,
stability -> 3); the HTTP layer maps them onto status codes.
"""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class DomainError(SimulationError, ValueError):
    """A physical argument is outside the model's domain of validity."""


class ConfigError(SimulationError, ValueError):
    """A configuration document is malformed or violates a range constraint.

    ``location`` names the offending key ("section.key") or carries a
    line reference for syntax errors.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class StabilityError(SimulationError, ValueError):
    """A chosen time step violates the explicit-scheme stability bound."""

    def __init__(self, message: str, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(message)


class SafetyAbort(SimulationError, RuntimeError):
    """Tissue temperature reached the cell-damage threshold in strict mode.

    ``result`` holds the partial simulation result (flagged partial) when
    the abort happened inside a protocol run.
    """

    def __init__(self, message: str, peak_T: float, time: float, result=None):
        self.peak_T = peak_T
        self.time = time
        self.result = result
        super().__init__(message)
