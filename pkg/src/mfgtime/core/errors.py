class ConfigError(ValueError):
    """Invalid scenario file, configuration value or command-line flag."""


class CFLViolationError(ValueError):
    """The time step is too large for one step to stay within a grid cell."""


class EmptyTargetError(ValueError):
    """No grid node lies within one grid spacing of the target set."""


class ArtifactMismatchError(ValueError):
    """Stored artifacts do not match the hashes recorded in the run manifest."""


class StationarySolveError(RuntimeError):
    """Gauss-Seidel sweeping did not converge within the sweep budget."""


class TracingError(RuntimeError):
    """
    A traced trajectory did not reach its target within the time horizon.

    `population` and `atom` are filled in when the failure happens while
    computing a best response, so the caller can tell which initial atom
    could not be routed.
    """

    def __init__(self, message, population=None, atom=None):
        super().__init__(message)
        self.population = population
        self.atom = atom
