"""Exception hierarchy shared by the library and the CLI."""


class DsminError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(DsminError, ValueError):
    """An input violates a documented precondition."""


class NumericalFailure(DsminError, RuntimeError):
    """A numerical routine failed to converge or produced non-finite output.

    Parameters
    ----------
    message : str
        Human-readable description.
    estimates : object, optional
        The last (or best) estimates available when the failure occurred.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class DegenerateBeamError(DsminError, ValueError):
    """The beam radiates (numerically) nothing into the angular region."""


class InfeasibleError(DsminError, ValueError):
    """A convex subproblem has an empty feasible set."""
