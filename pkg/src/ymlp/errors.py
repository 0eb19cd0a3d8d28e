class YmlpError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(YmlpError, ValueError):
    pass


class PositivityError(YmlpError, ValueError):
    """A density fell below the admissible floor."""


class InfeasibleError(YmlpError):
    """The reconstruction LP has no feasible point.

    ``row`` names the equality row carrying the Farkas certificate and
    ``context`` the (i, j, t) location when raised from a solver run.
    """

    def __init__(self, message, row=None, certificate=None, context=None):
        super().__init__(message)
        self.row = row
        self.certificate = certificate
        self.context = context


class SolverError(YmlpError, RuntimeError):
    """Non-finite state, stalled time step, or LP iteration limit."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context


class BlowUpError(SolverError):
    """A stage produced non-finite values."""
