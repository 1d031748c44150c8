"""Exception hierarchy shared by the computational modules and the CLI."""


class IntegraxError(Exception):
    """Base class for all library errors."""


class InputError(IntegraxError, ValueError):
    """Malformed or inconsistent input (bad shapes, violated preconditions)."""


class NoSuchTreeError(InputError):
    """No bicolored plane tree realises the requested valency data."""


class RegimeError(IntegraxError, ValueError):
    """The multiplicity signature lies outside the regime an operation needs."""


class ConvergenceError(IntegraxError, RuntimeError):
    """Newton iteration failed after all restarts.

    ``best_residual`` holds the smallest residual seen over every attempt.
    """

    def __init__(self, message, best_residual=float("inf")):
        super().__init__(message)
        self.best_residual = best_residual
