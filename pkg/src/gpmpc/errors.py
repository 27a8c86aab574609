"""Exception types shared across the package."""


class GpmpcError(Exception):
    """Base class for all package-specific errors."""


class NumericalError(GpmpcError):
    """A matrix factorization failed even after jitter escalation.

    Attributes
    ----------
    jitter : float
        The last jitter value that was attempted.
    """

    def __init__(self, message, jitter=0.0):
        super().__init__(message)
        self.jitter = float(jitter)


class TrainingError(GpmpcError):
    """Hyperparameter training failed from every supplied start."""


class CapabilityError(GpmpcError):
    """An (operation, model) combination is not supported."""


class DivergenceError(GpmpcError):
    """A simulated or predicted state became non-finite.

    Attributes
    ----------
    step : int
        Index of the step at which divergence was detected.
    """

    def __init__(self, message, step):
        super().__init__(message)
        self.step = int(step)
