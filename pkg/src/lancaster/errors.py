"""Exception hierarchy shared by all modules."""


class LancasterError(Exception):
    """Base class for errors raised by this package."""


class InvalidSpec(LancasterError, ValueError):
    """A family specification violates its parameter constraints."""


class MomentMatrixNotPSD(LancasterError, ValueError):
    """The Hankel moment matrix has a clearly negative eigenvalue."""


class DegenerateSupport(LancasterError, ValueError):
    """The law is concentrated on a single point."""


class DegreeOutOfRange(LancasterError, IndexError):
    pass


class QuadratureFailure(LancasterError, ValueError):
    """Quadrature weights do not represent a probability measure."""


class OutOfSupport(LancasterError, ValueError):
    pass


class NegativeProduct(LancasterError, ValueError):
    """``A_n * B_n < 0`` for some admissible ``n``: not a Lancaster law."""


class DegenerateMarginal(LancasterError, ValueError):
    pass


class UnsupportedFamily(LancasterError, TypeError):
    pass


class DegenerateVariance(LancasterError, ValueError):
    """A simulated coordinate has (numerically) zero variance."""


class SeriesNotTerminated(LancasterError, ArithmeticError):
    """A covariance series was cut at its cap while terms were still large."""


class NoConvergenceWarning(UserWarning):
    """Alternating conditional expectations stopped at ``max_iter``."""
