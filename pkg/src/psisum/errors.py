"""Exception types shared across the package."""


class PsisumError(Exception):
    """Base class for all package-specific errors."""


class PoleError(PsisumError, ValueError):
    """Argument too close to a pole of the gamma family."""


class DomainError(PsisumError, ValueError):
    """Argument outside the supported domain of an operation."""


class UnsupportedOrder(PsisumError, ValueError):
    """Polygamma/zeta order outside the supported range."""


class SchemaError(PsisumError, ValueError):
    """Parameter point does not satisfy an identity's schema."""


class Divergent(PsisumError, ValueError):
    """Series rejected by the convergence classifier."""


class UnsupportedShape(PsisumError, ValueError):
    """Multi-index sum not of a collapsible rational shape."""


class NonConvergence(PsisumError, RuntimeError):
    """Budget exhausted before the error estimate met the tolerance.

    The partial result is still available as the ``result`` attribute.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
