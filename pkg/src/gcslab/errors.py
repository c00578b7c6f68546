"""Exception hierarchy shared by all gcslab modules."""


class GcsError(Exception):
    """Base class for library errors."""


class DegenerateSeedError(GcsError, ValueError):
    """Seed coefficients violate Re(f0 g0*) = 1 or make g(tau) vanish."""


class HeisenbergViolationError(GcsError, ValueError):
    """Standard deviations with a product below the Heisenberg bound."""

    def __init__(self, message, product=None):
        super().__init__(message)
        self.product = product


class QuadratureError(GcsError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoMotionError(GcsError, ValueError):
    """The ratio R(t) is undefined: zero momentum in zero field."""


class DomainError(GcsError, ValueError):
    """Inputs outside the domain handled by the semiclassical analysis."""


class EdgeLeakageError(GcsError, RuntimeError):
    """Wavefunction density reached the edge of the periodic box."""


class GridMismatchError(GcsError, ValueError):
    """Two wavefunction samples live on different grids or times."""


class ConfigError(GcsError, ValueError):
    """Invalid run configuration; ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
