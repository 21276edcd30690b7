"""Exception types raised by the numerical modules."""


class PathMeasureError(Exception):
    """Base class for all library errors."""


class InvalidPathError(PathMeasureError, ValueError):
    pass


class NoPathError(PathMeasureError):
    """No feasible least-action path exists (e.g. every slit is closed)."""


class ConvergenceError(PathMeasureError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, grad_norm: float, iterations: int):
        super().__init__(f"{message} (|grad|_inf={grad_norm:.3e} after {iterations} iterations)")
        self.grad_norm = grad_norm
        self.iterations = iterations


class BoundaryLeakError(PathMeasureError):
    """Probability reached the edges of the periodic grid."""

    def __init__(self, edge_mass: float, threshold: float):
        super().__init__(
            f"wavepacket mass {edge_mass:.3e} near the grid edges exceeds {threshold:.1e}; "
            "enlarge the spatial domain"
        )
        self.edge_mass = edge_mass
        self.threshold = threshold


class DegenerateConfigError(PathMeasureError):
    """A Monte-Carlo run accepted no samples."""


class IncompatibleHistogramsError(PathMeasureError, ValueError):
    pass


class CapacityError(PathMeasureError, ValueError):
    """Requested enumeration is too large to run exhaustively."""
