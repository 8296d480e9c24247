"""Exception types shared across the package.

Each class marks a distinct failure family so the CLI can map them to
distinct exit codes.
"""


class EdgeListFormatError(ValueError):
    """Raised when a typed edge-list document cannot be parsed."""


class UnknownTypeError(ValueError):
    """Raised when a type label does not exist in the loaded graph."""


class DegenerateCutError(ValueError):
    """Raised for cuts with an empty side (not a valid bipartition)."""


class ZeroVolumeError(ValueError):
    """Raised when a conductance denominator is zero.

    Distinguishes "measure undefined for this cut" from a conductance value
    of zero; silent zeros would corrupt sweep minima.
    """


class GraphletAbsentError(ValueError):
    """Raised when a requested typed graphlet has no instance in the graph."""


class EigenConvergenceError(RuntimeError):
    """Iterative eigensolver failed to converge within its iteration cap."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
