"""Exception hierarchy.

Validation and domain problems derive from :class:`ValueError` so callers can
catch them generically; file-format problems derive from :class:`OSError`.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation at a genuine singular point."""


class GeometryError(ValueError):
    """Quadrature geometry cannot reach the phantom support."""


class AlignmentError(ValueError):
    """Grids are not commensurate (spacing or origin mismatch)."""


class SymmetryError(ValueError):
    """Spectral data or multiplier violates conjugate symmetry."""


class BoundaryContaminationError(ValueError):
    """Field does not decay at the grid boundary; spectral derivatives would wrap."""


class StencilError(ValueError):
    """Grid too small for the finite-difference stencil."""


class CRTFFormatError(OSError):
    """Malformed or unsupported CRTF file."""
