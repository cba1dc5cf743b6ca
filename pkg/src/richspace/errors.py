"""Typed errors shared across the package.

Every failure mode a caller is expected to branch on gets its own class so
the CLI can map exception types onto exit codes without string matching.
"""


class RichSpaceError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(RichSpaceError):
    """Operands do not share the shape the operation requires."""


class InvalidIndex(RichSpaceError):
    """Interpolation index outside the permitted range."""


class ZeroRow(RichSpaceError):
    """A row with (numerically) zero norm where a cosine is required."""

    def __init__(self, row: int, message: str | None = None):
        self.row = row
        super().__init__(message or f"row {row} has numerically zero norm")


class DegenerateDirection(RichSpaceError):
    """The two segment endpoints coincide; no projection direction exists.

    ``stage`` is set by the two-stage mixer to report which stage failed.
    """

    def __init__(self, message: str = "segment endpoints coincide", stage: int | None = None):
        self.stage = stage
        super().__init__(message if stage is None else f"stage {stage}: {message}")


class SingularRowSum(RichSpaceError):
    """An attention row sum is too close to zero to normalize."""

    def __init__(self, row: int, message: str | None = None):
        self.row = row
        super().__init__(message or f"attention row {row} sums to ~0; cannot normalize")


class ShapeError(RichSpaceError):
    """A derived shape (e.g. a convolution output) is empty or inconsistent."""


class NonIntegerMap(RichSpaceError):
    """A map required to be integer-valued has non-integer entries."""


class DimensionMismatch(RichSpaceError):
    """Output dimension does not match what the bound requires."""


class NotBiLipschitz(RichSpaceError):
    """The tabulated map violates the claimed two-sided Lipschitz bounds."""


class MissingContinuousMap(RichSpaceError):
    """A midpoint witness needs an evaluable map, but only a table was given."""


class BadMagic(RichSpaceError):
    """File does not start with a v1.0 NPY magic/version header."""


class UnsupportedDtype(RichSpaceError):
    """NPY descriptor is not little-endian float32."""


class UnsupportedOrder(RichSpaceError):
    """NPY payload is not C-ordered."""


class DimError(RichSpaceError):
    """Tensor rank is not one of the supported ranks (2-D or 4-D)."""


class IoError(RichSpaceError):
    """Underlying read/write failed or produced a malformed payload."""


class ManifestError(RichSpaceError):
    """Manifest JSON is missing fields or violates its invariants."""
