"""Exception types raised across the package."""


class PointerLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PointerLabError, ValueError):
    pass


class DegenerateInput(PointerLabError, ValueError):
    """Basis vectors are linearly dependent beyond the rank tolerance."""


class NotHermitian(PointerLabError, ValueError):
    pass


class NotIdempotent(PointerLabError, ValueError):
    """An operator used as a projector fails ``A @ A == A``."""


class OrthogonalPostSelection(PointerLabError, ValueError):
    """Pre- and post-selected states are (numerically) orthogonal."""

    def __init__(self, overlap_magnitude, tolerance):
        self.overlap_magnitude = float(overlap_magnitude)
        self.tolerance = float(tolerance)
        super().__init__(
            f"|<psi_f|psi_i>| = {self.overlap_magnitude:.3e} "
            f"<= overlap tolerance {self.tolerance:.1e}"
        )


class GridContainment(PointerLabError, ValueError):
    """A pointer wavefunction reaches the edge of the periodic grid."""


class PostSelectionFailure(PointerLabError, ValueError):
    """Post-selection success probability underflows."""


class UndefinedSensitivity(PointerLabError, ValueError):
    """The error-propagation denominator vanishes."""


class InvalidRegime(PointerLabError, ValueError):
    """First-order corrected variance is negative; coupling too strong."""


class ConfigError(PointerLabError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class WeakRegimeWarning(UserWarning):
    """Coupling is probably too strong for first-order formulas."""
