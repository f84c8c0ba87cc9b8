"""Exception types shared across the package."""


class RingSFError(Exception):
    """Base class for all package-specific errors."""


class BasisMismatchError(RingSFError, ValueError):
    """Operator/state combined with an object built on a different basis."""


class NotInSectorError(RingSFError, ValueError):
    """Configuration does not belong to the requested symmetry sector."""


class DimensionOverflowError(RingSFError, ValueError):
    """Requested Hilbert (or Liouville) space exceeds the configured cap."""


class NormalizationError(RingSFError, ValueError):
    """State failed a norm/trace sanity check."""


class NonHermitianError(RingSFError, ValueError):
    """A matrix that must be Hermitian is not."""


class PropagationError(RingSFError, RuntimeError):
    """Time propagation violated an internal accuracy contract."""
