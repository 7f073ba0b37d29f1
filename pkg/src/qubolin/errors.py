"""Exception types shared across the toolkit."""


class QubolinError(Exception):
    """Base class for toolkit-specific failures."""


class SingularMatrixError(QubolinError):
    """Matrix failed an invertibility tolerance."""


class CongruenceError(QubolinError):
    """Symmetric elimination could not complete within tolerance."""


class CongruenceResidualError(QubolinError):
    """Supplied (D, R) pair is not a congruence of the system's normal matrix."""


class ExhaustiveCapError(QubolinError):
    """Model exceeds the exhaustive enumeration size cap."""


class InstrumentationError(QubolinError):
    """Model was built with cost instrumentation disabled."""


class CapacityError(QubolinError):
    """Requested clique exceeds what the grid construction supports."""


class PackingError(QubolinError):
    """Disjoint clique packer could not place every requested clique."""
