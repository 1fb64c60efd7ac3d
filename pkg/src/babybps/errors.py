"""Exception types shared across the package."""


class BabyBpsError(Exception):
    """Base class for package errors."""


class InputError(BabyBpsError, ValueError):
    """Invalid configuration or input data (CLI exit code 1)."""


class SpacingError(InputError):
    """Field file nodes do not form a uniform row-major grid."""


class PotentialDomainError(BabyBpsError, ValueError):
    """A potential evaluated negative where sqrt(V) is required."""

    def __init__(self, message, node_index=None, uv=None):
        super().__init__(message)
        self.node_index = node_index
        self.uv = uv


class NonHarmonicError(InputError):
    """Candidate H2 violates the Laplace constraint."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BlowUpError(BabyBpsError, RuntimeError):
    """Radial profile crossed the blow-up guard before r_max."""

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class ToleranceFailure(BabyBpsError):
    """A configured verification tolerance was violated (CLI exit code 2)."""

    def __init__(self, failures):
        super().__init__("; ".join(failures))
        self.failures = list(failures)
