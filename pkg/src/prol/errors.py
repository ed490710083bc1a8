"""Exception types raised by the prol package.

Argument and domain validation errors raise plain ``ValueError``; the
classes below mark failures of the numerical machinery itself.
"""


class ProlError(Exception):
    """Base class for prol-specific failures."""


class TruncationError(ProlError):
    """Expansion size did not converge within the doubling budget."""


class EigensolverError(ProlError):
    """Eigenvector refinement could not be completed."""


class DegenerateExpansionError(ProlError):
    """Denominator of the first-eigenvalue formula is numerically zero."""


class DegenerateRatioError(ProlError):
    """Denominator of an eigenvalue ratio is numerically zero."""


class DegenerateFunctionError(ProlError):
    """A function probed by the oracle is numerically zero everywhere."""


class UnsupportedDimensionError(ProlError):
    """Full eigenfunction evaluation requested outside dimensions 2 and 3."""
