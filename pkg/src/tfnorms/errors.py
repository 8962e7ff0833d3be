"""Error taxonomy shared across the package.

Every failure mode that a study config can trigger maps onto one of these
classes, and the CLI maps the classes onto process exit codes (see cli.py).
Library code raises; it never calls sys.exit.
"""


class TfnormsError(Exception):
    """Base class for all package errors."""


class ValidationError(TfnormsError):
    """Malformed input: bad shapes, unknown names, unparsable config."""


class SingularityError(ValidationError):
    """A matrix that must be invertible is singular or near-singular."""


class InvalidArgumentError(ValidationError):
    """Arguments are individually fine but mutually inconsistent."""


class RangeError(TfnormsError):
    """A value left the representable or addressable range (overflow, bad cell)."""


class ResolutionError(TfnormsError):
    """Grid too coarse for the requested computation."""


class TruncationError(TfnormsError):
    """Domain truncation demonstrably pollutes the result."""


class AliasingError(TfnormsError):
    """Sampling too coarse for the frequency content of the data."""


class PreconditionError(TfnormsError):
    """A mathematical hypothesis of the computation is violated."""


class DefinitenessError(TfnormsError):
    """An operator expected to be positive definite is not (to tolerance)."""
