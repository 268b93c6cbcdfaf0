"""
Exceptions raised across the verification system.

Every error derives from HorseshoeError and from ValueError, so callers that
only know about the builtin still catch them.
"""


class HorseshoeError(Exception):
    """Base class for all errors raised by NACS."""


class ConfigError(HorseshoeError, ValueError):
    """A run configuration or command line value is unusable."""


class GeometryError(HorseshoeError, ValueError):
    """Degenerate geometry, orientation mismatch or a point off its curve."""


class ConvergenceError(HorseshoeError, ValueError):
    """A fixed point iteration did not settle within its budget."""


class NestingError(HorseshoeError, ValueError):
    """A strip was found not to contain the strip that should nest in it."""


class HypothesisError(HorseshoeError, ValueError):
    """Constants fall outside the interval a contraction bound needs."""


class RefinementError(HorseshoeError, ValueError):
    """Refinement along an itinerary produced an empty or escaping strip."""


class EmptyInputError(HorseshoeError, ValueError):
    """An operation that needs points was handed none."""


class WordError(HorseshoeError, ValueError):
    """A symbol word is malformed, too short or not admissible."""
