"""Error types shared across the package.

Domain errors (bad mathematical input) raise plain ValueError; the classes
here cover the two non-domain failure modes: blowing a configured budget,
and a numerical procedure failing to converge.
"""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured memory/time budget."""


class NumericError(RuntimeError):
    """An iterative numerical procedure failed to reach its tolerance."""
