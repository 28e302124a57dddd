"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary invalid arguments; the classes
here mark conditions callers may want to handle separately.
"""


class ResourceLimitError(RuntimeError):
    """Problem size exceeds a configured qubit limit."""


class RetryExhaustedError(RuntimeError):
    """Rejection sampling gave up (e.g. regular-graph pairing model)."""


class DegenerateSpectrumError(ValueError):
    """Spectrum has f_min == f_max, so the approximation ratio is undefined."""
