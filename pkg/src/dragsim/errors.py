"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes: validation failures (bad
parameters, bad config) exit 2, numerical failures (divergence,
non-unitarity, NaN) exit 3, I/O failures exit 4.
"""


class DragsimError(Exception):
    """Base class for all package errors."""


class ValidationError(DragsimError):
    """Invalid parameters, configuration, or arguments."""


class NumericalError(DragsimError):
    """A numerical procedure failed or produced untrustworthy results."""


class ConvergenceError(NumericalError):
    """An iterative solver exceeded its iteration budget."""


class PropagationError(NumericalError):
    """Time evolution lost unitarity or produced non-finite values."""
