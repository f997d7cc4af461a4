"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class DegenerateSupportError(RuntimeError):
    """A Gram matrix is singular to working precision (numerically coincident atoms)."""


class NumericalError(RuntimeError):
    """A numeric invariant was violated beyond its tolerance."""


class EmptyResidualError(RuntimeError):
    """Atom selection was invoked with an all-zero weight vector."""


class NotApplicableError(RuntimeError):
    """The requested report is undefined for this trace (e.g. nonzero residual)."""
