"""Exception and warning types shared across the package."""


class NbgeomError(Exception):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class SurfaceUnsafeError(NbgeomError):
    """Surface extraction needs strictly positive probabilities and the
    model contains a zero or one entry."""


class NotBinaryError(NbgeomError):
    """Operation requires every observation to be binary."""


class HasParentsError(NbgeomError):
    """Operation requires a model without observation-observation edges."""


class AllZeroEvidenceError(NbgeomError):
    """The requested assignment has probability zero under every class."""


class ExactCensusTooLargeError(NbgeomError):
    """Exact census requested beyond the enumerable dimension cap."""


class NotSeparableError(NbgeomError):
    """Synthesis requested for a dichotomy that is not linearly separable."""


class PriorOverflowWarning(UserWarning):
    """Synthesis had to clamp a log-odds parameter to stay representable."""
