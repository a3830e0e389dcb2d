"""Exception hierarchy.

Input problems (bad files, mismatched shapes, out-of-domain parameters) derive
from :class:`InputError`; failures of the numerics themselves derive from
:class:`NumericalError`. The CLI maps the two families to distinct exit codes.
"""


class CfidError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CfidError, ValueError):
    pass


class NumericalError(CfidError, ArithmeticError):
    pass


class NotPSDError(NumericalError):
    """A matrix that must be positive semidefinite has a clearly negative eigenvalue."""

    def __init__(self, eigenvalue, threshold, dim):
        self.eigenvalue = float(eigenvalue)
        self.threshold = float(threshold)
        self.dim = dim
        super().__init__(
            f"matrix of dimension {dim} is not PSD: eigenvalue {self.eigenvalue:.6g} "
            f"is below the tolerance -{self.threshold:.3g}"
        )


class InsufficientDataError(InputError):
    pass


class PairingError(InputError):
    pass


class DataError(InputError):
    pass


class DomainError(InputError):
    pass


class RestrictionError(InputError):
    """The two joints do not share the same input marginal."""


class FormatError(InputError):
    pass
