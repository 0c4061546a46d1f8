"""Exception hierarchy shared across the package."""


class LinvError(Exception):
    """Base class for all package errors."""


class PrecisionError(LinvError):
    """A value is indistinguishable from zero, or a requested digit count
    cannot be certified at the current working precision."""


class AmbiguousRankError(PrecisionError):
    """A pivot decision could not be certified: some candidate entry is zero
    to known precision but not provably zero."""

    def __init__(self, message, column=None, needed_precision=None):
        super().__init__(message)
        self.column = column
        self.needed_precision = needed_precision


class SingularRefinementError(LinvError):
    """The chosen subspace is not regular (regulator vanishes)."""


class OMinusSingularError(LinvError):
    """det O^- stayed zero through every allowed basis completion."""


class FixtureError(LinvError):
    """Schema or invariant violation in input data; `details` itemizes."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = list(details or [])
