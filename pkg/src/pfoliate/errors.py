"""Exception hierarchy shared by every module."""


class PfoliateError(Exception):
    """Base class for all engine errors."""


class RingMismatchError(PfoliateError):
    pass


class UnknownVariableError(PfoliateError):
    pass


class LaurentSlotError(PfoliateError):
    """A negative exponent appeared outside the designated Laurent variable."""


class NotDivisible(PfoliateError):
    pass


class DegreeCapExceeded(PfoliateError):
    """A result would exceed the configured total-degree cap."""


class PreconditionError(PfoliateError):
    pass


class SaturationUnsupported(PfoliateError):
    """A non-monomial common factor was detected; only monomial saturation is supported."""


class MaxStepsExhausted(PfoliateError):
    pass


class ParseError(PfoliateError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
