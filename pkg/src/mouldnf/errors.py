"""Exception hierarchy shared by every module of the package."""


class MouldError(Exception):
    """Base class for all errors raised by mouldnf."""


class RankDeficient(MouldError):
    pass


class RangeExceeded(MouldError):
    """A word sum left the range in which the surrogate frequencies are faithful."""


class AlphabetMismatch(MouldError):
    pass


class NotInvertible(MouldError):
    pass


class BadConstantTerm(MouldError):
    pass


class NotAlternal(MouldError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class GaugeNotAdmissible(MouldError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class UnknownLetter(MouldError):
    pass


class OrderViolation(MouldError):
    pass


class NotResonant(MouldError):
    pass


class UnsupportedBackend(MouldError):
    pass


class NonDiagonalLinearPart(MouldError):
    pass


class NonDiagonalX0(MouldError):
    pass


class RealnessViolation(MouldError):
    pass


class EigenIdentityFailure(MouldError):
    """[X0, B_n] differs from lambda(n) B_n for some component."""


class TooLong(MouldError):
    pass


class ResonantAmbiguity(MouldError):
    pass


class DegenerateSpectrum(MouldError):
    pass


class SchemaError(MouldError):
    pass
