"""Exception hierarchy shared by every module in the package."""


class HeunQuantError(Exception):
    """Base class for all package errors."""


class ZeroDenominator(HeunQuantError, ZeroDivisionError):
    """A recurrence denominator (n+1)(n+nu) vanished."""


class DegenerateOmega(HeunQuantError):
    """omega was requested but epsilon is zero, so only eps*omega is defined."""


class NonPositiveTension(HeunQuantError, ValueError):
    pass


class DegreeZero(HeunQuantError):
    """The characteristic polynomial is constant: no quantized accessory value."""


class NoSignChange(HeunQuantError):
    pass


class NoAdmissibleRoot(HeunQuantError):
    pass


class ResidualTooLarge(HeunQuantError):
    pass


class StepFailure(HeunQuantError):
    pass


class SameClassification(HeunQuantError):
    pass


class RankDeficient(HeunQuantError):
    pass


class TooFewPoints(HeunQuantError, ValueError):
    pass


class ZeroMu(HeunQuantError, ValueError):
    pass


class SummationUnreliable(HeunQuantError):
    pass


class NonConvergent(HeunQuantError):
    pass
