"""Exception hierarchy shared by every module of the package."""


class AnisoscError(Exception):
    """Base class for all errors raised by anisosc."""


class DimensionMismatch(AnisoscError, ValueError):
    pass


class NonFiniteValue(AnisoscError, ValueError):
    pass


class ConjugacyViolation(AnisoscError, ValueError):
    pass


class OriginSingularity(AnisoscError, ValueError):
    """A complex power or angle was requested at (or too close to) zero."""


class BranchAmbiguity(AnisoscError, ValueError):
    """The branch policy cannot decide which sheet a logarithm lives on."""


class IsotropicPole(AnisoscError, ValueError):
    """F1/F4 exponents 1/(1 - w) blow up at w = 1."""


class ImaginaryResidualExceeded(AnisoscError, ArithmeticError):
    pass


class EvaluationError(AnisoscError):
    """A phase-space function failed inside a Poisson-bracket evaluation."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class InvalidStep(AnisoscError, ValueError):
    pass


class SamplingTooCoarse(AnisoscError, ValueError):
    pass


class ConfigError(AnisoscError, ValueError):
    pass
