"""Exception hierarchy shared by every module."""


class GfpError(Exception):
    """Base class. The CLI maps these to exit code 2 (precondition violation)."""


class HypothesisViolated(GfpError, ValueError):
    """A stated precondition of a construction or identity does not hold."""


class WrongKind(GfpError, TypeError):
    pass


class DegenerateDiscriminant(GfpError, ValueError):
    pass


class ZeroPolynomial(GfpError, ValueError):
    pass


class DegenerateG(GfpError, ValueError):
    pass


class NoRootsFound(GfpError, ValueError):
    pass


class PositiveG(GfpError, ValueError):
    pass


class NoRealSupport(GfpError, ValueError):
    pass


class NonMonotoneD(GfpError, ValueError):
    pass


class GeneratorAxiomViolation(GfpError, ValueError):
    pass


class SupportViolation(GfpError, ValueError):
    pass


class TruncationTooSmall(GfpError, ValueError):
    pass
