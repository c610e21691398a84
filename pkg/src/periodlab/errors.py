"""Exception and warning types shared by all periodlab modules."""


class PeriodlabError(Exception):
    """Base class for all library errors."""


class PoleError(PeriodlabError, ZeroDivisionError):
    """An argument hit (or came numerically too close to) a pole."""


class DomainError(PeriodlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class BranchError(DomainError):
    """An argument lies on (or within tolerance of) a branch cut."""


class TruncationError(PeriodlabError, ValueError):
    """A truncated series would be evaluated outside its reliable range."""


class TailDivergence(PeriodlabError, ValueError):
    """An infinite sum cannot be closed with the requested tail order."""


class ContinuationError(PeriodlabError, ArithmeticError):
    """Analytic continuation did not reach the requested tolerance."""


class NoConvergence(PeriodlabError, ArithmeticError):
    """An iterative procedure stopped without meeting its tolerance."""


class ConvergenceError(NoConvergence):
    """The dense eigensolver failed."""


class PoleGuard(PoleError):
    """A zeta argument in transfer-matrix assembly is too close to 1."""


class CoefficientError(PeriodlabError, ValueError):
    """A coefficient set violates its invariants."""


class TruncationWarning(UserWarning):
    """A reported tail estimate exceeds the requested tolerance."""


class UnderflowToZero(UserWarning):
    """A value underflowed and was returned as zero."""


class PoleGuardWarning(UserWarning):
    """The spectral parameter was perturbed away from a zeta pole."""


class CoefficientFileError(PeriodlabError, ValueError):
    """A coefficient file is malformed or violates the schema."""
