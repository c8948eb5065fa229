"""Exception hierarchy shared by all modules."""


class BoseBoundError(Exception):
    """Base class for every error raised by this package."""


class InvalidInterval(BoseBoundError, ValueError):
    pass


class NonConvergent(BoseBoundError, ArithmeticError):
    pass


class StepTooCoarse(NonConvergent):
    pass


class MeshTooCoarse(NonConvergent):
    pass


class QuadratureBudgetExceeded(NonConvergent):
    pass


class NoConvergence(NonConvergent):
    pass


class TruncationNotConverged(NonConvergent):
    pass


class SingularSystem(BoseBoundError, ArithmeticError):
    pass


class NotSymmetric(BoseBoundError, ValueError):
    pass


class HardCoreUnsupported(BoseBoundError, ValueError):
    """Raised when a profile is requested for a potential with a hard core.

    Hard-core profiles are reached through ``truncate`` and a limit in the
    truncation level instead.
    """


class RangeTooLarge(BoseBoundError, ValueError):
    pass


class InvalidCoefficients(BoseBoundError, ValueError):
    pass


class RegimeViolation(BoseBoundError, ValueError):
    pass


class NotFound(BoseBoundError, LookupError):
    pass


class ConfigError(BoseBoundError, ValueError):
    pass
