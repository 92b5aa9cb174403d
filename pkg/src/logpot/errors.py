"""Exception hierarchy shared by every module.

Each class carries a stable ``code`` used by the CLI for machine-parsable
stderr lines and exit statuses.
"""


class LogPotError(Exception):
    code = "E_GENERIC"
    exit_status = 2


class ValidationError(LogPotError):
    """Bad user input; maps to CLI exit status 2."""

    code = "E_VALIDATION"
    exit_status = 2


class SolverError(LogPotError):
    """A numerical procedure failed; maps to CLI exit status 3."""

    code = "E_SOLVER"
    exit_status = 3


class EmptySet(ValidationError):
    code = "E_EMPTY_SET"


class MalformedInterval(ValidationError):
    code = "E_MALFORMED_INTERVAL"


class BadScale(ValidationError):
    code = "E_BAD_SCALE"


class BadRatio(ValidationError):
    code = "E_BAD_RATIO"


class BadDensity(ValidationError):
    code = "E_BAD_DENSITY"


class NotNested(ValidationError):
    code = "E_NOT_NESTED"


class NotApplicable(ValidationError):
    code = "E_NOT_APPLICABLE"


class BadSupport(ValidationError):
    code = "E_BAD_SUPPORT"


class BadLaw(ValidationError):
    code = "E_BAD_LAW"


class Unsupported(ValidationError):
    code = "E_UNSUPPORTED"


class RankDeficient(ValidationError):
    code = "E_RANK_DEFICIENT"


class SolveFailed(SolverError):
    code = "E_SOLVE_FAILED"

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual={residual:.3e})")
        self.residual = residual


class ExchangeStall(SolverError):
    code = "E_EXCHANGE_STALL"

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InconsistentSetClaim(SolverError):
    code = "E_INCONSISTENT_SET"


class NumericalFailure(SolverError):
    code = "E_NUMERICAL"
