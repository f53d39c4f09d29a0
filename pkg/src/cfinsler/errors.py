"""Exception hierarchy shared by the library and the command line."""


class CFinslerError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class DomainError(CFinslerError):
    """A point lies outside the admissible domain of a metric."""

    exit_code = 2


class BranchError(DomainError):
    """sqrt/log/pow met a constant term that is not real-positive."""


class DegenerateMetricError(DomainError):
    """The fundamental tensor is singular (or not positive definite)."""


class DSLError(CFinslerError):
    """Base class for metric-expression errors; carries a source location."""

    exit_code = 3
    kind = "error"

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{self.kind}{where}: {message}")


class LexError(DSLError):
    kind = "lex error"


class ParseError(DSLError):
    kind = "parse error"


class UnknownIdentifierError(DSLError):
    kind = "unknown identifier"


class ArityError(DSLError):
    kind = "arity error"


class OrderBudgetError(CFinslerError):
    """A derivative was requested beyond the truncation order of a jet."""

    exit_code = 4
