# src/common/errors.py
"""
Exception hierarchy shared by every stage.

Library code raises these; only the command-line layer turns them into exit codes.
"""


class MoonflowerError(Exception):
    """Base class for all toolkit errors"""


class ValidationError(MoonflowerError, ValueError):
    """A parameter or input object violates its documented range"""


class ParseError(ValidationError):
    """A family, code or sparsifier file is malformed"""

    def __init__(self, message, line_no=None, path=None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}: "
        if line_no is not None:
            where += f"line {line_no}: "
        super().__init__(where + message)


class BudgetExceeded(MoonflowerError):
    """
    An exhaustive search hit its node, size or enumeration budget.

    `best` holds the best bound known when the search stopped and
    `witness` the object attaining it, if any.
    """

    def __init__(self, message, best=None, witness=None, used=None):
        self.best = best
        self.witness = witness
        self.used = used
        super().__init__(message)


class RetriesExhausted(MoonflowerError):
    """A randomized driver ran out of seeds; `best` is the best failed attempt"""

    def __init__(self, message, best=None, attempts=0):
        self.best = best
        self.attempts = attempts
        super().__init__(message)
