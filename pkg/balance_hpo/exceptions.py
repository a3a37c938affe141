"""Exception hierarchy shared by every balance_hpo module."""

from typing import Optional


class HpoError(Exception):
    """Base class for all toolkit errors."""


class InvalidConfig(HpoError, ValueError):
    """A hyperparameter configuration is not strictly positive and finite."""


class SingularMatrix(HpoError, ValueError):
    """A reparameterization matrix cannot be inverted."""


class UnknownPreset(HpoError, ValueError):
    """A preset name (matrix, landscape) is not registered."""


class DegenerateBatch(HpoError, ValueError):
    """A batch has no positive pair or no negative pair."""


class NoRelevantItems(HpoError, ValueError):
    """A ranked list (or every list of a query set) has no relevant item."""


class OutOfDomain(HpoError, ValueError):
    """A configuration lies outside the domain of an objective."""


class FormatError(HpoError, ValueError):
    """A file could not be parsed."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class InvalidStart(HpoError, ValueError):
    """A search starts outside its search space."""


class InvalidDirection(HpoError, ValueError):
    """A line-search direction has no component on an active dimension."""


class InsufficientBudget(HpoError, ValueError):
    """A curve is shorter than the requested checkpoint."""


class EmptyHistory(HpoError, ValueError):
    """A trial history holds no budgeted trial."""


class ObjectiveError(HpoError):
    """An objective evaluation failed."""


class CommandFailed(ObjectiveError):
    """An external objective command exited with a nonzero status."""

    def __init__(self, returncode: int, stderr: str = ""):
        self.returncode = returncode
        self.stderr = stderr
        tail = stderr.strip().splitlines()[-1] if stderr.strip() else ""
        super().__init__(f"command exited with status {returncode}" + (f": {tail}" if tail else ""))


class ParseFailed(ObjectiveError):
    """An external objective command printed no parseable score."""


class TimedOut(ObjectiveError):
    """An external objective command exceeded its timeout."""


class ComparisonFailed(HpoError):
    """A method of a comparison could not complete its trajectories."""

    def __init__(self, method: str, cause: Exception):
        self.method = method
        self.cause = cause
        super().__init__(f"method '{method}' failed: {cause}")
