"""Exception hierarchy shared by all trmod modules."""


class TrmodError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TrmodError):
    """Input fails a structural precondition (bad ring spec, non-UT matrix, ...)."""


class ParseError(TrmodError):
    """Malformed polynomial expression or input file."""


class BudgetExceededError(TrmodError):
    """A certified search would exceed the configured budget.

    This is a tri-state outcome, never silently downgraded to a yes/no
    answer: callers either re-run with a larger budget or report
    "inconclusive".
    """

    def __init__(self, message, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget
