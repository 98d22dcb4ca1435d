"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates an operation's precondition or a data invariant."""


class BudgetError(RuntimeError):
    """A requested computation exceeds the configured size budget."""
