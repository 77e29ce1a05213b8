"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """A combinatorial search hit its operation budget before finishing.

    Carries whatever sound partial information was established.
    """

    def __init__(self, message: str, lower_bound: int | None = None):
        super().__init__(message)
        self.lower_bound = lower_bound


class UnsourcedEntryError(LookupError):
    """A catalog slot that requires externally sourced data is still empty."""


class VerificationFailedError(AssertionError):
    """A construction postcondition that theory guarantees did not hold."""
