"""Exception types shared by all favardlab modules.

The CLI maps these onto exit codes: precondition violations exit with 2,
enumeration-budget exhaustion with 3.
"""


class PreconditionError(ValueError):
    """An operation was called with arguments violating its contract."""


class InvalidAddressError(PreconditionError):
    """An address contains a digit outside the system's alphabet."""


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured disc-count budget."""
