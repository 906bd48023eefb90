"""
Exception hierarchy. Every subclass carries the CLI exit code it maps to.
"""


class CaPeriodsError(Exception):
    exit_code = 1


class UsageError(CaPeriodsError, ValueError):
    exit_code = 1


class InfeasibleParameters(CaPeriodsError, ValueError):
    """No object with the requested parameters exists (e.g. no prime selection fits)."""
    exit_code = 2


class BudgetExceeded(CaPeriodsError):
    """The requested computation needs more node visits than the configured budget."""
    exit_code = 3

    def __init__(self, needed: int, budget: int, what: str = "computation"):
        super().__init__(f"{what} needs {needed} node visits, budget is {budget}")
        self.needed = needed
        self.budget = budget


class VerificationFailure(CaPeriodsError):
    exit_code = 4
