"""Exception hierarchy shared by all modules."""


class FFQLatError(Exception):
    """Base class for library errors."""


class FieldMismatch(FFQLatError, ValueError):
    pass


class NotDefinite(FFQLatError, ValueError):
    """The form is isotropic over K_inf = F_q((1/t))."""


class SingularForm(FFQLatError, ValueError):
    pass


class BudgetExceeded(FFQLatError, RuntimeError):
    """A finite enumeration would exceed the configured work budget."""

    def __init__(self, needed, budget, what="enumeration"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what} needs {needed} items, budget is {budget}")


class InsufficientPrecision(FFQLatError, ArithmeticError):
    pass


class InsufficientBound(FFQLatError, ValueError):
    pass


class PoleAtOtherPrime(FFQLatError, ValueError):
    pass


class CheckpointCorrupt(FFQLatError, RuntimeError):
    pass
