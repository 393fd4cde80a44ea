"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input file, violated invariant, or out-of-range parameter."""


class BudgetExceededError(RuntimeError):
    """A weight-grid sweep would exceed the configured evaluation budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"weight grid needs {required} evaluations, exceeding the budget of {budget}; "
            f"raise the budget or lower the resolution"
        )
