"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, identifiers or shapes."""


class NumericInputError(ValueError):
    """A non-finite value was supplied where a finite one is required."""


class NumericFailureError(ArithmeticError):
    """An update produced a non-finite coordinate."""

    def __init__(self, agent, dim, value):
        super().__init__(f"non-finite position {value!r} for agent {agent}, dimension {dim}")
        self.agent = agent
        self.dim = dim
        self.value = value


class BudgetExhaustedError(RuntimeError):
    """The evaluation budget ran out before a required stage finished."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
