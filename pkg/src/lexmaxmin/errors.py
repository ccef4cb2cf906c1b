"""Exception hierarchy shared by the library and the CLI."""


class LexMaxMinError(Exception):
    """Base class for every error raised by this package."""


class MalformedInstance(LexMaxMinError, ValueError):
    """An instance, lottery or file violates a structural invariant.

    ``field`` and ``line`` locate the offending input when it came from a file.
    """

    def __init__(self, message, *, field=None, line=None):
        self.reason = message
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DimensionMismatch(LexMaxMinError, ValueError):
    pass


class DegenerateAgent(MalformedInstance):
    """Agent ``agent`` cannot gain anything over the disagreement lottery."""

    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"agent {agent} has no individually rational gain over the disagreement point")


class NotNormalized(LexMaxMinError, ValueError):
    pass


class AssumptionViolation(LexMaxMinError):
    """Some agent's favourite outcomes give other agents a positive gain."""


class BudgetExceeded(LexMaxMinError, RuntimeError):
    def __init__(self, what, limit):
        self.limit = limit
        super().__init__(f"{what} exceeds the budget of {limit}")
