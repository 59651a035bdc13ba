"""Exception types shared across the package."""


class MmsError(Exception):
    """Base class for all package-specific errors."""


class InstanceFormatError(MmsError, ValueError):
    """Raised when instance/allocation JSON violates the schema.

    The message names the offending field path, e.g. ``agents[2].weights``.
    """


class BudgetExceeded(MmsError):
    """An exhaustive enumeration would visit more states than allowed."""

    def __init__(self, states: int, budget: int, what: str = "enumeration"):
        self.states = states
        self.budget = budget
        super().__init__(f"{what} needs {states} states, budget is {budget}")


class RetriesExhausted(MmsError):
    """A rejection sampler hit its retry cap without an accepted draw."""

    def __init__(self, retries: int, detail: str = ""):
        self.retries = retries
        msg = f"no accepted draw after {retries} retries"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NoDonorGood(MmsError):
    """Copy redistribution found an over-threshold good with no donor."""


class PreconditionViolated(MmsError):
    """An operation's documented precondition failed on entry."""


class RatioAssertionFailed(MmsError):
    """The min-max cost ratio oracle exceeded the guaranteed 11/9 bound."""


class SearchFailed(MmsError):
    """An exhaustive search guaranteed to succeed found no witness."""
