"""Exception hierarchy.

Configuration-type problems derive from :class:`ConfigurationError` and
numerical-budget problems from :class:`NumericalBudgetError`; the CLI maps
them to exit codes 2 and 3 respectively.
"""


class SeqweakError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SeqweakError, ValueError):
    """An input, plan or configuration is invalid."""


class InvalidSequenceError(ConfigurationError):
    pass


class GridSupportError(ConfigurationError):
    """The pointer grid is too small or cannot represent a shift."""


class NumericalBudgetError(SeqweakError, ArithmeticError):
    """A numerical error budget was violated during a run."""


class LeakageBudgetError(NumericalBudgetError):
    pass


class VanishingPostselectionError(NumericalBudgetError):
    pass
