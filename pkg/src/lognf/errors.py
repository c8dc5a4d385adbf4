"""Exception hierarchy shared by the machine, the group language and the CLI."""


class LognfError(Exception):
    """Base class for every error raised by this package."""


class UnknownToken(LognfError):
    """A word contains a letter outside the transducer's input alphabet."""


class UnknownGenerator(LognfError):
    """A word's text names a generator the alphabet does not have."""


class MalformedExponent(LognfError):
    pass


class StepBudgetExceeded(LognfError):
    """An execution ran past its transition guard (or its wall-clock deadline)."""


class GroupSyntaxError(LognfError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ArityError(LognfError):
    pass


class MissingOracle(LognfError):
    """A free product was requested whose product word problem has no registered oracle."""


class FamilyMismatch(LognfError):
    pass


class NotInSubgroup(LognfError):
    pass


class CosetTableError(LognfError):
    pass


class NonZeroTExp(LognfError):
    pass


class NonPositiveBeta(LognfError):
    pass


class DivisibilityViolation(LognfError):
    pass


class BadIndex(LognfError):
    pass


class EntryBoundViolation(LognfError):
    """A peeled unitriangular matrix broke the entry bound |a| <= n**d."""
