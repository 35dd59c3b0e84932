"""Exception hierarchy shared by all faultbasis modules."""


class FaultBasisError(Exception):
    """Base class for every error raised by this package."""


class EmptyTests(FaultBasisError):
    pass


class AllPassRow(FaultBasisError):
    """A record passed every golden test, so it is not a wrong code."""


class WidthMismatch(FaultBasisError):
    pass


class BothEmpty(FaultBasisError):
    """Jaccard similarity of two all-zero signatures is undefined."""


class TooLarge(FaultBasisError):
    """Exhaustive enumeration would exceed the configured cap."""


class NoCorrectCodes(FaultBasisError):
    pass


class UnknownCode(FaultBasisError):
    pass


class InfeasibleSpec(FaultBasisError):
    pass


class ParseError(FaultBasisError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateCodeId(ParseError):
    pass


class MixedWidth(ParseError):
    pass


class InvariantViolation(FaultBasisError):
    """An internal post-condition check failed."""
