"""Exception types raised across the package."""


class PowmonError(ValueError):
    """Base class for all package errors."""


class EmptySet(PowmonError):
    pass


class MissingZero(PowmonError):
    pass


class NegativeElement(PowmonError):
    pass


class CapacityExceeded(PowmonError):
    """An element magnitude or iteration count went past the configured cap."""


class ParseError(PowmonError):
    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"{reason} at position {position} in {text!r}")


class NotSandwiched(PowmonError):
    pass


class TrivialSet(PowmonError):
    pass


class NotMaxPreserving(PowmonError):
    pass


class InconsistentTable(PowmonError):
    pass


class NotCoprime(PowmonError):
    pass


class EmptyGenerators(PowmonError):
    pass


class NotProper(PowmonError):
    pass


class InvalidBound(PowmonError):
    pass


class SearchInconsistency(PowmonError):
    """Two independent routes through the search disagreed."""
