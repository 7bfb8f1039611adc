"""Exception hierarchy shared by all modules."""


class WadgeError(Exception):
    """Base class for every error raised by the package."""


class DomainError(WadgeError, ValueError):
    pass


class OutOfRange(DomainError):
    pass


class NonRational(DomainError):
    pass


class DepthExceeded(WadgeError):
    """A certified answer needs more depth than the budget allows."""


class WrongOrder(WadgeError, TypeError):
    pass


class Unsupported(WadgeError):
    pass


class OutsideDomain(WadgeError):
    pass


class UnresolvableRange(WadgeError):
    pass


class WitnessInvalid(WadgeError):
    pass


class NotAlmostContained(WadgeError):
    pass


class NotI0(WadgeError):
    pass


class NotConditionI(WadgeError):
    pass


class EmptyTarget(WadgeError):
    pass


class BadAnchors(WadgeError):
    pass


class UnsupportedBaireMap(WadgeError):
    pass


class ParseError(WadgeError):
    """Malformed DSL or command text; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ArityError(ParseError):
    pass
