"""
Exception hierarchy shared by the library and the CLI
"""

from typing import Optional


class TrivergenceError(Exception):
    """Base class for every error raised by the toolkit"""


class DistributionError(TrivergenceError):
    """A count distribution could not be built"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidCountError(DistributionError):
    pass


class EmptyDistributionError(DistributionError):
    pass


class ParseError(DistributionError):
    pass


class EncodingError(DistributionError):
    pass


class NotInSupportError(TrivergenceError):
    def __init__(self, item: str, label: str = ""):
        self.item = item
        self.label = label
        super().__init__(f"item {item!r} is not in the support of distribution {label!r}")


class DivisionByZeroError(TrivergenceError):
    pass


class InvalidContextError(TrivergenceError):
    pass


class NotEvaluableError(TrivergenceError):
    pass


class SerializationError(TrivergenceError):
    pass


class ConsistencyError(TrivergenceError):
    """A computed result broke an invariant it must hold, such as JS matrix symmetry"""
