"""Exception types raised by the public API."""


class FacoError(Exception):
    """Base class for all library errors."""


class ParseError(FacoError):
    """Malformed TSPLIB input; message carries the offending line number."""


class UnsupportedFormatError(ParseError):
    """Well-formed input using a feature this solver does not support."""


class ParameterError(FacoError, ValueError):
    """A parameter value violates a documented precondition."""


class InvalidTourError(FacoError, ValueError):
    """A tour is not a permutation of the instance's nodes."""
