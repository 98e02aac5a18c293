"""Exception types shared across the package."""


class DimpError(Exception):
    """Base class for library-specific failures."""


class EdgeListParseError(DimpError):
    """Raised when an edge-list stream contains a malformed line."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class StaleBatchError(DimpError):
    """Raised when an update batch does not match the snapshot it is applied to."""


class CapacityError(DimpError):
    """Raised when an exact oracle is asked to enumerate beyond its edge budget."""
