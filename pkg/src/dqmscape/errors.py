"""Exception types shared across the package.

The CLI maps each of these onto a distinct exit code.
"""


class DqmscapeError(Exception):
    """Base class for all package errors."""


class FormatError(DqmscapeError, ValueError):
    """Malformed DQM or QUBO document.

    ``lineno`` is the 1-based line of the offending input, when known.
    """

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EnumerationLimitError(DqmscapeError, ValueError):
    """Raised when exhaustive enumeration would exceed the variable cap."""

    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(
            f"{n} binary variables exceeds the enumeration cap of {cap} "
            f"(raise it with max_vars / --max-vars)"
        )


class DegenerateInstanceError(DqmscapeError, ValueError):
    """The instance has no meaningful value for the requested quantity."""
