"""Exception types raised by maxcov."""

from typing import Optional


class MaxcovError(Exception):
    """Base class for every error raised by this package"""


class DomainError(MaxcovError, ValueError):
    """Invalid mathematical input (wrong grade, bad boost, degenerate surface...)"""


class ReconstructionError(MaxcovError):
    """The linear system behind a reconstruction turned out singular or inconsistent"""


class ScenarioError(MaxcovError):
    """A scenario document could not be parsed or validated.

    Attributes:
        location: Where the problem is, e.g. ``"line 4, column 12"`` or
            ``"fields.F.coefficients.10"``.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
