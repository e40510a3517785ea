"""Exception hierarchy shared by the library and the CLI.

Each class carries the CLI exit code it maps to.
"""

from __future__ import annotations


class QmajError(Exception):
    exit_code = 1


class MalformedInputError(QmajError, ValueError):
    """Input that is not a valid permutation, partition or payload."""

    exit_code = 2


class GuardExceededError(QmajError):
    """Requested enumeration size is above the configured guard."""

    exit_code = 3


class CoefficientOverflowError(QmajError, OverflowError):
    """A polynomial coefficient left the signed 64-bit range."""

    exit_code = 3


class NotStandardError(QmajError, ValueError):
    """A labeled partition violates standardness at an adjacent pair.

    ``position`` is the 1-indexed left member ``i`` of the violating pair
    ``(i, i+1)``.
    """

    exit_code = 4

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class PreconditionError(QmajError, ValueError):
    """Structural precondition failure other than standardness
    (sigma not a derangement, gamma not weakly decreasing, ...)."""

    exit_code = 4
