"""Exception types and the shared violation record."""

from __future__ import annotations

from dataclasses import dataclass


class EtopoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EtopoError):
    """Invalid configuration or input file; message names the offending field."""


class NotFoundError(EtopoError):
    """A referenced node, link, or state does not exist."""


class InvalidLevelError(EtopoError):
    """Entanglement level outside the valid range (level >= 1)."""


class DimensionMismatchError(EtopoError):
    """Lattice coordinates of unequal dimension."""


class LatticeCapacityError(EtopoError):
    """The lattice has fewer cells than there are nodes to place."""


class PlacementError(EtopoError):
    """Explicit placement is not injective or out of lattice range."""


class NoContactsError(EtopoError):
    """Normalization requested for a node without entangled contacts."""


class NotConnectedError(EtopoError):
    """No entangled link exists between the queried node pair."""


class TooLargeError(EtopoError):
    """Instance exceeds the exact solver's size cap."""


@dataclass(frozen=True)
class Violation:
    """A single invariant violation, reported as data rather than raised.

    code identifies the broken rule, subject the offending element, and
    message a human-readable account with both sides of the comparison
    where applicable.
    """

    code: str
    subject: object
    message: str
