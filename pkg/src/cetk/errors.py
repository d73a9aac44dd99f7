"""Exception hierarchy.

Every domain failure raises a subclass of :class:`CETError`; the CLI reports
the class name verbatim, so names are part of the public interface.
"""

from __future__ import annotations


class CETError(Exception):
    """Base class for all domain errors raised by the toolkit."""

    @property
    def name(self) -> str:
        return type(self).__name__


class InvalidFrame(CETError, ValueError):
    pass


class FrameTooLarge(CETError, ValueError):
    pass


class FrameMismatch(CETError, ValueError):
    pass


class EmptyFocal(CETError, ValueError):
    pass


class NonProductFocal(CETError, ValueError):
    """A focal set on a product frame is not a Cartesian rectangle."""


class InvalidCBBA(CETError, ValueError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InvalidDocument(CETError, ValueError):
    """Malformed JSON/CSV input (unknown label, duplicate set, bad shape)."""


class ZeroPhaseUndefined(CETError, ValueError):
    pass


class DegenerateMass(CETError, ValueError):
    pass


class InvalidSpeed(CETError, ValueError):
    pass


class TotalConflict(CETError, ArithmeticError):
    pass


class InvalidDistribution(CETError, ValueError):
    pass


class UnknownModel(CETError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class MissingLabel(CETError, ValueError):
    pass


class NonNumericFeature(CETError, ValueError):
    pass


class EmptyDataset(CETError, ValueError):
    pass


class DegenerateStats(CETError, ValueError):
    pass
