"""Exception hierarchy shared by every module."""


class VesselTopoError(Exception):
    """Base class for all errors raised by vesseltopo."""


class ParseError(VesselTopoError):
    """Malformed PNM magic or header."""


class TruncatedError(ParseError):
    """PNM payload shorter than the header declares."""


class ShapeError(VesselTopoError, ValueError):
    """Array dimensions do not match what an operation requires."""


class BoundsError(VesselTopoError, IndexError):
    """A coordinate lies outside the image."""


class ContractError(VesselTopoError, ValueError):
    """A precondition on an argument's content was violated."""


class DomainError(VesselTopoError, ValueError):
    """A scalar argument lies outside its mathematical domain."""


class EmptyInputError(VesselTopoError, ValueError):
    """An operation received an empty mask or an empty collection."""


class PairingError(VesselTopoError):
    """Prediction and ground-truth directories do not pair up by filename."""

    def __init__(self, unmatched_pred, unmatched_gt):
        self.unmatched_pred = sorted(unmatched_pred)
        self.unmatched_gt = sorted(unmatched_gt)
        parts = []
        if self.unmatched_pred:
            parts.append("only in pred: " + ", ".join(self.unmatched_pred))
        if self.unmatched_gt:
            parts.append("only in gt: " + ", ".join(self.unmatched_gt))
        super().__init__("; ".join(parts))
