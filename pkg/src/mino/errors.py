"""Exception taxonomy for the symbolic calculus."""


class MinoError(Exception):
    pass


class PremouseError(MinoError):
    """Structurally invalid premouse data."""


class SegmentError(MinoError):
    """Segment cut point out of range."""


class DropdownError(MinoError):
    """Segment-degree pair not below the target pair."""


class UltrapowerError(MinoError):
    """A single ultrapower application is illegal.

    reason is one of: host-not-active, agreement, crit-vs-projectum,
    crit-vs-nu, illfounded.
    """

    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class SequenceError(MinoError):
    """An extender sequence fails goodness at some position.

    kind is "not-pre-good" (an application was illegal) or "illfounded"
    (the prefix was pre-good but not good; only the failure hook can
    produce this in the symbolic model).
    """

    def __init__(self, position, kind, reason=""):
        self.position = position
        self.kind = kind
        self.reason = reason
        super().__init__(f"position {position}: {kind}" + (f" ({reason})" if reason else ""))


class StarProductError(MinoError):
    pass


class TreeError(MinoError):
    pass


class EmbeddingError(MinoError):
    pass


class InflationError(MinoError):
    pass


class FactorError(MinoError):
    pass


class NormalizeError(MinoError):
    """A hard failure: a theorem-level identity did not hold."""


class CompareError(MinoError):
    pass


class BudgetError(MinoError):
    """A step budget was exhausted before the driver finished."""


class ParseError(MinoError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
