"""Exception hierarchy shared by all modules."""


class HahnError(Exception):
    """Base class for every error raised by :mod:`hahnval`."""


class ShapeMismatch(HahnError, TypeError):
    pass


class UnsupportedShape(HahnError, ValueError):
    pass


class PreconditionError(HahnError, ValueError):
    pass


class PrecisionError(HahnError, ArithmeticError):
    """Raised when a truncated computation cannot reach the requested precision."""


class IndeterminateError(PrecisionError):
    """A valuation, sign or residue is not determined at the available precision."""


class NotInValuationRing(HahnError, ValueError):
    pass


class SearchExhausted(HahnError, RuntimeError):
    """A budgeted witness search ended without a result (never read as a proof of absence)."""


class CertificateRejected(HahnError, ValueError):
    def __init__(self, reason, detail=None):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


class LiteralSyntaxError(HahnError, ValueError):
    def __init__(self, message, text, pos):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.text = text
        self.pos = pos
        self.line = line
        self.column = col
