"""Exceptions raised by qmapkit.

Every error is a ``ValueError`` so that callers which only care about bad input can catch that.
"""


class QmapkitError(ValueError):
    pass


class ZeroForm(QmapkitError):
    pass


class NotDivisible(QmapkitError):
    pass


class AllZero(QmapkitError):
    pass


class SingularMatrix(QmapkitError):
    pass


class NonExpandable(QmapkitError):
    pass


class PoleAtPoint(QmapkitError):
    pass


class MalformedDatum(QmapkitError):
    pass


class TooLarge(QmapkitError):
    pass


class NotPrestable(QmapkitError):
    pass


class NotEffective(QmapkitError):
    pass


class UnboundedEnumeration(QmapkitError):
    pass


class NotClosed(QmapkitError):
    pass


class PoleSurvived(QmapkitError):
    pass
