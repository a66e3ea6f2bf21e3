"""Exception hierarchy shared by every nestkit module."""


class NestkitError(Exception):
    """Base class for all toolkit errors."""


class PointOutsideUnion(NestkitError, ValueError):
    pass


class UnionMismatch(NestkitError, ValueError):
    pass


class NoChain(NestkitError):
    pass


class CoverTooSmall(NestkitError, ValueError):
    pass


class PreconditionViolated(NestkitError, ValueError):
    pass


class IncompatibleOrderTypes(NestkitError, ValueError):
    pass


class GridMismatch(NestkitError, ValueError):
    pass


class RankOutOfRange(NestkitError, ValueError):
    pass


class OverlappingIntervals(NestkitError, ValueError):
    pass


class ShapeMismatch(NestkitError, ValueError):
    pass


class BadChain(NestkitError, ValueError):
    pass


class NodeOutOfRange(NestkitError, IndexError):
    pass


class UnknownKind(NestkitError, ValueError):
    pass


class NotAPartition(NestkitError, ValueError):
    pass
