"""Exact open intervals with rational endpoints and the order predicates on them.

Every endpoint is a :class:`fractions.Fraction`; nothing in this module ever
touches floating point, so all predicates are decided exactly.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PointOutsideUnion

Scalar = Fraction


def as_scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected because they silently carry binary rounding.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {value!r} as an exact scalar")


def format_scalar(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    """The open interval ``(lo, hi)``; construction requires ``lo < hi``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_scalar(self.lo), as_scalar(self.hi)
        if not lo < hi:
            raise ValueError(f"empty interval ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains_point(self, x) -> bool:
        return self.lo < x < self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersection(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __repr__(self):
        return f"({format_scalar(self.lo)}, {format_scalar(self.hi)})"


def interval(lo, hi) -> Interval:
    return Interval(as_scalar(lo), as_scalar(hi))


@dataclass(frozen=True)
class Family:
    """A finite set of open intervals, deduplicated and sorted by (lo, hi)."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(sorted(set(self.intervals))))

    @classmethod
    def of(cls, *pairs) -> "Family":
        return cls(tuple(p if isinstance(p, Interval) else interval(*p) for p in pairs))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __contains__(self, item):
        return item in self.intervals

    def union(self, other: "Family") -> "Family":
        return Family(self.intervals + other.intervals)

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.intervals)) + "}"


def dominates(E: Interval, P: Family) -> bool:
    """True iff ``E`` is a subset of some member of ``P``."""
    return any(F.lo <= E.lo and E.hi <= F.hi for F in P)


def approx_dominated(E: Interval, P: Family) -> bool:
    """True iff every shrinking ``(E.lo + d, E.hi - d)`` is dominated by ``P``.

    A member ``(u, v)`` dominates all the shrinkings exactly when
    ``u <= E.lo`` and ``E.hi <= v``, and a finite family cannot cover the
    shrinkings with different members for arbitrarily small ``d``.  The check
    is therefore made against the limiting inequalities member by member; for
    finite ``P`` this agrees with :func:`dominates`.
    """
    for F in P:
        # F dominates (E.lo + d, E.hi - d) for all small d > 0
        if F.lo <= E.lo and E.hi <= F.hi:
            return True
    return False


def refines(P1: Family, P2: Family) -> bool:
    """``P1 >= P2``: every member of ``P1`` is dominated by ``P2``."""
    return all(dominates(E, P2) for E in P1)


def reach(P: Family, x) -> tuple[Fraction, Fraction]:
    """Return ``(L(x), R(x))``, the extreme endpoints of members containing ``x``."""
    x = as_scalar(x)
    holders = [F for F in P if F.lo < x < F.hi]
    if not holders:
        raise PointOutsideUnion(f"{format_scalar(x)} lies in no member of the family")
    return min(F.lo for F in holders), max(F.hi for F in holders)


def components(P: Family | Iterable[Interval]) -> list[Interval]:
    """Connected components of the union, as maximal open intervals.

    Open intervals sharing only an endpoint stay separate.
    """
    out: list[list[Fraction]] = []
    for F in sorted(P):
        if out and F.lo < out[-1][1]:
            out[-1][1] = max(out[-1][1], F.hi)
        else:
            out.append([F.lo, F.hi])
    return [Interval(lo, hi) for lo, hi in out]


def union_is(P: Family | Iterable[Interval], base: Interval) -> bool:
    return components(P) == [base]


def is_linked_list(Es: Sequence[Interval]) -> bool:
    """Check ``a_i < b_{i-1} < a_{i+1} < b_i`` along the list."""
    for i in range(1, len(Es)):
        prev, cur = Es[i - 1], Es[i]
        if not (prev.lo < cur.lo < prev.hi < cur.hi):
            return False
        if i + 1 < len(Es) and not prev.hi < Es[i + 1].lo:
            return False
    return True


@dataclass(frozen=True)
class OrderMap:
    """Piecewise-linear increasing bijection of the line.

    Between breakpoints the map is affine; beyond the extreme breakpoints it
    continues with slope one.  An empty breakpoint list is the identity.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        pts = tuple((as_scalar(a), as_scalar(b)) for a, b in self.breakpoints)
        for (a0, b0), (a1, b1) in zip(pts, pts[1:]):
            if not (a0 < a1 and b0 < b1):
                raise ValueError("breakpoints must be strictly increasing in both coordinates")
        object.__setattr__(self, "breakpoints", pts)

    @classmethod
    def from_pairs(cls, pairs) -> "OrderMap":
        """Build from unordered ``(input, output)`` pairs, dropping duplicates."""
        uniq = sorted({(as_scalar(a), as_scalar(b)) for a, b in pairs})
        return cls(tuple(uniq))

    @property
    def inputs(self) -> list[Fraction]:
        return [a for a, _ in self.breakpoints]

    def __call__(self, x) -> Fraction:
        x = as_scalar(x)
        pts = self.breakpoints
        if not pts:
            return x
        if x <= pts[0][0]:
            return pts[0][1] + (x - pts[0][0])
        if x >= pts[-1][0]:
            return pts[-1][1] + (x - pts[-1][0])
        i = bisect_right(self.inputs, x) - 1
        (a0, b0), (a1, b1) = pts[i], pts[i + 1]
        return b0 + (x - a0) * (b1 - b0) / (a1 - a0)

    def inverse(self) -> "OrderMap":
        return OrderMap(tuple((b, a) for a, b in self.breakpoints))

    def image(self, E: Interval) -> Interval:
        return Interval(self(E.lo), self(E.hi))


def apply_order_map(theta: OrderMap, P: Family) -> Family:
    return Family(tuple(theta.image(E) for E in P))
