"""Inner and outer covers of an interval with respect to a finite family.

The constructions here are exact: every endpoint is rational and every
validity claim is checked with exact comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .errors import (CoverTooSmall, IncompatibleOrderTypes, NoChain,
                     PreconditionViolated, UnionMismatch)
from .intervals import (Family, Interval, OrderMap, approx_dominated, components,
                        dominates, is_linked_list, reach, union_is)

CoverKind = Literal["inner", "outer"]


@dataclass(frozen=True)
class LinkedCover:
    intervals: tuple[Interval, ...]
    kind: CoverKind
    base: Interval
    against: Family

    def __len__(self):
        return len(self.intervals)


@dataclass(frozen=True)
class RChain:
    """Points ``x_1 < ... < x_n`` with ``L(x_1) = a``, ``R(x_i) = x_{i+1}``, ``R(x_n) = b``."""

    points: tuple[Fraction, ...]
    base: Interval

    def __len__(self):
        return len(self.points)


def _require_union(P: Family, base: Interval):
    if not union_is(P, base):
        raise UnionMismatch(f"union of family is {components(P)}, expected {base!r}")


def r_chain(P: Family, base: Interval) -> RChain:
    """Iterate ``x -> R(x)`` from a seed with ``L(seed) = base.lo`` until ``R = base.hi``.

    The seed is the midpoint of the shortest member starting at ``base.lo``.
    """
    _require_union(P, base)
    starters = [F for F in P if F.lo == base.lo]
    if not starters:
        raise NoChain(f"no point x with L(x) = {base.lo}")
    x = min(starters, key=lambda F: F.hi).mid
    points = [x]
    while True:
        _, right = reach(P, x)
        if right == base.hi:
            return RChain(tuple(points), base)
        x = right
        points.append(x)


def build_inner_cover(P: Family, base: Interval) -> LinkedCover:
    """Greedy inner cover built from members of ``P``.

    Starting from ``base.lo`` the member reaching furthest right among those
    overlapping the current right end is taken; each chosen member's right end
    is then pulled back to the midpoint of its overlap with the next one, which
    restores the strict linked-list inequalities.  The result has at most
    ``n + 1`` elements when the R-chain has ``n`` points.
    """
    _require_union(P, base)
    chosen: list[Interval] = []
    edge = base.lo
    while edge < base.hi:
        if chosen:
            candidates = [F for F in P if F.lo < edge < F.hi]
        else:
            candidates = [F for F in P if F.lo == base.lo]
        # union == base guarantees a candidate that extends past ``edge``
        best = max(candidates, key=lambda F: (F.hi, -F.lo))
        chosen.append(best)
        edge = best.hi
    trimmed = [
        Interval(F.lo, (nxt.lo + F.hi) / 2) for F, nxt in zip(chosen, chosen[1:])
    ] + [chosen[-1]]
    return LinkedCover(tuple(trimmed), "inner", base, P)


def build_outer_cover(P: Family, base: Interval, chain: RChain | None = None) -> LinkedCover:
    """Outer cover with ``floor(n/2) + 1`` elements ``E_i = (x_{2i-3}, x_{2i})``.

    Chain indices at or below zero read as ``base.lo`` and indices above
    ``n`` read as ``base.hi``.
    """
    if chain is None:
        chain = r_chain(P, base)
    else:
        _require_union(P, base)
    xs = chain.points
    n = len(xs)

    def x(i: int) -> Fraction:
        if i <= 0:
            return base.lo
        if i > n:
            return base.hi
        return xs[i - 1]

    m = n // 2 + 1
    return LinkedCover(
        tuple(Interval(x(2 * i - 3), x(2 * i)) for i in range(1, m + 1)), "outer", base, P
    )


def validate_cover(c: LinkedCover) -> bool:
    if not c.intervals or not is_linked_list(c.intervals):
        return False
    if not union_is(c.intervals, c.base):
        return False
    if c.kind == "inner":
        return union_is(c.against, c.base) and all(
            approx_dominated(E, c.against) for E in c.intervals
        )
    if c.kind == "outer":
        cover = Family(c.intervals)
        return all(c.base.contains(F) for F in c.against) and all(
            dominates(F, cover) for F in c.against
        )
    return False


@dataclass(frozen=True)
class Extremes:
    forced_least: bool
    forced_greatest: bool
    inner_least_possible: bool
    inner_greatest_possible: bool


def cover_extremes(P: Family, base: Interval) -> Extremes:
    """Which ends of ``base`` force least/greatest cover elements.

    For a finite family ``L(x) = base.lo`` for some ``x`` exactly when a
    member starts at ``base.lo`` (dually for ``R`` and ``base.hi``).
    """
    if not all(base.contains(F) for F in P):
        raise PreconditionViolated("family is not contained in the base interval")
    least = any(F.lo == base.lo for F in P)
    greatest = any(F.hi == base.hi for F in P)
    full = bool(P.intervals) and union_is(P, base)
    return Extremes(least, greatest, least and full, greatest and full)


def outer_bound_check(c: LinkedCover, chain: RChain) -> bool:
    """Every outer cover has at most ``n + 1`` elements."""
    return len(c.intervals) <= len(chain.points) + 1


def double_outer_cover(P0: Family, base: Interval, c: LinkedCover) -> tuple[OrderMap, LinkedCover]:
    """Interleave an ``n``-element outer cover with its image to get ``2n - 1`` elements.

    The returned map moves the endpoints ``(x_k, y_k)`` of the cover to
    ``(x'_k, y'_k)`` placed at the thirds of the gaps ``(y_{k-1}, x_{k+1})``.
    The merged cover is valid for every family refining both ``P0`` and its
    image; the ``against`` field carries their common refinement.
    """
    n = len(c.intervals)
    if n < 2:
        raise CoverTooSmall("doubling needs an outer cover with at least two elements")
    if c.kind != "outer" or not validate_cover(c):
        raise PreconditionViolated("input is not a valid outer cover")
    a, b = base.lo, base.hi
    xs = [E.lo for E in c.intervals]
    ys = [E.hi for E in c.intervals]
    xp: list[Fraction] = [a] + [Fraction(0)] * (n - 1)
    yp: list[Fraction] = [Fraction(0)] * (n - 1) + [b]
    # 0-based: x'_k in (y_{k-1}, x_{k+1}) with y'_{k-1} above it; last gap ends at b
    for k in range(1, n):
        lo = ys[k - 1]
        hi = xs[k + 1] if k + 1 < n else b
        gap = hi - lo
        xp[k] = lo + gap / 3
        yp[k - 1] = lo + 2 * gap / 3
    theta = OrderMap.from_pairs(list(zip(xs, xp)) + list(zip(ys, yp)))
    merged: list[Interval] = []
    for l in range(n):
        merged.append(Interval(xp[l], ys[l]))
        if l + 1 < n:
            merged.append(Interval(xs[l + 1], yp[l]))
    image = [theta.image(F) for F in P0]
    common = Family(tuple(
        I for F in P0 for G in image if (I := F.intersection(G)) is not None
    ))
    return theta, LinkedCover(tuple(merged), "outer", base, common)


def _augment_without_domination(base: Interval, disjoint: Sequence[Interval]) -> list[Interval]:
    """Short intervals covering ``base`` none of which contains a listed interval."""
    added = []
    u = base.lo
    ds = sorted(disjoint)
    while True:
        ahead = [d for d in ds if d.lo >= u]
        if not ahead:
            added.append(Interval(u, base.hi))
            return added
        d = ahead[0]
        v = d.hi - d.length / 4
        added.append(Interval(u, v))
        u = (d.lo + v) / 2


def outer_cover_from_disjoint(P: Family, base: Interval, disjoint: Sequence[Interval]) -> LinkedCover:
    """Outer cover with at least ``ceil(k/2)`` elements from ``k`` undominated disjoint intervals.

    ``P`` is first enlarged so that its union is ``base`` while still
    dominating none of the listed intervals; the cover is built against the
    enlarged family (and so is also an outer cover for ``P`` itself).
    """
    ds = sorted(disjoint)
    if not ds:
        raise PreconditionViolated("need at least one interval")
    if not all(base.contains(F) for F in P):
        raise PreconditionViolated("family is not contained in the base interval")
    for d, e in zip(ds, ds[1:]):
        if e.lo < d.hi:
            raise PreconditionViolated(f"{d!r} and {e!r} overlap")
    for d in ds:
        if not base.contains(d):
            raise PreconditionViolated(f"{d!r} is not inside {base!r}")
        if dominates(d, P):
            raise PreconditionViolated(f"{d!r} is dominated by the family")
    augmented = Family(P.intervals + tuple(_augment_without_domination(base, ds)))
    return build_outer_cover(augmented, base)


def _group_by_nearest(m: int, n: int, offset: int = 0) -> list[list[int]]:
    """Split outer indices ``0..m-1`` among inner indices ``offset..offset+n-1``.

    Each outer index joins the nearest inner index, ties going to the smaller.
    """
    groups: list[list[int]] = [[] for _ in range(n)]
    for i in range(m):
        best = min(range(n), key=lambda j: (abs(i - (j + offset)), j))
        groups[best].append(i)
    return groups


def order_compatible_bijection(outer: LinkedCover, inner: LinkedCover) -> OrderMap:
    """Increasing bijection carrying each outer-cover interval into an inner-cover interval.

    Outer indices ``0..m-1`` are aligned with inner indices ``0..n-1``
    (``n <= m``).  Consecutive outer intervals grouped with the same inner
    index are merged, and the merged linked list is mapped endpoint by
    endpoint onto the inner cover.
    """
    m, n = len(outer.intervals), len(inner.intervals)
    if m < n:
        raise IncompatibleOrderTypes(f"outer cover has {m} elements, inner cover has {n}")
    if not (is_linked_list(outer.intervals) and is_linked_list(inner.intervals)):
        raise PreconditionViolated("both covers must be linked lists")
    groups = _group_by_nearest(m, n)
    merged = [
        Interval(outer.intervals[g[0]].lo, outer.intervals[g[-1]].hi) for g in groups
    ]
    pairs = []
    for G, F in zip(merged, inner.intervals):
        pairs += [(G.lo, F.lo), (G.hi, F.hi)]
    return OrderMap.from_pairs(pairs)


def endpoint_grid(P: Family, base: Interval, refinements: int = 2) -> list[Fraction]:
    """Endpoints of ``P`` inside ``base`` plus the base ends, with midpoints inserted.

    Each refinement inserts the midpoint of every pair of neighbours.
    """
    pts = {base.lo, base.hi}
    for F in P:
        pts.update(x for x in (F.lo, F.hi) if base.lo <= x <= base.hi)
    grid = sorted(pts)
    for _ in range(refinements):
        grid = sorted(set(grid) | {(u + v) / 2 for u, v in zip(grid, grid[1:])})
    return grid


def two_element_outer_cover_exists(P: Family, base: Interval, grid: Sequence[Fraction] | None = None) -> bool:
    """Exhaustive search for a valid outer cover ``[(a, y), (x, b)]`` with ``x < y`` on the grid."""
    pts = endpoint_grid(P, base) if grid is None else list(grid)
    inner = [p for p in pts if base.lo < p < base.hi]
    for i, x in enumerate(inner):
        for y in inner[i + 1:]:
            c = LinkedCover((Interval(base.lo, y), Interval(x, base.hi)), "outer", base, P)
            if validate_cover(c):
                return True
    return False


def strict_subintervals_dominated(P: Family, base: Interval, grid: Sequence[Fraction] | None = None) -> bool:
    """Is every grid subinterval of ``base`` other than ``base`` itself dominated by ``P``?"""
    pts = endpoint_grid(P, base) if grid is None else list(grid)
    for i, u in enumerate(pts):
        for v in pts[i + 1:]:
            if (u, v) != (base.lo, base.hi) and not dominates(Interval(u, v), P):
                return False
    return True


def base_is_inner_cover(P: Family, base: Interval) -> bool:
    """``[base]`` is a valid inner cover (which forces the union of ``P`` to be ``base``)."""
    return validate_cover(LinkedCover((base,), "inner", base, P))
