"""Refining chains of interval families on a grid and the ideals they cut out.

A net is modelled by a finite chain ``P_1, P_2, ...`` in which every family
refines its predecessor.  The limit seminorm of an operator is the value of
``sup_{E in P} sigma_{r+1}(EXE)`` on the last family; the values along the
chain never increase.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import GridMismatch, NotAPartition, PreconditionViolated, UnknownKind
from .intervals import OrderMap
from .nest import (BlockOperator, GridInterval, NestGrid, block_diag_expectation,
                   build_witness, op_norm, sigma)

GridFamily = tuple[GridInterval, ...]

CANONICAL_KINDS = ("compacts", "all", "kminus", "kplus", "e0", "ei",
                   "radical", "pseudopartitions", "larson")


def as_family(members: Iterable[GridInterval]) -> GridFamily:
    return tuple(sorted(set(members)))


def family_refines(P1: Iterable[GridInterval], P2: Iterable[GridInterval]) -> bool:
    """Every member of ``P1`` lies inside some member of ``P2``."""
    P2 = list(P2)
    return all(any(F.contains(E) for F in P2) for E in P1)


@dataclass(frozen=True)
class NetChain:
    grid: NestGrid
    families: tuple[GridFamily, ...]
    automorphism_samples: tuple[OrderMap, ...] = ()

    def __post_init__(self):
        fams = tuple(as_family(P) for P in self.families)
        if not fams:
            raise ValueError("a net needs at least one family")
        for P in fams:
            for E in P:
                if E.stop > self.grid.k:
                    raise GridMismatch(f"{E!r} exceeds the {self.grid.k}-atom grid")
        for t, (P, Q) in enumerate(zip(fams, fams[1:])):
            if not family_refines(Q, P):
                raise ValueError(f"family {t + 1} does not refine family {t}")
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "automorphism_samples", tuple(self.automorphism_samples))

    def __len__(self):
        return len(self.families)

    @property
    def last(self) -> GridFamily:
        return self.families[-1]

    def padded(self, length: int) -> tuple[GridFamily, ...]:
        return self.families + (self.last,) * (length - len(self.families))


@dataclass(frozen=True)
class IdealHandle:
    net: NetChain
    r: int = 0
    tol: float = 1e-9

    def __post_init__(self):
        if self.r < 0 or self.tol < 0:
            raise ValueError("r and tol must be nonnegative")


def _same_grid(*items):
    grids = {it.grid for it in items}
    if len(grids) != 1:
        raise GridMismatch("objects live on different grids")


def family_sup(P: Iterable[GridInterval], X: BlockOperator, r: int = 0) -> float:
    g = X.grid
    vals = [sigma(X.entries[g.span(E.start, E.stop), g.span(E.start, E.stop)], r) for E in P]
    return max(vals, default=0.0)


def seminorm_profile(net: NetChain, X: BlockOperator, r: int = 0) -> list[float]:
    """``sup_{E in P_t} sigma_{r+1}(EXE)`` for each family of the chain."""
    _same_grid(net, X)
    return [family_sup(P, X, r) for P in net.families]


def limit_seminorm(net: NetChain, X: BlockOperator, r: int = 0) -> float:
    profile = seminorm_profile(net, X, r)
    slack = 1e-12 * max(1.0, profile[0])
    if any(b > a + slack for a, b in zip(profile, profile[1:])):
        raise PreconditionViolated(f"seminorm increased along the chain: {profile}")
    return profile[-1]


def first_index(values: Sequence[float], holds: Callable[[float], bool]) -> int | None:
    """First chain index from which ``holds`` is true for every later entry."""
    idx = None
    for t in range(len(values) - 1, -1, -1):
        if not holds(values[t]):
            break
        idx = t
    return idx


def membership(h: IdealHandle, X: BlockOperator) -> bool:
    return limit_seminorm(h.net, X, h.r) <= h.tol


def sum_net(n1: NetChain, n2: NetChain) -> NetChain:
    """Entry-wise unions; its kernel is the intersection of the two kernels."""
    _same_grid(n1, n2)
    m = max(len(n1), len(n2))
    fams = [P + Q for P, Q in zip(n1.padded(m), n2.padded(m))]
    return NetChain(n1.grid, tuple(fams), n1.automorphism_samples + n2.automorphism_samples)


def product_net(n1: NetChain, n2: NetChain) -> NetChain:
    """Entry-wise products: all nonempty intersections of members."""
    _same_grid(n1, n2)
    m = max(len(n1), len(n2))
    fams = []
    for P, Q in zip(n1.padded(m), n2.padded(m)):
        fams.append([I for E in P for F in Q if (I := E.intersection(F)) is not None])
    return NetChain(n1.grid, tuple(fams), n1.automorphism_samples + n2.automorphism_samples)


def cofinal_check(n1: NetChain, n2: NetChain) -> bool:
    """Is every family of ``n2`` refined by some family of ``n1``?"""
    _same_grid(n1, n2)
    return all(any(family_refines(P, Q) for P in n1.families) for Q in n2.families)


def induced_family(X: BlockOperator, eps: float, r: int = 0) -> GridFamily:
    """All grid intervals ``E`` with ``sigma_{r+1}(EXE) < eps``."""
    if not eps > 0:
        raise PreconditionViolated("eps must be positive")
    return tuple(E for E in X.grid.grid_intervals() if family_sup([E], X, r) < eps)


def _dyadic_chain(k: int) -> list[GridFamily]:
    blocks = [GridInterval(0, k)]
    chain = [tuple(blocks)]
    while any(E.stop - E.start > 1 for E in blocks):
        nxt = []
        for E in blocks:
            if E.stop - E.start > 1:
                mid = (E.start + E.stop) // 2
                nxt += [GridInterval(E.start, mid), GridInterval(mid, E.stop)]
            else:
                nxt.append(E)
        blocks = nxt
        chain.append(tuple(blocks))
    return chain


def canonical_nets(grid: NestGrid, which: str) -> NetChain:
    """Standard nets on the grid.

    ``compacts`` is the single family ``{(0, k)}`` and ``all`` the empty
    family.  ``kminus`` (``kplus``) is the single family of proper lower
    (upper) corners, so its limit is the supremum over proper cuts.  ``e0``
    shrinks the lower corner down to the first atom and ``ei`` shrinks the
    upper corner down to the last.  ``radical`` halves blocks until the atom
    partition is reached; on a finite grid every pseudopartition is a
    partition and all partitions are refined by the atoms, so
    ``pseudopartitions`` and ``larson`` give the same chain.
    """
    k = grid.k
    if which == "compacts":
        fams = [[GridInterval(0, k)]]
    elif which == "all":
        fams = [[]]
    elif which == "kminus":
        fams = [[GridInterval(0, j) for j in range(1, k)]]
    elif which == "kplus":
        fams = [[GridInterval(j, k) for j in range(1, k)]]
    elif which == "e0":
        fams = [[GridInterval(0, j)] for j in range(k, 0, -1)]
    elif which == "ei":
        fams = [[GridInterval(j, k)] for j in range(k)]
    elif which in ("radical", "pseudopartitions", "larson"):
        fams = _dyadic_chain(k)
    else:
        raise UnknownKind(f"unknown net kind {which!r}; expected one of {CANONICAL_KINDS}")
    return NetChain(grid, tuple(tuple(f) for f in fams))


def quotient_estimate(h: IdealHandle, X: BlockOperator) -> float:
    return limit_seminorm(h.net, X, h.r)


def check_partition(grid: NestGrid, P: Iterable[GridInterval]) -> GridFamily:
    blocks = as_family(P)
    edge = 0
    for E in blocks:
        if E.start != edge:
            raise NotAPartition(f"gap or overlap at cut {edge}")
        edge = E.stop
    if edge != grid.k:
        raise NotAPartition(f"blocks stop at cut {edge}, grid has {grid.k} atoms")
    return blocks


def partition_kernel_witness(P: Iterable[GridInterval], X: BlockOperator) -> BlockOperator:
    """``X - Delta_P(X)``: the nearest element with vanishing block diagonal."""
    blocks = check_partition(X.grid, P)
    return X - block_diag_expectation(blocks, X)


def quotient_oracle_partition(P: Iterable[GridInterval], X: BlockOperator) -> float:
    """Exact distance from ``X`` to ``{T : Delta_P(T) = 0}``, which is ``||Delta_P(X)||``."""
    T = partition_kernel_witness(P, X)
    return op_norm(X - T)


def kminus_quotient_surrogate(X: BlockOperator, r: int = 0) -> float:
    """``max`` over proper cuts ``N`` of ``sigma_{r+1}(NXN)``.

    A finite stand-in only: no equality with a distance to an ideal of
    compact-like operators is claimed.
    """
    g = X.grid
    return max((sigma(X.entries[:g.cuts[j], :g.cuts[j]], r) for j in range(1, g.k)), default=0.0)


def separating_witness(n1: NetChain, n2: NetChain, r: int = 0) -> BlockOperator:
    """An operator in the kernel of ``n2`` whose ``n1`` limit is at least one.

    Exists when ``n1`` is not cofinal in ``n2``: some member of the last
    ``n1`` family is then not dominated by the last ``n2`` family.
    """
    _same_grid(n1, n2)
    undominated = [E for E in n1.last if not any(F.contains(E) for F in n2.last)]
    if not undominated:
        raise PreconditionViolated("the last family of n1 refines that of n2")
    return build_witness(n1.grid, n2.last, "plain", [undominated[0]], rank=r + 1)


@dataclass(frozen=True)
class StabilityRow:
    theta: OrderMap
    applicable: bool
    difference: float


def stability_diagnostic(net: NetChain, X: BlockOperator, r: int = 0) -> list[StabilityRow]:
    """Relabel the chain by each sampled map that permutes the grid labels.

    An increasing map permuting a finite label set fixes it pointwise, so
    every applicable sample leaves the limit unchanged; samples that move a
    label off the grid are reported as not applicable.
    """
    labels = net.grid.labels
    base = limit_seminorm(net, X, r)
    rows = []
    for theta in net.automorphism_samples:
        if labels is None:
            rows.append(StabilityRow(theta, False, 0.0))
            continue
        index = {lab: i for i, lab in enumerate(labels)}
        images = [theta(lab) for lab in labels]
        if set(images) != set(labels):
            rows.append(StabilityRow(theta, False, 0.0))
            continue
        moved = tuple(
            tuple(GridInterval(index[images[E.start]], index[images[E.stop]]) for E in P)
            for P in net.families)
        value = limit_seminorm(NetChain(net.grid, moved), X, r)
        rows.append(StabilityRow(theta, True, abs(value - base)))
    return rows

