"""Finite nests, block upper-triangular operators and their norm computations.

A :class:`NestGrid` fixes coordinate ranks ``0 = n_0 < ... < n_k = dim``;
cut ``j`` is the projection onto the first ``n_j`` coordinates and atom
``j`` is the coordinate block between cuts ``j`` and ``j + 1``.  A
:class:`GridInterval` ``(start, stop)`` is the interval projection between
cuts ``start`` and ``stop``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (BadChain, GridMismatch, OverlappingIntervals,
                     PreconditionViolated, RankOutOfRange, ShapeMismatch)

WitnessMode = Literal["plain", "right_open", "left_open"]


@dataclass(frozen=True)
class NestGrid:
    dim: int
    cuts: tuple[int, ...]
    labels: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if len(cuts) < 2 or cuts[0] != 0 or cuts[-1] != self.dim:
            raise ValueError(f"cuts must run from 0 to {self.dim}")
        if any(a >= b for a, b in zip(cuts, cuts[1:])):
            raise ValueError("cuts must be strictly increasing")
        if self.labels is not None:
            labels = tuple(Fraction(x) for x in self.labels)
            if len(labels) != len(cuts) or any(a >= b for a, b in zip(labels, labels[1:])):
                raise ValueError("labels must be strictly increasing, one per cut")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, k: int, atom_size: int = 1) -> "NestGrid":
        return cls(k * atom_size, tuple(range(0, k * atom_size + 1, atom_size)))

    @property
    def k(self) -> int:
        """Number of atoms (cut indices run over ``0..k``)."""
        return len(self.cuts) - 1

    def span(self, start: int, stop: int) -> slice:
        return slice(self.cuts[start], self.cuts[stop])

    def atom(self, j: int) -> slice:
        return self.span(j, j + 1)

    def grid_intervals(self) -> list["GridInterval"]:
        return [GridInterval(s, t) for s in range(self.k) for t in range(s + 1, self.k + 1)]

    def atoms(self) -> list["GridInterval"]:
        return [GridInterval(j, j + 1) for j in range(self.k)]


@dataclass(frozen=True, order=True)
class GridInterval:
    start: int
    stop: int

    def __post_init__(self):
        if not 0 <= self.start < self.stop:
            raise ValueError(f"bad grid interval ({self.start}, {self.stop})")

    def contains(self, other: "GridInterval") -> bool:
        return self.start <= other.start and other.stop <= self.stop

    def intersection(self, other: "GridInterval") -> "GridInterval | None":
        s, t = max(self.start, other.start), min(self.stop, other.stop)
        return GridInterval(s, t) if s < t else None

    def disjoint(self, other: "GridInterval") -> bool:
        return self.stop <= other.start or other.stop <= self.start

    def __repr__(self):
        return f"[{self.start},{self.stop}]"


def _check_interval(grid: NestGrid, E: GridInterval):
    if E.stop > grid.k:
        raise GridMismatch(f"{E!r} exceeds the {grid.k}-atom grid")


def lower_block_mask(grid: NestGrid) -> np.ndarray:
    """Boolean mask of the entries that must vanish for membership in the algebra."""
    mask = np.zeros((grid.dim, grid.dim), dtype=bool)
    for c in grid.cuts[1:-1]:
        mask[c:, :c] = True
    return mask


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """A dense operator that is block upper-triangular for its grid."""

    grid: NestGrid
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.shape != (self.grid.dim, self.grid.dim):
            raise ShapeMismatch(f"entries have shape {a.shape}, grid has dim {self.grid.dim}")
        if np.any(a[lower_block_mask(self.grid)] != 0):
            raise ValueError("operator is not block upper-triangular for its grid")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def project(cls, grid: NestGrid, entries) -> "BlockOperator":
        """Zero the lower blocks of ``entries`` and wrap the result."""
        a = np.array(entries, dtype=complex)
        a[lower_block_mask(grid)] = 0
        return cls(grid, a)

    @classmethod
    def zeros(cls, grid: NestGrid) -> "BlockOperator":
        return cls(grid, np.zeros((grid.dim, grid.dim), dtype=complex))

    @classmethod
    def identity(cls, grid: NestGrid) -> "BlockOperator":
        return cls(grid, np.eye(grid.dim, dtype=complex))

    def _same_grid(self, other: "BlockOperator"):
        if other.grid != self.grid:
            raise GridMismatch("operators live on different grids")

    def __add__(self, other):
        self._same_grid(other)
        return BlockOperator(self.grid, self.entries + other.entries)

    def __sub__(self, other):
        self._same_grid(other)
        return BlockOperator(self.grid, self.entries - other.entries)

    def __matmul__(self, other):
        self._same_grid(other)
        return BlockOperator.project(self.grid, self.entries @ other.entries)

    def __mul__(self, scalar):
        return BlockOperator(self.grid, self.entries * scalar)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, BlockOperator) and other.grid == self.grid
                and np.array_equal(self.entries, other.entries))

    __hash__ = None


def compress(E: GridInterval, X: BlockOperator) -> BlockOperator:
    """``E X E``: keep only the rows and columns inside ``E``."""
    _check_interval(X.grid, E)
    out = np.zeros_like(X.entries)
    s = X.grid.span(E.start, E.stop)
    out[s, s] = X.entries[s, s]
    return BlockOperator(X.grid, out)


def corner(X: BlockOperator, E: GridInterval) -> np.ndarray:
    """The square sub-block of ``X`` on the coordinates of ``E``."""
    _check_interval(X.grid, E)
    s = X.grid.span(E.start, E.stop)
    return X.entries[s, s]


def singular_values(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def matrix_norm(a: np.ndarray) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def sigma(a: np.ndarray, r: int) -> float:
    """``sigma_{r+1}(a)``, the distance from ``a`` to matrices of rank at most ``r``."""
    s = singular_values(a)
    return float(s[r]) if r < s.size else 0.0


def op_norm(X: BlockOperator | np.ndarray) -> float:
    return matrix_norm(X.entries if isinstance(X, BlockOperator) else X)


def r_ess_norm(X: BlockOperator, r: int) -> float:
    """Distance from ``X`` to operators of rank at most ``r``.

    Stands in for the essential norm; ``r = 0`` is the operator norm.
    """
    if not 0 <= r < X.grid.dim:
        raise RankOutOfRange(f"r must lie in [0, {X.grid.dim})")
    return sigma(X.entries, r)


def compressed_ess(X: BlockOperator, E: GridInterval, r: int) -> float:
    """``r_ess_norm(compress(E, X), r)`` without building the full-size operator."""
    return sigma(corner(X, E), r)


def _check_disjoint(P: Sequence[GridInterval]):
    ordered = sorted(P)
    for a, b in zip(ordered, ordered[1:]):
        if not a.disjoint(b):
            raise OverlappingIntervals(f"{a!r} and {b!r} overlap")


def block_diag_expectation(P: Sequence[GridInterval], X: BlockOperator) -> BlockOperator:
    """``sum_i E_i X E_i`` over pairwise disjoint intervals."""
    _check_disjoint(P)
    out = np.zeros_like(X.entries)
    for E in P:
        _check_interval(X.grid, E)
        s = X.grid.span(E.start, E.stop)
        out[s, s] = X.entries[s, s]
    return BlockOperator(X.grid, out)


def _pinv_sqrt(h: np.ndarray, scale: float) -> np.ndarray:
    """Moore-Penrose inverse of the square root of a PSD matrix."""
    w, v = np.linalg.eigh(h)
    keep = w > scale * 1e-13
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


def parrott_complete(A, B, C) -> tuple[np.ndarray, float]:
    """Fill ``D`` in ``[[A, B], [C, D]]`` at the least possible norm.

    The least norm is ``max(||[A B]||, ||[A; C]||)``; ``D`` is the central
    completion ``-K A* L`` where ``C = K (v^2 - A*A)^{1/2}`` and
    ``B = (v^2 - AA*)^{1/2} L``.
    """
    A, B, C = (np.atleast_2d(np.asarray(m, dtype=complex)) for m in (A, B, C))
    p, q = A.shape
    if B.shape[0] != p or C.shape[1] != q:
        raise ShapeMismatch(f"blocks A{A.shape}, B{B.shape}, C{C.shape} do not conform")
    t, s = C.shape[0], B.shape[1]
    value = max(matrix_norm(np.hstack([A, B])), matrix_norm(np.vstack([A, C])))
    if value == 0.0 or t == 0 or s == 0:
        return np.zeros((t, s), dtype=complex), value
    v2 = value * value
    K = C @ _pinv_sqrt(v2 * np.eye(q) - A.conj().T @ A, v2)
    L = _pinv_sqrt(v2 * np.eye(p) - A @ A.conj().T, v2) @ B
    return -K @ A.conj().T @ L, value


def complete_staircase(Y: np.ndarray, bounds: Sequence[int], free: np.ndarray) -> np.ndarray:
    """Fill the free blocks of ``Y`` with sequential Parrott steps.

    ``bounds`` splits the coordinates into ``m`` blocks; ``free[p, q]`` marks
    the unknown blocks (only ``p <= q`` may be free, and the known region must
    be a staircase).  Blocks are filled in order of distance from the
    diagonal, so each step sees a known lower-left region.  The final norm is
    the largest norm of a known staircase corner ``rows >= p, cols <= q``.
    """
    Y = np.array(Y, dtype=complex)
    m = len(bounds) - 1
    order = sorted(((q - p, p, q) for p in range(m) for q in range(p, m) if free[p, q]))
    for _, p, q in order:
        r0, r1 = bounds[p], bounds[p + 1]
        c0, c1 = bounds[q], bounds[q + 1]
        D, _ = parrott_complete(Y[r1:, :c0], Y[r1:, c0:c1], Y[r0:r1, :c0])
        Y[r0:r1, c0:c1] = D
    return Y


def _chain_bounds(grid: NestGrid, chain: Sequence[int]) -> list[int]:
    chain = list(chain)
    if len(chain) < 2 or chain[0] != 0 or chain[-1] != grid.k:
        raise BadChain(f"chain must run from cut 0 to cut {grid.k}")
    if any(a >= b for a, b in zip(chain, chain[1:])):
        raise BadChain("chain must be strictly increasing")
    return [grid.cuts[c] for c in chain]


def double_block_norms(X: BlockOperator, chain: Sequence[int]) -> list[float]:
    """Norms of ``(N_{i+1} - N_{i-1}) X (N_{i+1} - N_{i-1})`` along the chain, ends clamped."""
    bounds = _chain_bounds(X.grid, chain)
    m = len(bounds) - 1
    out = []
    for i in range(m + 1):
        lo, hi = bounds[max(i - 1, 0)], bounds[min(i + 1, m)]
        out.append(matrix_norm(X.entries[lo:hi, lo:hi]))
    return out


def banded_completion(X: BlockOperator, chain: Sequence[int]) -> BlockOperator:
    """Nearest ``T`` vanishing on every double block of the chain.

    ``T`` satisfies ``N_{i-1}^perp T N_{i+1} = 0`` (chain blocks ``(p, q)``
    with ``q <= p + 1`` are exact zeros) and ``||X - T||`` equals the largest
    double-block norm of ``X`` up to rounding.
    """
    bounds = _chain_bounds(X.grid, chain)
    m = len(bounds) - 1
    free = np.zeros((m, m), dtype=bool)
    for p in range(m):
        free[p, p + 2:] = True
    Y = complete_staircase(X.entries, bounds, free)
    T = X.entries - Y
    for p in range(m):
        rows = slice(bounds[p], bounds[p + 1])
        T[rows, :bounds[min(p + 2, m)]] = 0
    return BlockOperator(X.grid, T)


def _dominated_on_grid(E: GridInterval, Q: Iterable[GridInterval]) -> bool:
    return any(F.contains(E) for F in Q)


def build_witness(grid: NestGrid, Q: Sequence[GridInterval], mode: WitnessMode,
                  targets: Sequence[GridInterval], rank: int = 1) -> BlockOperator:
    """Partial isometry killed by every ``Q``-compression but not by intervals over the targets.

    For each target ``(s, e)`` matrix units map coordinates of a "column"
    atom into a "row" atom: ``plain`` uses atoms ``s`` and ``e - 1``;
    ``right_open`` uses atoms ``s`` and ``e`` (just past the right end);
    ``left_open`` uses atoms ``s - 1`` and ``e - 1``.  ``rank`` units are
    placed per target, so compressions over a target keep ``sigma_rank >= 1``.
    In ``right_open`` (``left_open``) mode a target touching the last (first)
    cut has no extensions and contributes nothing.
    """
    if mode not in ("plain", "right_open", "left_open"):
        raise PreconditionViolated(f"unknown witness mode {mode!r}")
    ts = sorted(targets)
    for E in list(Q) + ts:
        _check_interval(grid, E)
    for a, b in zip(ts, ts[1:]):
        if not a.disjoint(b):
            raise PreconditionViolated(f"targets {a!r} and {b!r} overlap")
    X = np.zeros((grid.dim, grid.dim), dtype=complex)
    for t in ts:
        if mode == "plain":
            guard, row_atom, col_atom = t, t.start, t.stop - 1
        elif mode == "right_open":
            if t.stop == grid.k:
                continue
            guard, row_atom, col_atom = GridInterval(t.start, t.stop + 1), t.start, t.stop
        else:
            if t.start == 0:
                continue
            guard, row_atom, col_atom = GridInterval(t.start - 1, t.stop), t.start - 1, t.stop - 1
        if _dominated_on_grid(guard, Q):
            raise PreconditionViolated(f"{guard!r} is dominated by Q")
        rows = range(grid.cuts[row_atom], grid.cuts[row_atom + 1])
        cols = range(grid.cuts[col_atom], grid.cuts[col_atom + 1])
        if rank > min(len(rows), len(cols)):
            raise PreconditionViolated(f"atoms of {t!r} are too small for rank {rank}")
        # rows from the top of the row atom, columns from the bottom of the column atom
        for u in range(rank):
            X[rows[u], cols[len(cols) - 1 - u]] = 1.0
    return BlockOperator(grid, X)
