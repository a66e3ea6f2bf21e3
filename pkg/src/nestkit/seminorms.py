"""Elementary seminorms at nest nodes, diagonal seminorm functions and their lattice.

Discrete semantics on a grid with ``k`` atoms (node ``n`` is cut ``n``):

* ``i+_n`` is the norm of atom ``n`` and ``i-_n`` the norm of atom ``n - 1``;
* ``j_n`` is the norm of the two atoms around node ``n`` (``j_0 = i+_0``,
  ``j_k = i-_k``);
* ``e+_n`` is ``min(i+_n, raw)`` where ``raw`` is the minimum over ``m >= 2``
  of the maximum over ``1 <= l < m`` of ``sigma_{r+1}`` of the corner between
  cuts ``n + l`` and ``n + m`` (``+inf`` when no such ``m`` exists);
  ``e-_n`` mirrors it on the left.

Because ``sigma_{r+1}`` never grows under compression, the raw value is
attained at ``m = 2, l = 1``: it is ``sigma_{r+1}`` of atom ``n + 1``.  The
literal min/max form is kept in :func:`e_raw_literal` as a cross-check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridMismatch, NodeOutOfRange, PreconditionViolated, RankOutOfRange
from .nest import (BlockOperator, GridInterval, NestGrid, complete_staircase,
                   lower_block_mask, matrix_norm, sigma)


class ElemKind(enum.Enum):
    ZERO = "zero"
    E_MINUS = "e_minus"
    I_MINUS = "i_minus"
    E_PLUS = "e_plus"
    I_PLUS = "i_plus"
    J = "j"


_MINUS_LEVEL = {ElemKind.ZERO: 0, ElemKind.E_MINUS: 1, ElemKind.I_MINUS: 2}
_PLUS_LEVEL = {ElemKind.ZERO: 0, ElemKind.E_PLUS: 1, ElemKind.I_PLUS: 2}
_MINUS_BY_LEVEL = {v: k for k, v in _MINUS_LEVEL.items()}
_PLUS_BY_LEVEL = {v: k for k, v in _PLUS_LEVEL.items()}


@dataclass(frozen=True)
class NodeSeminorm:
    """Either ``j`` (``top=True``) or the join of a minus part and a plus part."""

    minus: ElemKind = ElemKind.ZERO
    plus: ElemKind = ElemKind.ZERO
    top: bool = False

    def __post_init__(self):
        if self.top:
            if self.minus is not ElemKind.ZERO or self.plus is not ElemKind.ZERO:
                raise ValueError("j carries no minus/plus parts")
        elif self.minus not in _MINUS_LEVEL or self.plus not in _PLUS_LEVEL:
            raise ValueError(f"bad node seminorm parts {self.minus}, {self.plus}")

    @property
    def levels(self) -> tuple[int, int]:
        return _MINUS_LEVEL[self.minus], _PLUS_LEVEL[self.plus]

    def __le__(self, other: "NodeSeminorm") -> bool:
        if other.top:
            return True
        if self.top:
            return False
        (a, b), (c, d) = self.levels, other.levels
        return a <= c and b <= d

    def __lt__(self, other: "NodeSeminorm") -> bool:
        return self <= other and self != other

    def label(self) -> str:
        if self.top:
            return "j"
        parts = [p.value for p in (self.minus, self.plus) if p is not ElemKind.ZERO]
        return "v".join(parts) or "zero"


J = NodeSeminorm(top=True)
ZERO = NodeSeminorm()


def pair(minus: ElemKind = ElemKind.ZERO, plus: ElemKind = ElemKind.ZERO) -> NodeSeminorm:
    return NodeSeminorm(minus, plus)


ALL_FORMS: tuple[NodeSeminorm, ...] = (J,) + tuple(
    NodeSeminorm(m, p) for m in _MINUS_LEVEL for p in _PLUS_LEVEL
)


def node_forms(node: int, k: int) -> list[NodeSeminorm]:
    """The forms allowed at ``node``: no minus part at 0, no plus part at ``k``."""
    return [f for f in ALL_FORMS
            if f.top or ((node > 0 or f.minus is ElemKind.ZERO)
                         and (node < k or f.plus is ElemKind.ZERO))]


def meet(a: NodeSeminorm, b: NodeSeminorm) -> NodeSeminorm:
    if a.top:
        return b
    if b.top:
        return a
    (m1, p1), (m2, p2) = a.levels, b.levels
    return NodeSeminorm(_MINUS_BY_LEVEL[min(m1, m2)], _PLUS_BY_LEVEL[min(p1, p2)])


def join(a: NodeSeminorm, b: NodeSeminorm) -> NodeSeminorm:
    if a.top or b.top:
        return J
    (m1, p1), (m2, p2) = a.levels, b.levels
    return NodeSeminorm(_MINUS_BY_LEVEL[max(m1, m2)], _PLUS_BY_LEVEL[max(p1, p2)])


@dataclass(frozen=True)
class DSF:
    """One node seminorm per cut ``0..k``."""

    grid: NestGrid
    kinds: tuple[NodeSeminorm, ...]

    def __post_init__(self):
        kinds = tuple(self.kinds)
        object.__setattr__(self, "kinds", kinds)
        k = self.grid.k
        if len(kinds) != k + 1:
            raise ValueError(f"need {k + 1} node seminorms, got {len(kinds)}")
        if not kinds[0].top and kinds[0].minus is not ElemKind.ZERO:
            raise ValueError("node 0 has no minus part")
        if not kinds[k].top and kinds[k].plus is not ElemKind.ZERO:
            raise ValueError(f"node {k} has no plus part")

    @classmethod
    def constant(cls, grid: NestGrid, form: NodeSeminorm) -> "DSF":
        """``form`` at every node, with the endpoint parts dropped where disallowed."""
        kinds = []
        for n in range(grid.k + 1):
            f = form
            if not f.top:
                f = NodeSeminorm(f.minus if n > 0 else ElemKind.ZERO,
                                 f.plus if n < grid.k else ElemKind.ZERO)
            kinds.append(f)
        return cls(grid, tuple(kinds))

    @classmethod
    def all_j(cls, grid: NestGrid) -> "DSF":
        return cls.constant(grid, J)

    @classmethod
    def all_zero(cls, grid: NestGrid) -> "DSF":
        return cls.constant(grid, ZERO)


class NodeValues:
    """All elementary values of one operator, computed once from its atom blocks."""

    def __init__(self, X: BlockOperator, r: int):
        if not 0 <= r < X.grid.dim:
            raise RankOutOfRange(f"r must lie in [0, {X.grid.dim})")
        g = X.grid
        self.k = g.k
        self.r = r
        blocks = [X.entries[g.atom(t), g.atom(t)] for t in range(g.k)]
        svs = [np.linalg.svd(b, compute_uv=False) for b in blocks]
        self.atom_norm = [float(s[0]) for s in svs]
        self.atom_sigma = [float(s[r]) if r < s.size else 0.0 for s in svs]
        self.double = [0.0] * (g.k + 1)
        for n in range(g.k + 1):
            if n == 0:
                self.double[n] = self.atom_norm[0]
            elif n == g.k:
                self.double[n] = self.atom_norm[g.k - 1]
            else:
                self.double[n] = matrix_norm(X.entries[g.span(n - 1, n + 1), g.span(n - 1, n + 1)])

    def check(self, node: int):
        if not 0 <= node <= self.k:
            raise NodeOutOfRange(f"node {node} outside 0..{self.k}")

    def e_raw(self, node: int, side: int) -> float:
        t = node + 1 if side > 0 else node - 2
        return self.atom_sigma[t] if 0 <= t < self.k else math.inf

    def value(self, kind: ElemKind, node: int) -> float:
        self.check(node)
        k = self.k
        if kind is ElemKind.ZERO:
            return 0.0
        if kind is ElemKind.J:
            return self.double[node]
        if kind is ElemKind.I_PLUS:
            return self.atom_norm[node] if node < k else 0.0
        if kind is ElemKind.I_MINUS:
            return self.atom_norm[node - 1] if node > 0 else 0.0
        if kind is ElemKind.E_PLUS:
            return min(self.value(ElemKind.I_PLUS, node), self.e_raw(node, +1))
        if kind is ElemKind.E_MINUS:
            return min(self.value(ElemKind.I_MINUS, node), self.e_raw(node, -1))
        raise ValueError(kind)

    def node_value(self, form: NodeSeminorm, node: int) -> float:
        if form.top:
            return self.value(ElemKind.J, node)
        return max(self.value(form.minus, node), self.value(form.plus, node))


def eval_elementary(kind: ElemKind, X: BlockOperator, node: int, r: int = 0) -> float:
    return NodeValues(X, r).value(kind, node)


def e_raw_literal(X: BlockOperator, node: int, r: int, side: int) -> float:
    """The unsimplified ``min_m max_l`` expression for the raw e-value."""
    g = X.grid
    best = math.inf
    if side > 0:
        for m in range(2, g.k - node + 1):
            best = min(best, max(sigma(X.entries[g.span(node + l, node + m), g.span(node + l, node + m)], r)
                                 for l in range(1, m)))
    else:
        for m in range(2, node + 1):
            best = min(best, max(sigma(X.entries[g.span(node - m, node - l), g.span(node - m, node - l)], r)
                                 for l in range(1, m)))
    return best


def _check_grid(d: DSF, X: BlockOperator):
    if d.grid != X.grid:
        raise GridMismatch("DSF and operator live on different grids")


def eval_nodes(d: DSF, X: BlockOperator, r: int = 0) -> list[float]:
    _check_grid(d, X)
    vals = NodeValues(X, r)
    return [vals.node_value(f, n) for n, f in enumerate(d.kinds)]


def eval_dsf(d: DSF, X: BlockOperator, r: int = 0) -> float:
    return max(eval_nodes(d, X, r))


def meet_dsf(d1: DSF, d2: DSF) -> DSF:
    if d1.grid != d2.grid:
        raise GridMismatch("DSFs live on different grids")
    return DSF(d1.grid, tuple(meet(a, b) for a, b in zip(d1.kinds, d2.kinds)))


def _best_part(vals: NodeValues, node: int, a: float, ladder: Sequence[ElemKind]) -> ElemKind:
    for kind in ladder:
        if vals.value(kind, node) < a:
            return kind
    return ElemKind.ZERO


def greatest_dsf(X: BlockOperator, a: float, r: int = 0) -> DSF:
    """Node by node, the largest form whose value on ``X`` is below ``a``."""
    if not a > 0:
        raise PreconditionViolated("a must be positive")
    vals = NodeValues(X, r)
    k = X.grid.k
    kinds = []
    for n in range(k + 1):
        if vals.value(ElemKind.J, n) < a:
            kinds.append(J)
            continue
        minus = _best_part(vals, n, a, (ElemKind.I_MINUS, ElemKind.E_MINUS)) if n > 0 else ElemKind.ZERO
        plus = _best_part(vals, n, a, (ElemKind.I_PLUS, ElemKind.E_PLUS)) if n < k else ElemKind.ZERO
        kinds.append(NodeSeminorm(minus, plus))
    return DSF(X.grid, tuple(kinds))


def compatible(P: Sequence[GridInterval], d: DSF) -> bool:
    """Does the interval family ``P`` meet each node's requirement?

    ``j`` needs a member straddling the node (at the end nodes, a member
    touching that end); ``i+`` needs a member ``(n, g)``; ``e+`` needs, for
    some ``m >= 2``, all of ``(n + l, n + m)`` with ``1 <= l < m``, or else
    the ``i+`` requirement (mirroring the clamp ``e = min(i, raw)``).  Minus
    parts are symmetric.
    """
    S = set(P)
    k = d.grid.k
    for E in S:
        if E.stop > k:
            raise GridMismatch(f"{E!r} exceeds the {k}-atom grid")

    def corner_plus(n):
        return any(E.start == n for E in S)

    def corner_minus(n):
        return any(E.stop == n for E in S)

    def e_plus(n):
        return corner_plus(n) or any(
            all(GridInterval(n + l, n + m) in S for l in range(1, m))
            for m in range(2, k - n + 1))

    def e_minus(n):
        return corner_minus(n) or any(
            all(GridInterval(n - m, n - l) in S for l in range(1, m))
            for m in range(2, n + 1))

    checks = {ElemKind.ZERO: lambda n: True, ElemKind.I_PLUS: corner_plus,
              ElemKind.I_MINUS: corner_minus, ElemKind.E_PLUS: e_plus,
              ElemKind.E_MINUS: e_minus}
    for n, f in enumerate(d.kinds):
        if f.top:
            if n == 0:
                ok = corner_plus(0)
            elif n == k:
                ok = corner_minus(k)
            else:
                ok = any(E.start < n < E.stop for E in S)
        else:
            ok = checks[f.minus](n) and checks[f.plus](n)
        if not ok:
            return False
    return True


# --- killing a DSF -----------------------------------------------------------

_KILL, _REDUCE = 2, 1


def _kill_plan(d: DSF, vals: NodeValues):
    """Per-atom requirements on ``T`` (kill or rank-reduce) and the killed links."""
    k = d.grid.k
    atom = [0] * k
    links = set()

    def need(t, level):
        atom[t] = max(atom[t], level)

    def handle_e(n, side):
        own = n if side > 0 else n - 1
        other = n + 1 if side > 0 else n - 2
        kill_cost = vals.atom_norm[own]
        reduce_cost = vals.atom_sigma[other] if 0 <= other < k else math.inf
        if kill_cost <= reduce_cost:
            need(own, _KILL)
        else:
            need(other, _REDUCE)

    for n, f in enumerate(d.kinds):
        if f.top:
            for t in (n - 1, n):
                if 0 <= t < k:
                    need(t, _KILL)
            if 0 < n < k:
                links.add(n)
            continue
        if f.plus is ElemKind.I_PLUS:
            need(n, _KILL)
        elif f.plus is ElemKind.E_PLUS:
            handle_e(n, +1)
        if f.minus is ElemKind.I_MINUS:
            need(n - 1, _KILL)
        elif f.minus is ElemKind.E_MINUS:
            handle_e(n, -1)
    return atom, links


def _truncate(block: np.ndarray, r: int) -> np.ndarray:
    """Best rank-``r`` approximation."""
    if r == 0:
        return np.zeros_like(block)
    u, s, vh = np.linalg.svd(block)
    s = s.copy()
    s[r:] = 0
    return (u[:, :s.size] * s) @ vh[:s.size, :]


def dsf_kill(d: DSF, X: BlockOperator, a: float, r: int = 0) -> BlockOperator:
    """An operator ``T`` with ``eval_dsf(d, T) = 0`` and ``||X - T|| < a``.

    Each node's form dictates which atom corners of ``T`` vanish (``j``
    also kills the link between its two atoms); an ``e`` part may instead be
    met by cutting the neighbouring atom down to rank ``r``, whichever is
    cheaper.  ``Y = X - T`` is then fixed on those blocks and completed
    elsewhere by sequential Parrott steps, so ``||Y||`` is the largest of the
    fixed corners.
    """
    _check_grid(d, X)
    vals = NodeValues(X, r)
    if not eval_dsf(d, X, r) < a:
        raise PreconditionViolated("the DSF value of X must be below a")
    g = X.grid
    k = g.k
    atom, links = _kill_plan(d, vals)
    Y = np.zeros_like(X.entries)
    reduced = {}
    for t in range(k):
        s = g.atom(t)
        if atom[t] == _KILL:
            Y[s, s] = X.entries[s, s]
        elif atom[t] == _REDUCE:
            reduced[t] = _truncate(X.entries[s, s], r)
            Y[s, s] = X.entries[s, s] - reduced[t]
    for n in links:
        Y[g.atom(n - 1), g.atom(n)] = X.entries[g.atom(n - 1), g.atom(n)]
    free = np.zeros((k, k), dtype=bool)
    for p in range(k):
        for q in range(p, k):
            fixed = (p == q and atom[p]) or (q == p + 1 and q in links)
            free[p, q] = not fixed
    Y = complete_staircase(Y, g.cuts, free)
    T = X.entries - Y
    T[lower_block_mask(g)] = 0
    for t in range(k):
        s = g.atom(t)
        if atom[t] == _KILL:
            T[s, s] = 0
        elif atom[t] == _REDUCE:
            T[s, s] = reduced[t]
    for n in links:
        T[g.atom(n - 1), g.atom(n)] = 0
    return BlockOperator(g, T)


# --- splitting along a meet --------------------------------------------------

def _solve_2sat(n_vars: int, clauses: list[tuple[tuple[int, bool], tuple[int, bool]]],
                prefer: bool) -> list[bool] | None:
    """Satisfy clauses ``(lit or lit)`` where a literal is ``(var, value)``.

    Variables are fixed one at a time, trying ``prefer`` first and
    propagating; in 2-SAT a conflict-free propagation can always be kept.
    """
    watch: dict[tuple[int, bool], list[tuple[int, bool]]] = {}
    for l1, l2 in clauses:
        # not l1 implies l2, not l2 implies l1
        watch.setdefault((l1[0], not l1[1]), []).append(l2)
        watch.setdefault((l2[0], not l2[1]), []).append(l1)
    value: list[bool | None] = [None] * n_vars

    def propagate(var, val):
        trial = dict()
        stack = [(var, val)]
        while stack:
            v, b = stack.pop()
            current = trial.get(v, value[v])
            if current is not None:
                if current != b:
                    return None
                continue
            trial[v] = b
            stack.extend(watch.get((v, b), []))
        return trial

    for v in range(n_vars):
        if value[v] is not None:
            continue
        trial = propagate(v, prefer)
        if trial is None:
            trial = propagate(v, not prefer)
        if trial is None:
            return None
        for u, b in trial.items():
            value[u] = b
    return [bool(b) for b in value]


def split_by_meet(d1: DSF, d2: DSF, Y: BlockOperator, eps: float, r: int = 0
                  ) -> tuple[BlockOperator, BlockOperator]:
    """Write ``Y = Y1 + Y2`` with ``eval(d1, Y1) < eps`` and ``eval(d2, Y2) < eps``.

    Each atom corner and each link between neighbouring atoms goes wholly to
    one side; blocks further from the diagonal are invisible to every
    elementary seminorm and stay in ``Y2``.  Below ``eps`` an atom cannot
    push any value over the threshold, so only the large atoms are placed,
    and the constraints on them ("this atom is not in ``Yi``", "these two
    atoms are not both in ``Yi``") form a 2-SAT instance.  Large atoms go to
    ``Y2`` when free to.  Raises :class:`PreconditionViolated` when the meet
    bound fails or no placement exists.
    """
    if not (d1.grid == d2.grid == Y.grid):
        raise GridMismatch("DSFs and operator live on different grids")
    vals = NodeValues(Y, r)
    if not eval_dsf(meet_dsf(d1, d2), Y, r) < eps:
        raise PreconditionViolated("the meet of the two DSFs is not below eps on Y")
    g = Y.grid
    k = g.k
    big = [v >= eps for v in vals.atom_norm]
    big_sigma = [v >= eps for v in vals.atom_sigma]
    link_side = {}  # link n -> side (1 or 2)
    clauses = []
    # literal (t, True) means "atom t goes to Y2"

    def forbid(t, side):
        if 0 <= t < k and big[t]:
            lit = (t, side == 1)
            clauses.append((lit, lit))

    def forbid_pair(t, u, side):
        # not both "t large in norm" and "u large in sigma" on this side
        if not (0 <= t < k and big[t]):
            return
        if not 0 <= u < k:
            forbid(t, side)
        elif big_sigma[u]:
            clauses.append(((t, side == 1), (u, side == 1)))

    for n in range(k + 1):
        forms = {1: d1.kinds[n], 2: d2.kinds[n]}
        if 0 < n < k:
            link_side[n] = 1 if (forms[2].top and vals.double[n] >= eps) else 2
        for side, f in forms.items():
            if f.top:
                if vals.double[n] >= eps:
                    forbid(n - 1, side)
                    forbid(n, side)
                continue
            if f.plus is ElemKind.I_PLUS:
                forbid(n, side)
            elif f.plus is ElemKind.E_PLUS:
                forbid_pair(n, n + 1, side)
            if f.minus is ElemKind.I_MINUS:
                forbid(n - 1, side)
            elif f.minus is ElemKind.E_MINUS:
                forbid_pair(n - 1, n - 2, side)
    placement = _solve_2sat(k, clauses, prefer=True)
    if placement is None:
        raise PreconditionViolated("no placement of the atom corners satisfies both DSFs")
    Y1 = np.zeros_like(Y.entries)
    for t in range(k):
        if not placement[t]:
            s = g.atom(t)
            Y1[s, s] = Y.entries[s, s]
    for n, side in link_side.items():
        if side == 1:
            Y1[g.atom(n - 1), g.atom(n)] = Y.entries[g.atom(n - 1), g.atom(n)]
    out1 = BlockOperator(g, Y1)
    out2 = BlockOperator(g, Y.entries - Y1)
    if not (eval_dsf(d1, out1, r) < eps and eval_dsf(d2, out2, r) < eps):
        raise PreconditionViolated("split failed to meet the bounds")
    return out1, out2
