"""Property suites, one per acceptance criterion.

Each suite draws a seeded corpus, checks its properties and returns a
:class:`SuiteResult`.  Instance counts default to the full acceptance sizes;
``size`` scales a suite down for quick runs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import covers, nest, nets, seminorms
from .corpus import (family_with_chain, random_chain_net, random_dsf, random_grid,
                     random_grid_family, random_operator, random_partition, refine_once)
from .errors import IncompatibleOrderTypes
from .intervals import Family, Interval, apply_order_map, refines


@dataclass
class SuiteResult:
    criterion: int
    name: str
    passed: bool = True
    stats: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    time_limit: float | None = None

    def fail(self, message: str):
        self.passed = False
        if len(self.failures) < 10:
            self.failures.append(message)

    def check(self, ok: bool, message: str):
        if not ok:
            self.fail(message)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.criterion}: {self.name} ({self.elapsed:.1f}s) {self.stats}"

    def to_json(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": self.passed,
                "stats": self.stats, "failures": self.failures,
                "elapsed": round(self.elapsed, 3), "time_limit": self.time_limit}


def _timed(criterion: int, name: str, limit: float | None = None):
    def wrap(fn: Callable[..., SuiteResult]):
        def run(seed: int = 0, size: int | None = None) -> SuiteResult:
            res = SuiteResult(criterion, name, time_limit=limit)
            start = time.perf_counter()
            fn(res, seed, size)
            res.elapsed = time.perf_counter() - start
            if limit is not None and res.elapsed > limit:
                res.fail(f"took {res.elapsed:.1f}s, limit {limit}s")
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([seed, criterion])


# --- criterion 1 -------------------------------------------------------------

def _search_grid(P: Family, base: Interval, need: int) -> list[Fraction]:
    refinements = 1
    pts = covers.endpoint_grid(P, base, refinements)
    while len(pts) - 2 < need and refinements < 6:
        refinements += 1
        pts = covers.endpoint_grid(P, base, refinements)
    return pts


def adversarial_outer_search(P: Family, base: Interval, m: int, attempts: int,
                             rng: np.random.Generator) -> tuple[int, list[Interval] | None]:
    """Random linked lists of ``m`` intervals covering ``base``; return one valid outer cover if hit.

    Endpoints are drawn from the refined endpoint grid and handled as grid
    indices, which preserves every order comparison.  A linked list with
    union ``base`` is ``a_1 = lo < a_2 < b_1 < a_3 < b_2 < ... < b_m = hi``,
    so ``2m - 2`` sorted interior points determine it.  Hits are confirmed
    with the exact validator.  Returns ``(attempts made, cover or None)``.
    """
    pts = _search_grid(P, base, 2 * m - 2)
    interior = len(pts) - 2
    if interior < 2 * m - 2:
        return 0, None
    index = {x: i for i, x in enumerate(pts)}
    U = np.array([index[F.lo] for F in P], dtype=np.int32)
    V = np.array([index[F.hi] for F in P], dtype=np.int32)
    last = len(pts) - 1
    chunk = 2500
    done = 0
    while done < attempts:
        N = min(chunk, attempts - done)
        keys = rng.random((N, interior))
        pick = np.argpartition(keys, 2 * m - 3, axis=1)[:, :2 * m - 2] if 2 * m - 2 < interior \
            else np.tile(np.arange(interior), (N, 1))
        pick.sort(axis=1)
        pos = (pick + 1).astype(np.int32)
        A = np.concatenate([np.zeros((N, 1), np.int32), pos[:, 0::2]], axis=1)
        B = np.concatenate([pos[:, 1::2], np.full((N, 1), last, np.int32)], axis=1)
        # the last a_i <= u carries the largest b_i, so it alone decides containment
        slot = (A[:, None, :] <= U[None, :, None]).sum(axis=2) - 1
        ok = (V[None, :] <= np.take_along_axis(B, slot, axis=1)).all(axis=1)
        done += N
        if ok.any():
            row = int(np.flatnonzero(ok)[0])
            cand = [Interval(pts[a], pts[b]) for a, b in zip(A[row], B[row])]
            if covers.validate_cover(covers.LinkedCover(tuple(cand), "outer", base, P)):
                return done, cand
    return done, None


def _random_subfamily(rng: np.random.Generator, P: Family, count: int) -> Family:
    """Random intervals inside random members of ``P`` (so the result refines ``P``)."""
    out = []
    members = P.intervals
    for _ in range(count):
        F = members[int(rng.integers(len(members)))]
        u, v = sorted(Fraction(int(x), 97) for x in rng.integers(0, 98, size=2))
        if u == v:
            continue
        out.append(Interval(F.lo + u * F.length, F.lo + v * F.length))
    return Family(tuple(out))


def _random_disjoint_setup(rng: np.random.Generator, k: int):
    """``k`` disjoint intervals in ``(0, 4k)`` and a family dominating none of them."""
    G = 4 * k
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, G), size=2 * k, replace=False))
    ds = [Interval(Fraction(cuts[2 * i]), Fraction(cuts[2 * i + 1])) for i in range(k)]
    base = Interval(Fraction(0), Fraction(G))
    members = []
    for _ in range(int(rng.integers(0, 2 * k + 1))):
        u = Fraction(int(rng.integers(0, 2 * G)), 2)
        v = u + Fraction(int(rng.integers(1, 9)), 2)
        if v <= G:
            E = Interval(u, v)
            if not any(E.contains(d) for d in ds):
                members.append(E)
    return Family(tuple(members)), base, ds


@_timed(1, "cover sizes", limit=60.0)
def suite_cover_sizes(res: SuiteResult, seed: int, size: int | None):
    """Inner/outer cover sizes, adversarial outer search, doubling, disjoint lower bound."""
    rng = _rng(seed, 1)
    count = size or 1000
    attempts = 10_000
    tried = hits = doubled = 0
    for i in range(count):
        P, base, n = family_with_chain(rng, 1, 12)
        chain = covers.r_chain(P, base)
        inner = covers.build_inner_cover(P, base)
        res.check(covers.validate_cover(inner) and len(inner) <= n + 2,
                  f"inner cover #{i} invalid or too large")
        outer = covers.build_outer_cover(P, base, chain)
        res.check(covers.validate_cover(outer) and len(outer) == n // 2 + 1
                  and covers.outer_bound_check(outer, chain), f"outer cover #{i} wrong")
        m = n + 2 + int(rng.integers(0, 2))
        made, found = adversarial_outer_search(P, base, m, attempts, rng)
        tried += made
        if found is not None:
            hits += 1
            res.fail(f"valid outer cover of size {m} > n+1 = {n + 1} found for #{i}")
        if len(outer) >= 2:
            theta, merged = covers.double_outer_cover(P, base, outer)
            ok = len(merged) == 2 * len(outer) - 1 and covers.validate_cover(merged)
            common = merged.against
            sub = _random_subfamily(rng, common, 4)
            ok = ok and refines(sub, P) and refines(sub, apply_order_map(theta, P)) and covers.validate_cover(
                covers.LinkedCover(merged.intervals, "outer", base, sub))
            res.check(ok, f"doubled cover #{i} wrong")
            doubled += 1
    disjoint_ok = 0
    for k in range(1, 11):
        for _ in range(max(1, count // 100)):
            Pd, base, ds = _random_disjoint_setup(rng, k)
            c = covers.outer_cover_from_disjoint(Pd, base, ds)
            ok = (len(c) >= math.ceil(k / 2) and covers.validate_cover(c)
                  and covers.validate_cover(covers.LinkedCover(c.intervals, "outer", base, Pd)))
            res.check(ok, f"outer cover from {k} disjoint intervals too small or invalid")
            disjoint_ok += ok
    res.stats.update(instances=count, adversarial_attempts=tried, adversarial_hits=hits,
                     doubled=doubled, disjoint_checked=disjoint_ok)


# --- criterion 2 -------------------------------------------------------------

def _random_family_in(rng: np.random.Generator, G: int) -> tuple[Family, Interval]:
    base = Interval(Fraction(0), Fraction(G))
    members = []
    for _ in range(int(rng.integers(0, 6))):
        u = int(rng.integers(0, G))
        v = int(rng.integers(u + 1, G + 1))
        members.append(Interval(Fraction(u), Fraction(v)))
    if rng.random() < 0.35:
        members.append(base)
    return Family(tuple(members)), base


@_timed(2, "one-element outer cover equivalence")
def suite_one_element(res: SuiteResult, seed: int, size: int | None):
    """No 2-element outer cover <=> [base] is an inner cover <=> all strict grid subintervals dominated."""
    rng = _rng(seed, 2)
    count = size or 500
    singles = 0
    for i in range(count):
        P, base = _random_family_in(rng, int(rng.integers(2, 13)))
        grid = covers.endpoint_grid(P, base)
        a = not covers.two_element_outer_cover_exists(P, base, grid)
        b = covers.base_is_inner_cover(P, base)
        c = covers.strict_subintervals_dominated(P, base, grid)
        res.check(a == b == c, f"#{i}: {P!r} on {base!r} gives {a}, {b}, {c}")
        singles += a
    res.stats.update(instances=count, one_element_cases=singles)


# --- criterion 3 -------------------------------------------------------------

@_timed(3, "order-compatible bijection")
def suite_bijection(res: SuiteResult, seed: int, size: int | None):
    """theta is increasing and carries the outer cover into the inner cover."""
    rng = _rng(seed, 3)
    count = size or 500
    compatible = raised = 0
    for i in range(count):
        P1, base1, n1 = family_with_chain(rng, 1, 12)
        P2, base2, n2 = family_with_chain(rng, 1, 6)
        outer = covers.build_outer_cover(P1, base1)
        inner = covers.build_inner_cover(P2, base2)
        try:
            theta = covers.order_compatible_bijection(outer, inner)
        except IncompatibleOrderTypes:
            raised += 1
            res.check(len(outer) < len(inner), f"#{i}: raised with |outer| >= |inner|")
            continue
        compatible += 1
        res.check(len(outer) >= len(inner), f"#{i}: no error with |outer| < |inner|")
        pts = theta.breakpoints
        increasing = all(a0 < a1 and b0 < b1 for (a0, b0), (a1, b1) in zip(pts, pts[1:]))
        image = apply_order_map(theta, Family(outer.intervals))
        res.check(increasing and refines(image, Family(inner.intervals)),
                  f"#{i}: image of the outer cover does not refine the inner cover")
    res.stats.update(instances=count, compatible=compatible, incompatible=raised)


# --- criterion 4 -------------------------------------------------------------

@_timed(4, "block expectation and partition quotient", limit=30.0)
def suite_partition_quotient(res: SuiteResult, seed: int, size: int | None):
    """dist(X, ker Delta_P) = ||Delta_P X|| = quotient estimate for the net [P]."""
    rng = _rng(seed, 4)
    count = size or 500
    worst = 0.0
    for i in range(count):
        blocks = int(rng.integers(2, 9))
        grid = random_grid(rng, max_atoms=16, max_atom_size=2, min_atoms=blocks)
        X = random_operator(rng, grid, complex_entries=bool(rng.random() < 0.5))
        P = random_partition(rng, grid, blocks)
        delta = nest.block_diag_expectation(P, X)
        target = nest.op_norm(delta)
        T = nets.partition_kernel_witness(P, X)
        in_kernel = not np.any(nest.block_diag_expectation(P, T).entries)
        oracle = nets.quotient_oracle_partition(P, X)
        estimate = nets.quotient_estimate(nets.IdealHandle(nets.NetChain(grid, (P,)), 0), X)
        # any other kernel element is no closer: perturb T inside the kernel
        S = random_operator(rng, grid)
        S = S - nest.block_diag_expectation(P, S)
        lower_ok = nest.op_norm(X - (T + S)) >= target - 1e-9
        idem = np.allclose(nest.block_diag_expectation(P, delta).entries, delta.entries, atol=0)
        err = max(abs(oracle - target), abs(estimate - target))
        worst = max(worst, err)
        res.check(in_kernel and lower_ok and idem and err <= 1e-9 and target <= nest.op_norm(X) + 1e-12,
                  f"#{i}: error {err:.2e}")
    res.stats.update(instances=count, worst_error=worst)


# --- criterion 5 -------------------------------------------------------------

@_timed(5, "Parrott and banded completion")
def suite_completion(res: SuiteResult, seed: int, size: int | None):
    """Parrott reaches max(row, column) and no searched D beats it; banded completion bound."""
    rng = _rng(seed, 5)
    small = size or 200
    banded = size or 500
    worst_excess = worst_gain = worst_band = 0.0
    for i in range(small):
        p, q = (int(x) for x in rng.integers(1, 3, size=2))
        M = rng.normal(size=(3, 3))
        A, B, C = M[:p, :q], M[:p, q:], M[p:, :q]
        D, value = nest.parrott_complete(A, B, C)
        achieved = nest.matrix_norm(np.block([[A, B], [C, D]]))
        # dense search: random D's at several scales plus perturbations of the returned D
        trials = np.concatenate([
            rng.normal(size=(4000,) + D.shape) * value * rng.choice([0.01, 0.1, 1.0, 3.0], size=(4000, 1, 1)),
            D.real[None] + rng.normal(size=(2000,) + D.shape) * 1e-3,
        ])
        full = np.zeros((len(trials), 3, 3))
        full[:, :p, :q], full[:, :p, q:], full[:, p:, :q] = A, B, C
        full[:, p:, q:] = trials
        best = float(np.linalg.svd(full, compute_uv=False)[:, 0].min())
        worst_excess = max(worst_excess, achieved - value)
        worst_gain = max(worst_gain, value - best)
        res.check(achieved - value <= 1e-9 and value - best <= 1e-6, f"Parrott #{i}")
    for i in range(banded):
        grid = random_grid(rng, max_atoms=8, max_atom_size=3, min_atoms=2)
        X = random_operator(rng, grid, complex_entries=bool(rng.random() < 0.3))
        inner = sorted(int(c) for c in rng.choice(np.arange(1, grid.k), size=int(rng.integers(0, grid.k)), replace=False))
        chain = [0] + inner + [grid.k]
        T = nest.banded_completion(X, chain)
        bound = max(nest.double_block_norms(X, chain))
        gap = nest.op_norm(X - T) - bound
        bounds = [grid.cuts[c] for c in chain]
        m = len(bounds) - 1
        band_ok = all(not np.any(T.entries[bounds[p]:bounds[p + 1], :bounds[min(p + 2, m)]])
                      for p in range(m))
        worst_band = max(worst_band, gap)
        res.check(band_ok and gap <= 1e-8, f"banded #{i}: gap {gap:.2e}, band {band_ok}")
    res.stats.update(parrott_instances=small, banded_instances=banded,
                     worst_parrott_excess=worst_excess, best_search_gain=worst_gain,
                     worst_banded_excess=worst_band)


# --- criterion 6 -------------------------------------------------------------

def _bump_ok(d: seminorms.DSF, vals: seminorms.NodeValues, a: float) -> bool:
    k = d.grid.k
    for n, f in enumerate(d.kinds):
        for g in seminorms.node_forms(n, k):
            if f < g and vals.node_value(g, n) < a:
                return False
    return True


@_timed(6, "diagonal seminorm functions")
def suite_dsf(res: SuiteResult, seed: int, size: int | None):
    """Clamped order, greatest DSF maximality, DSF kill, and the all-j quotient identity."""
    rng = _rng(seed, 6)
    target_evals = 100_000 if size is None else 200 * size
    count = size or 500
    evals = literal_checked = 0
    E = seminorms.ElemKind
    while evals < target_evals:
        grid = random_grid(rng, max_atoms=6, max_atom_size=3)
        X = random_operator(rng, grid)
        r = int(rng.integers(0, min(3, grid.dim)))
        vals = seminorms.NodeValues(X, r)
        top = nest.op_norm(X) + 1e-12
        for n in range(grid.k + 1):
            v = {kind: vals.value(kind, n) for kind in E}
            ok = (0 <= v[E.E_PLUS] <= v[E.I_PLUS] <= v[E.J] <= top
                  and 0 <= v[E.E_MINUS] <= v[E.I_MINUS] <= v[E.J])
            res.check(ok, f"order violated at node {n}: {v}")
            evals += 1
        if literal_checked < 2000:
            for n in range(grid.k + 1):
                for side in (1, -1):
                    lit = seminorms.e_raw_literal(X, n, r, side)
                    res.check(lit == vals.e_raw(n, side) or abs(lit - vals.e_raw(n, side)) <= 1e-12,
                              "simplified raw e-value disagrees with the literal one")
            literal_checked += 1
    worst_kill = worst_identity = 0.0
    for i in range(count):
        grid = random_grid(rng, max_atoms=6, max_atom_size=3)
        X = random_operator(rng, grid)
        r = int(rng.integers(0, min(2, grid.dim)))
        a = float(rng.uniform(0.1, 1.2)) * nest.op_norm(X) + 1e-9
        d = seminorms.greatest_dsf(X, a, r)
        vals = seminorms.NodeValues(X, r)
        res.check(seminorms.eval_dsf(d, X, r) < a and _bump_ok(d, vals, a), f"greatest DSF #{i}")
        T = seminorms.dsf_kill(d, X, a, r)
        dist = nest.op_norm(X - T)
        killed = seminorms.eval_dsf(d, T, r)
        worst_kill = max(worst_kill, killed)
        res.check(killed <= 1e-9 and dist <= a + 1e-8, f"kill #{i}: eval {killed:.2e}, dist {dist} vs {a}")
        dj = seminorms.DSF.all_j(grid)
        jmax = seminorms.eval_dsf(dj, X, 0)
        Tj = seminorms.dsf_kill(dj, X, jmax * (1 + 1e-6) + 1e-12, 0)
        gap = abs(nest.op_norm(X - Tj) - jmax)
        worst_identity = max(worst_identity, gap)
        res.check(gap <= 1e-8 and seminorms.eval_dsf(dj, Tj, 0) == 0.0, f"all-j identity #{i}: gap {gap:.2e}")
    res.stats.update(order_evaluations=evals, literal_cross_checks=literal_checked, instances=count,
                     worst_killed_value=worst_kill, worst_identity_gap=worst_identity)


# --- criterion 7 -------------------------------------------------------------

@_timed(7, "compatibility equivalence")
def suite_compatibility(res: SuiteResult, seed: int, size: int | None):
    """eval(d, T) < eps => compatible(P_{T,eps}, d) => eval(d, T) <= eps, at r = 0."""
    rng = _rng(seed, 7)
    count = size or 500
    forward = backward = 0
    for i in range(count):
        grid = random_grid(rng, max_atoms=6, max_atom_size=2)
        T = random_operator(rng, grid)
        eps = float(rng.uniform(0.05, 1.0)) * nest.op_norm(T) + 1e-9
        P = nets.induced_family(T, eps, 0)
        ds = [seminorms.greatest_dsf(T, eps, 0)] + [random_dsf(rng, grid) for _ in range(5)]
        for d in ds:
            value = seminorms.eval_dsf(d, T, 0)
            comp = seminorms.compatible(P, d)
            if value < eps:
                forward += 1
                res.check(comp, f"#{i}: value {value} < eps but not compatible")
            if comp:
                backward += 1
                res.check(value <= eps, f"#{i}: compatible but value {value} > eps")
    res.stats.update(instances=count, forward_cases=forward, backward_cases=backward)


# --- criterion 8 -------------------------------------------------------------

@_timed(8, "net arithmetic")
def suite_net_arithmetic(res: SuiteResult, seed: int, size: int | None):
    """Sum-net limit is the max of limits; product-net membership matches the Delta certificate."""
    rng = _rng(seed, 8)
    count = size or 500
    members = 0
    for i in range(count):
        grid = random_grid(rng, max_atoms=7, max_atom_size=2, min_atoms=2)
        n1 = random_chain_net(rng, grid, int(rng.integers(1, 4)))
        n2 = random_chain_net(rng, grid, int(rng.integers(1, 4)))
        X = random_operator(rng, grid)
        r = int(rng.integers(0, 2))
        s = nets.limit_seminorm(nets.sum_net(n1, n2), X, r)
        res.check(s == max(nets.limit_seminorm(n1, X, r), nets.limit_seminorm(n2, X, r)),
                  f"#{i}: sum-net limit is not the max")
        P1 = random_partition(rng, grid, int(rng.integers(1, grid.k + 1)))
        P2 = random_partition(rng, grid, int(rng.integers(1, grid.k + 1)))
        if i % 2 == 0:
            # a genuine member: T1 + T2 with Delta_{P1} T1 = 0 and Delta_{P2} T2 = 0
            A, B = random_operator(rng, grid), random_operator(rng, grid)
            X = (A - nest.block_diag_expectation(P1, A)) + (B - nest.block_diag_expectation(P2, B))
        h = nets.IdealHandle(nets.product_net(nets.NetChain(grid, (P1,)), nets.NetChain(grid, (P2,))), 0, 1e-9)
        member = nets.membership(h, X)
        T2 = nest.block_diag_expectation(P1, X)
        T1 = X - T2
        certified = (not np.any(nest.block_diag_expectation(P1, T1).entries)
                     and nest.op_norm(nest.block_diag_expectation(P2, T2)) <= 1e-9)
        res.check(member == certified, f"#{i}: membership {member} vs certificate {certified}")
        if i % 2 == 0:
            res.check(member, f"#{i}: constructed member rejected")
        members += member
    res.stats.update(instances=count, product_members=members)


# --- criterion 9 -------------------------------------------------------------

def _extend(rng: np.random.Generator, n: nets.NetChain, extra: int) -> nets.NetChain:
    fams = list(n.families)
    for _ in range(extra):
        fams.append(refine_once(rng, fams[-1]))
    return nets.NetChain(n.grid, tuple(fams))


@_timed(9, "cofinality")
def suite_cofinality(res: SuiteResult, seed: int, size: int | None):
    """Cofinal => limit inequality; constructed non-cofinal pairs are separated by a witness."""
    rng = _rng(seed, 9)
    pairs = size or 200
    separated = 0
    sampled = cofinal_pairs = 0
    for i in range(pairs):
        grid = random_grid(rng, max_atoms=6, max_atom_size=2, min_atoms=2)
        n2 = random_chain_net(rng, grid, int(rng.integers(1, 4)))
        n1 = _extend(rng, n2, int(rng.integers(0, 3))) if i % 2 == 0 else random_chain_net(rng, grid, 2)
        if i % 2 == 0:
            res.check(nets.cofinal_check(n1, n2), f"#{i}: extension not cofinal")
        if nets.cofinal_check(n1, n2):
            cofinal_pairs += 1
            for _ in range(10):
                X = random_operator(rng, grid)
                r = int(rng.integers(0, 2))
                sampled += 1
                res.check(nets.limit_seminorm(n1, X, r) <= nets.limit_seminorm(n2, X, r) + 1e-12,
                          f"#{i}: cofinal but limit inequality fails")
    built = 0
    while built < (size or 100):
        grid = random_grid(rng, max_atoms=6, max_atom_size=2, min_atoms=2)
        n1 = random_chain_net(rng, grid, int(rng.integers(1, 4)))
        n2 = random_chain_net(rng, grid, int(rng.integers(1, 4)))
        if nets.cofinal_check(n1, n2):
            continue
        built += 1
        W = nets.separating_witness(n1, n2)
        inside = nets.membership(nets.IdealHandle(n2, 0, 1e-9), W)
        outside = nets.limit_seminorm(n1, W, 0) >= 1 - 1e-10
        res.check(inside and outside, f"non-cofinal pair {built}: witness fails")
        separated += inside and outside
    res.stats.update(pairs=pairs, cofinal_pairs=cofinal_pairs, sampled_operators=sampled,
                     non_cofinal_pairs=built, separated=separated)


# --- criterion 10 ------------------------------------------------------------

def _random_targets(rng, grid, Q, mode):
    k = grid.k
    out = []
    edge = 0
    while edge < k:
        s = int(rng.integers(edge, k))
        e = int(rng.integers(s + 1, min(k, s + 3) + 1))
        edge = e
        if mode == "plain":
            guard = nest.GridInterval(s, e)
        elif mode == "right_open":
            guard = nest.GridInterval(s, e + 1) if e < k else None
        else:
            guard = nest.GridInterval(s - 1, e) if s > 0 else None
        if guard is None or not any(F.contains(guard) for F in Q):
            out.append(nest.GridInterval(s, e))
    return out


def _dominating(grid, t, mode):
    k = grid.k
    if mode == "plain":
        need = t
    elif mode == "right_open":
        if t.stop == k:
            return []
        need = nest.GridInterval(t.start, t.stop + 1)
    else:
        if t.start == 0:
            return []
        need = nest.GridInterval(t.start - 1, t.stop)
    return [E for E in grid.grid_intervals() if E.contains(need)]


@_timed(10, "transfer witnesses")
def suite_witness(res: SuiteResult, seed: int, size: int | None):
    """Partial isometry, exact zero Q-compressions, unit norm on dominating compressions."""
    rng = _rng(seed, 10)
    count = size or 300
    checked = 0
    modes = ("plain", "right_open", "left_open")
    for i in range(count):
        mode = modes[i % 3]
        grid = random_grid(rng, max_atoms=8, max_atom_size=3, min_atoms=2)
        Q = random_grid_family(rng, grid, int(rng.integers(0, grid.k + 1)))
        targets = _random_targets(rng, grid, Q, mode)
        rank = 1 + int(rng.random() < 0.3 and min(np.diff(grid.cuts)) >= 2)
        X = nest.build_witness(grid, Q, mode, targets, rank=rank)
        XtX = X.entries.conj().T @ X.entries
        iso = np.abs(XtX @ XtX - XtX).max() <= 1e-10
        zero = all(not np.any(nest.corner(X, F)) for F in Q)
        doms = [E for t in targets for E in _dominating(grid, t, mode)]
        strong = all(nest.sigma(nest.corner(X, E), rank - 1) >= 1 - 1e-10 for E in doms)
        checked += len(doms)
        res.check(iso and zero and strong, f"#{i} ({mode}): iso {iso}, zero {zero}, norms {strong}")
    res.stats.update(instances=count, dominating_compressions=checked)


SUITES = {
    1: suite_cover_sizes, 2: suite_one_element, 3: suite_bijection, 4: suite_partition_quotient,
    5: suite_completion, 6: suite_dsf, 7: suite_compatibility, 8: suite_net_arithmetic,
    9: suite_cofinality, 10: suite_witness,
}


def run_all(seed: int = 0, size: int | None = None, criteria=None) -> list[SuiteResult]:
    return [SUITES[c](seed, size) for c in (criteria or sorted(SUITES))]
