import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nestkit import nest
from nestkit.corpus import random_dsf, random_grid, random_operator
from nestkit.errors import GridMismatch, NodeOutOfRange, PreconditionViolated
from nestkit.nest import BlockOperator, GridInterval, NestGrid
from nestkit.seminorms import (ALL_FORMS, DSF, J, ZERO, ElemKind, NodeSeminorm, NodeValues,
                               compatible, dsf_kill, e_raw_literal, eval_dsf, eval_elementary,
                               eval_nodes, greatest_dsf, join, meet, meet_dsf, node_forms, pair,
                               split_by_meet)

K = ElemKind
G = GridInterval
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_form_lattice():
    assert len(ALL_FORMS) == 10
    for a, b in itertools.product(ALL_FORMS, repeat=2):
        m, j = meet(a, b), join(a, b)
        assert m <= a and m <= b and a <= j and b <= j
        assert (a <= b) == (meet(a, b) == a)
    assert all(f <= J for f in ALL_FORMS) and all(ZERO <= f for f in ALL_FORMS)
    assert pair(K.I_MINUS, K.E_PLUS) < pair(K.I_MINUS, K.I_PLUS)
    assert not pair(K.I_MINUS) <= pair(plus=K.I_PLUS)
    assert len(node_forms(0, 3)) == 4 and len(node_forms(1, 3)) == 10
    with pytest.raises(ValueError):
        NodeSeminorm(K.I_PLUS, K.ZERO)


def test_dsf_endpoint_rules():
    g = NestGrid.uniform(2)
    with pytest.raises(ValueError):
        DSF(g, (pair(K.I_MINUS), ZERO, ZERO))
    with pytest.raises(ValueError):
        DSF(g, (ZERO, ZERO, pair(plus=K.E_PLUS)))
    with pytest.raises(ValueError):
        DSF(g, (ZERO, ZERO))
    d = DSF.constant(g, pair(K.I_MINUS, K.I_PLUS))
    assert d.kinds[0] == pair(plus=K.I_PLUS) and d.kinds[2] == pair(K.I_MINUS)


def test_elementary_examples():
    g = NestGrid.uniform(3)
    Z = BlockOperator.zeros(g)
    assert all(eval_elementary(k, Z, n) == 0 for k in K for n in range(4))
    I = BlockOperator.identity(g)
    assert eval_elementary(K.I_PLUS, I, 0) == pytest.approx(1)
    assert eval_elementary(K.I_MINUS, I, 0) == 0
    assert eval_elementary(K.I_PLUS, I, 3) == 0
    assert eval_elementary(K.J, I, 1) == pytest.approx(1)
    # at the ends j is the single end atom
    assert eval_elementary(K.J, BlockOperator(g, np.diag([5, 1, 2])), 0) == pytest.approx(5)
    with pytest.raises(NodeOutOfRange):
        eval_elementary(K.J, I, 4)


def test_e_plus_is_clamped_by_i_plus():
    g = NestGrid.uniform(3)
    X = BlockOperator(g, np.diag([0.5, 7.0, 1.0]))
    assert eval_elementary(K.E_PLUS, X, 0) == pytest.approx(0.5)
    assert eval_elementary(K.E_PLUS, X, 1) == pytest.approx(1.0)
    # no room on the right: the raw value is infinite and the clamp gives i+
    assert eval_elementary(K.E_PLUS, X, 2) == pytest.approx(1.0)
    assert eval_elementary(K.E_MINUS, X, 2) == pytest.approx(0.5)
    # with r = 1 every 1x1 atom is essentially zero, so e+ vanishes where a neighbour exists
    assert eval_elementary(K.E_PLUS, X, 0, r=1) == 0
    assert eval_elementary(K.E_PLUS, X, 2, r=1) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 2))
def test_simplified_e_matches_literal_formula(seed, r):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=6)
    X = random_operator(rng, g, complex_entries=True)
    r = min(r, g.dim - 1)
    vals = NodeValues(X, r)
    for n in range(g.k + 1):
        for side in (+1, -1):
            raw, lit = vals.e_raw(n, side), e_raw_literal(X, n, r, side)
            assert raw == lit or raw == pytest.approx(lit, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dsf_value_is_monotone_and_meet_is_max(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=5)
    X = random_operator(rng, g)
    d1, d2 = random_dsf(rng, g), random_dsf(rng, g)
    m = meet_dsf(d1, d2)
    assert eval_dsf(m, X) <= min(eval_dsf(d1, X), eval_dsf(d2, X)) + 1e-12
    assert eval_dsf(DSF.all_j(g), X) >= eval_dsf(d1, X) - 1e-12
    assert max(eval_nodes(d1, X)) == eval_dsf(d1, X)


def test_greatest_dsf_examples():
    g = NestGrid.uniform(3)
    assert greatest_dsf(BlockOperator.zeros(g), 1.0) == DSF.all_j(g)
    aI = BlockOperator(g, 2.0 * np.eye(3))
    assert greatest_dsf(aI, 2.0) == DSF.all_zero(g)
    with pytest.raises(PreconditionViolated):
        greatest_dsf(aI, 0.0)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_greatest_dsf_is_greatest(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=4)
    X = random_operator(rng, g)
    a = float(rng.uniform(0.1, 2.0)) * max(nest.op_norm(X), 1e-3)
    d = greatest_dsf(X, a)
    assert eval_dsf(d, X) < a
    vals = NodeValues(X, 0)
    # forms below a are closed under join (j dominates every other value), so
    # the chosen form must sit above each of them
    for n in range(g.k + 1):
        for f in node_forms(n, g.k):
            if vals.node_value(f, n) < a:
                assert f <= d.kinds[n]


def test_dsf_kill_examples():
    g = NestGrid.uniform(3)
    Z = BlockOperator.zeros(g)
    assert not dsf_kill(DSF.all_j(g), Z, 1.0).entries.any()
    rng = np.random.default_rng(3)
    X = random_operator(rng, g)
    assert dsf_kill(DSF.all_zero(g), X, 1e-9) == X
    with pytest.raises(PreconditionViolated):
        dsf_kill(DSF.all_j(g), X, 1e-9)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 1))
def test_dsf_kill_contract(seed, r):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=5, max_atom_size=3)
    X = random_operator(rng, g, complex_entries=True)
    d = random_dsf(rng, g)
    r = min(r, g.dim - 1)
    a = eval_dsf(d, X, r) * float(rng.uniform(1.001, 1.5)) + 1e-9
    T = dsf_kill(d, X, a, r)
    assert eval_dsf(d, T, r) <= 1e-9
    assert nest.op_norm(X - T) < a


def test_split_examples():
    g = NestGrid.uniform(3)
    rng = np.random.default_rng(5)
    Y = random_operator(rng, g)
    Y1, Y2 = split_by_meet(DSF.all_j(g), DSF.all_zero(g), Y, 0.1)
    assert not Y1.entries.any() and Y2 == Y
    Z = BlockOperator.zeros(g)
    Z1, Z2 = split_by_meet(DSF.all_j(g), DSF.all_j(g), Z, 0.1)
    assert not Z1.entries.any() and not Z2.entries.any()
    with pytest.raises(PreconditionViolated):
        split_by_meet(DSF.all_j(g), DSF.all_j(g), Y, 1e-6)
    with pytest.raises(GridMismatch):
        split_by_meet(DSF.all_j(g), DSF.all_j(NestGrid.uniform(2)), Y, 1.0)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_split_from_greatest_dsfs(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=5)
    A, B = random_operator(rng, g), random_operator(rng, g)
    eps = float(rng.uniform(0.2, 1.5))
    d1, d2 = greatest_dsf(A, eps), greatest_dsf(B, eps)
    Y = A + B
    if not eval_dsf(meet_dsf(d1, d2), Y) < eps:
        return
    Y1, Y2 = split_by_meet(d1, d2, Y, eps)
    assert np.allclose((Y1 + Y2).entries, Y.entries)
    assert eval_dsf(d1, Y1) < eps and eval_dsf(d2, Y2) < eps


def test_compatible_examples():
    g = NestGrid.uniform(3)
    full = [G(0, 3)]
    assert compatible(full, DSF.all_j(g))
    assert compatible(g.atoms(), DSF.all_zero(g))
    # atoms never straddle an inner node
    assert not compatible(g.atoms(), DSF(g, (J, J, ZERO, ZERO)))
    assert compatible(g.atoms(), DSF.constant(g, pair(K.I_MINUS, K.I_PLUS)))
    assert not compatible([G(0, 1)], DSF.constant(g, pair(plus=K.I_PLUS)))
    # e+ at node 0 is met by the run (1, 2), without a member starting at 0
    assert compatible([G(1, 2), G(2, 3)], DSF(g, (pair(plus=K.E_PLUS), ZERO, ZERO, ZERO)))
    with pytest.raises(GridMismatch):
        compatible([G(0, 4)], DSF.all_zero(g))
