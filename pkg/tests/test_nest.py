import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nestkit import nest
from nestkit.corpus import random_grid, random_operator
from nestkit.errors import (BadChain, GridMismatch, OverlappingIntervals, PreconditionViolated,
                            RankOutOfRange, ShapeMismatch)
from nestkit.nest import BlockOperator, GridInterval, NestGrid

G = GridInterval
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def diag_op(*values):
    g = NestGrid.uniform(len(values))
    return BlockOperator(g, np.diag(values))


def test_grid_validation():
    with pytest.raises(ValueError):
        NestGrid(3, (0, 2, 2, 3))
    with pytest.raises(ValueError):
        NestGrid(3, (0, 1, 2))
    g = NestGrid(5, (0, 2, 5))
    assert g.k == 2 and g.span(0, 2) == slice(0, 5)


def test_operator_must_be_block_upper_triangular():
    g = NestGrid(2, (0, 1, 2))
    with pytest.raises(ValueError):
        BlockOperator(g, [[1, 0], [1, 1]])
    # inside a single atom anything goes
    BlockOperator(NestGrid(2, (0, 2)), [[1, 0], [1, 1]])
    with pytest.raises(ShapeMismatch):
        BlockOperator(g, np.eye(3))


def test_compress_examples():
    rng = np.random.default_rng(0)
    g = NestGrid.uniform(4, 2)
    X = random_operator(rng, g)
    assert nest.compress(G(0, 4), X) == X
    assert not nest.compress(G(2, 4), nest.compress(G(0, 2), X)).entries.any()
    assert nest.compress(G(1, 2), nest.compress(G(0, 3), X)) == nest.compress(G(1, 2), X)
    with pytest.raises(GridMismatch):
        nest.compress(G(0, 5), X)


def test_norm_examples():
    assert nest.op_norm(BlockOperator.identity(NestGrid.uniform(3))) == pytest.approx(1.0)
    X = diag_op(3, 2, 1)
    assert nest.op_norm(X) == pytest.approx(3.0)
    assert nest.r_ess_norm(X, 1) == pytest.approx(2.0)
    assert nest.r_ess_norm(X, 0) == nest.op_norm(X)
    with pytest.raises(RankOutOfRange):
        nest.r_ess_norm(X, 3)
    g = NestGrid(3, (0, 3))
    rank_one = BlockOperator(g, np.outer([1, 2, 3], [1, 0, 1]))
    assert nest.r_ess_norm(rank_one, 1) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_r_ess_is_the_distance_to_rank_r(seed):
    # oracle: truncated SVD attains the distance and Eckart-Young says nothing beats it
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=4, max_atom_size=3)
    X = random_operator(rng, g, complex_entries=True)
    values = [nest.r_ess_norm(X, r) for r in range(g.dim)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    for r in range(g.dim):
        u, s, vh = np.linalg.svd(X.entries)
        approx = (u[:, :r] * s[:r]) @ vh[:r]
        assert np.linalg.norm(X.entries - approx, 2) == pytest.approx(values[r], abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_interval_factorization(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=5)
    A, X, B = (random_operator(rng, g) for _ in range(3))
    s = int(rng.integers(0, g.k))
    E = G(s, int(rng.integers(s + 1, g.k + 1)))
    lhs = nest.compress(E, A @ X @ B)
    rhs = nest.compress(E, A) @ nest.compress(E, X) @ nest.compress(E, B)
    assert np.allclose(lhs.entries, rhs.entries, atol=1e-10)
    assert nest.op_norm(lhs) <= nest.op_norm(A) * nest.op_norm(nest.compress(E, X)) * nest.op_norm(B) + 1e-9
    assert nest.op_norm(nest.compress(E, X)) <= nest.op_norm(X) + 1e-12


def test_block_diag_expectation_examples():
    rng = np.random.default_rng(1)
    g = NestGrid.uniform(3, 2)
    X = random_operator(rng, g)
    assert nest.block_diag_expectation([G(0, 3)], X) == X
    strictly_upper = BlockOperator(g, X.entries - nest.block_diag_expectation(g.atoms(), X).entries)
    assert not nest.block_diag_expectation(g.atoms(), strictly_upper).entries.any()
    with pytest.raises(OverlappingIntervals):
        nest.block_diag_expectation([G(0, 2), G(1, 3)], X)
    P = [G(0, 1), G(1, 3)]
    D = nest.block_diag_expectation(P, X)
    assert nest.block_diag_expectation(P, D) == D
    assert nest.op_norm(D) == pytest.approx(max(nest.op_norm(nest.compress(E, X)) for E in P))


def test_parrott_examples():
    D, v = nest.parrott_complete([[1]], [[0]], [[0]])
    assert v == pytest.approx(1) and nest.matrix_norm(np.block([[1, 0], [0, D[0, 0]]])) <= 1 + 1e-12
    D, v = nest.parrott_complete([[0]], [[1]], [[1]])
    assert v == pytest.approx(1) and abs(D[0, 0]) < 1e-12
    D, v = nest.parrott_complete(np.zeros((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)))
    assert v == 0 and not D.any()
    with pytest.raises(ShapeMismatch):
        nest.parrott_complete(np.zeros((2, 2)), np.zeros((1, 1)), np.zeros((1, 2)))


def test_parrott_forced_zero_by_hand():
    # [[0, 1], [1, d]] has singular values solving s^2 - |d| s - 1 = 0, so the
    # norm is 1 only for d = 0
    for d in (0.1, -0.3, 0.5j):
        M = np.array([[0, 1], [1, d]])
        assert nest.matrix_norm(M) > 1 + abs(d) / 3


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_parrott_reaches_the_lower_bound(seed):
    rng = np.random.default_rng(seed)
    p, q, t, s = (int(x) for x in rng.integers(0, 4, size=4))
    A = rng.normal(size=(p, q)) + 1j * rng.normal(size=(p, q))
    B = rng.normal(size=(p, s))
    C = rng.normal(size=(t, q))
    D, value = nest.parrott_complete(A, B, C)
    full = np.zeros((p + t, q + s), dtype=complex)
    full[:p, :q], full[:p, q:], full[p:, :q], full[p:, q:] = A, B, C, D
    assert nest.matrix_norm(full) <= value + 1e-9
    assert value == pytest.approx(max(nest.matrix_norm(np.hstack([A, B])) if p else 0.0,
                                      nest.matrix_norm(np.vstack([A, C])) if q else 0.0))


def test_banded_completion_examples():
    g = NestGrid.uniform(4)
    banded = BlockOperator(g, np.triu(np.tril(np.arange(1, 17).reshape(4, 4), 1)))
    T = nest.banded_completion(banded, [0, 1, 2, 3, 4])
    assert nest.op_norm(banded - T) <= max(nest.double_block_norms(banded, [0, 1, 2, 3, 4])) + 1e-9
    assert not np.triu(T.entries, 0)[np.triu(np.tril(np.ones((4, 4)), 1)) > 0].any()
    # support far from the diagonal: every double block of X is zero, so T = X
    far = np.zeros((4, 4))
    far[0, 3] = 2.0
    Xf = BlockOperator(g, far)
    Tf = nest.banded_completion(Xf, [0, 1, 2, 3, 4])
    assert np.allclose(Tf.entries, far) and nest.op_norm(Xf - Tf) < 1e-12
    with pytest.raises(BadChain):
        nest.banded_completion(Xf, [1, 4])
    with pytest.raises(BadChain):
        nest.banded_completion(Xf, [0, 2, 2, 4])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_banded_completion_bound(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, max_atoms=7, min_atoms=2)
    X = random_operator(rng, g, complex_entries=True)
    inner = sorted(int(c) for c in rng.choice(np.arange(1, g.k), size=int(rng.integers(0, g.k)), replace=False))
    chain = [0] + inner + [g.k]
    T = nest.banded_completion(X, chain)
    assert nest.op_norm(X - T) <= max(nest.double_block_norms(X, chain)) + 1e-8
    # lower bound: T vanishes on each double block, so X - T keeps those corners
    assert nest.op_norm(X - T) >= max(nest.double_block_norms(X, chain)) - 1e-9


def test_witness_example_crossing_a_cut():
    g = NestGrid.uniform(2)
    X = nest.build_witness(g, [G(0, 1), G(1, 2)], "plain", [G(0, 2)])
    assert X.entries.tolist() == [[0, 1], [0, 0]]
    assert not nest.corner(X, G(0, 1)).any() and not nest.corner(X, G(1, 2)).any()
    assert nest.op_norm(nest.compress(G(0, 2), X)) == pytest.approx(1)
    assert not nest.build_witness(g, [], "plain", []).entries.any()
    with pytest.raises(PreconditionViolated):
        nest.build_witness(g, [G(0, 2)], "plain", [G(0, 1)])


def test_witness_modes():
    g = NestGrid.uniform(4)
    R = nest.build_witness(g, [G(0, 2)], "right_open", [G(0, 2)])
    assert R.entries[0, 2] == 1 and nest.op_norm(nest.compress(G(0, 3), R)) == pytest.approx(1)
    assert not nest.compress(G(0, 2), R).entries.any()
    L = nest.build_witness(g, [G(2, 4)], "left_open", [G(2, 4)])
    assert L.entries[1, 3] == 1
    with pytest.raises(PreconditionViolated):
        nest.build_witness(g, [G(0, 3)], "right_open", [G(0, 2)])
    with pytest.raises(PreconditionViolated):
        nest.build_witness(g, [], "plain", [G(0, 2), G(1, 3)])
