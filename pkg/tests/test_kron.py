import itertools

import numpy as np
import pytest

from hsinkhorn.core import Grid1D, TensorGrid
from hsinkhorn.errors import LengthMismatch
from hsinkhorn.kron import (
    allones_kron_sum,
    build_factors,
    dense_factors,
    entrywise_exp_kron_sum_check,
    hadamard_kron_sum_check,
    kron_all,
    kron_matvec,
    kron_sum_all,
    mvm1,
    mvm2,
    standard_kron_sum,
)
from hsinkhorn.sinkhorn import cost_matrix


def test_scalar_sum():
    assert np.array_equal(allones_kron_sum([[2.0]], [[3.0]]), [[5.0]])


def test_zero_summand():
    B = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(allones_kron_sum(np.zeros((2, 2)), B), np.kron(np.ones((2, 2)), B))


def test_sum_index_formula(rng):
    A = rng.random((3, 3))
    B = rng.random((4, 4))
    S = allones_kron_sum(A, B)
    for i2, j2, i1, j1 in itertools.product(range(3), range(3), range(4), range(4)):
        assert S[i2 * 4 + i1, j2 * 4 + j1] == A[i2, j2] + B[i1, j1]


def test_identity_example():
    A2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = kron_matvec([np.eye(2), A2], np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.array_equal(out, [3.0, 4.0, 1.0, 2.0])


def test_single_factor(rng):
    A = rng.random((5, 5))
    w = rng.random(5)
    assert np.allclose(kron_matvec([A], w), A @ w, rtol=1e-15)


def test_three_factors(rng):
    fs = [rng.random((4, 4)) for _ in range(3)]
    w = rng.random(64)
    assert np.max(np.abs(kron_matvec(fs, w) - kron_all(fs) @ w)) <= 1e-12


def test_mixed_sizes_and_transpose(rng):
    fs = [rng.random((n, n)) for n in (2, 3, 5)]
    w = rng.random(30)
    K = kron_all(fs)
    assert np.allclose(kron_matvec(fs, w), K @ w, rtol=1e-13)
    assert np.allclose(kron_matvec(fs, w, use_transpose=True), K.T @ w, rtol=1e-13)


def test_length_mismatch(rng):
    with pytest.raises(LengthMismatch):
        kron_matvec([np.eye(2), np.eye(3)], np.ones(7))


def test_exp_identity_small():
    rng = np.random.default_rng(5)
    assert entrywise_exp_kron_sum_check([rng.random((2, 2)) for _ in range(2)])
    assert entrywise_exp_kron_sum_check([np.zeros((2, 2))] * 3)


def test_standard_sum_breaks_identity(rng):
    Cs = [rng.random((2, 2)) for _ in range(2)]
    assert not entrywise_exp_kron_sum_check(Cs, op=standard_kron_sum)


def test_kron_sum_order(rng):
    # factors [C1, C2] assemble C2 (+) C1 so axis 1 varies fastest
    C1, C2 = rng.random((2, 2)), rng.random((3, 3))
    assert np.array_equal(kron_sum_all([C1, C2]), allones_kron_sum(C2, C1))


def test_mvm2_matches_hadamard_oracle(rng):
    Cs = [rng.random((3, 3)), rng.random((4, 4))]
    Qs = [np.exp(-2.0 * C) for C in Cs]
    Qhats = [C * Q for C, Q in zip(Cs, Qs)]
    oracle = kron_sum_all(Cs) * kron_all(Qs)
    z = rng.random(12)
    assert np.max(np.abs(mvm2(Qs, Qhats, z) - oracle @ z)) <= 1e-12
    assert np.all(mvm2(Qs, Qhats, np.zeros(12)) == 0)


def test_mvm_single_axis(rng):
    grid = Grid1D.unit(64)
    fs = build_factors(TensorGrid((grid,)), lam=5.0)
    z = rng.random(64)
    assert np.array_equal(mvm1(fs.Q, z), fs.Q[0].matvec(z))
    assert np.array_equal(mvm2(fs.Q, fs.Qhat, z), fs.Qhat[0].matvec(z))


def test_constant_factors():
    ones = [np.ones((3, 3)), np.ones((4, 4))]
    assert np.all(mvm1(ones, np.ones(12)) == 12)


def test_hierarchical_two_axes_vs_dense(rng):
    grid = TensorGrid((Grid1D.unit(64), Grid1D.unit(64)))
    fs = build_factors(grid, lam=5.0, eps_tol=0.01, eta0=1.0)
    C = cost_matrix(grid)
    Q = np.exp(-5.0 * C)
    Qhat = C * Q
    for _ in range(5):
        z = rng.random(grid.n)
        for got, want in ((fs.apply_Q(z), Q @ z), (fs.apply_Qhat(z), Qhat @ z), (fs.apply_Qt(z), Q.T @ z)):
            assert np.linalg.norm(got - want) <= 2 * 0.01 * np.linalg.norm(want)


def test_dense_factors_match_cost_matrix():
    grid = TensorGrid((Grid1D.unit(3), Grid1D.unit(4), Grid1D.unit(2)))
    fs = dense_factors(grid, lam=3.0)
    C = cost_matrix(grid)
    assert np.allclose(kron_all(fs.Q), np.exp(-3.0 * C), rtol=1e-13, atol=0)


def test_hadamard_check(rng):
    assert hadamard_kron_sum_check([rng.random((2, 2)) for _ in range(3)], lam=1.5)
