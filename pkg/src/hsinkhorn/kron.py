"""Kronecker-structured products over tensor grids.

A factor list ``[A1, ..., Ad]`` stands for ``Ad x ... x A1`` acting on
vectors linearized with axis 1 fastest (column stacking). Factors are
either dense arrays (oracles, tests) or :class:`~hsinkhorn.hmatrix.HMatrix`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import LengthMismatch
from .hmatrix import HMatrix, build_hmatrix
from .kernels import RegularizedKernel, Cost1D, KAPPA, KAPPA_HAT


def allones_kron_sum(A, B):
    """``A (+) B = A x J_q + J_p x B`` with all-ones ``J``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    p, q = A.shape[0], B.shape[0]
    return np.kron(A, np.ones((q, q))) + np.kron(np.ones((p, p)), B)


def standard_kron_sum(A, B):
    """The usual Kronecker sum ``A x I_q + I_p x B`` (for contrast in tests)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return np.kron(A, np.eye(B.shape[0])) + np.kron(np.eye(A.shape[0]), B)


def kron_sum_all(factors, op=allones_kron_sum):
    """``Cd (+) ... (+) C1`` for ``factors = [C1, ..., Cd]``."""
    return reduce(lambda acc, C: op(C, acc), factors[1:], np.asarray(factors[0], dtype=float))


def kron_all(factors):
    """Dense ``Ad x ... x A1`` for ``factors = [A1, ..., Ad]``."""
    return reduce(lambda acc, A: np.kron(A, acc), factors[1:], np.asarray(factors[0], dtype=float))


def _size(A):
    return A.n if isinstance(A, HMatrix) else A.shape[0]


def _apply(A, X, transpose):
    if isinstance(A, HMatrix):
        return A.rmatvec(X) if transpose else A.matvec(X)
    return (A.T if transpose else A) @ X


def kron_matvec(factors, w, use_transpose=False):
    """``(Ad x ... x A1) @ w`` by one sweep per axis, never forming the product.

    Each sweep multiplies the factor for that axis against every fiber along
    the axis at once: ``prod(n_j, j != k)`` one-dimensional matvecs.
    """
    shape = tuple(_size(A) for A in factors)
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size != int(np.prod(shape)):
        raise LengthMismatch(f"vector of length {w.size} for factor sizes {shape}")
    if len(factors) == 1:
        return _apply(factors[0], w, use_transpose)
    T = w.reshape(shape, order="F")
    for k in reversed(range(len(factors))):
        front = np.moveaxis(T, k, 0)
        rest = front.shape[1:]
        out = _apply(factors[k], front.reshape(shape[k], -1), use_transpose)
        T = np.moveaxis(out.reshape((shape[k],) + rest), 0, k)
    return T.reshape(-1, order="F")


def mvm1(Q_factors, z, use_transpose=False):
    """``Q @ z`` with ``Q = Q(d) x ... x Q(1)``."""
    return kron_matvec(Q_factors, z, use_transpose)


def mvm2(Q_factors, Qhat_factors, z, use_transpose=False):
    """``Qhat @ z`` as the sum over k of Kronecker products with factor k hatted."""
    if len(Q_factors) != len(Qhat_factors):
        raise LengthMismatch("Q and Qhat factor lists differ in length")
    for A, B in zip(Q_factors, Qhat_factors):
        if _size(A) != _size(B):
            raise LengthMismatch("Q and Qhat factors differ in size")
    total = None
    for k in range(len(Q_factors)):
        mixed = list(Q_factors)
        mixed[k] = Qhat_factors[k]
        term = kron_matvec(mixed, z, use_transpose)
        total = term if total is None else total + term
    return total


def entrywise_exp_kron_sum_check(C_factors, lam=1.0, op=allones_kron_sum, atol=1e-12):
    """True iff ``exp[-lam (Cd (+) ... (+) C1)] == exp[-lam Cd] x ... x exp[-lam C1]``."""
    lhs = np.exp(-lam * kron_sum_all(C_factors, op))
    rhs = kron_all([np.exp(-lam * np.asarray(C, dtype=float)) for C in C_factors])
    return lhs.shape == rhs.shape and bool(np.max(np.abs(lhs - rhs)) <= atol)


def hadamard_kron_sum_check(C_factors, lam=1.0, atol=1e-12):
    """True iff ``(Cd (+) ... (+) C1) * (Qd x ... x Q1)`` equals the sum of hatted products."""
    Cs = [np.asarray(C, dtype=float) for C in C_factors]
    Qs = [np.exp(-lam * C) for C in Cs]
    Qhats = [C * Q for C, Q in zip(Cs, Qs)]
    lhs = kron_sum_all(Cs) * kron_all(Qs)
    rhs = sum(kron_all([Qhats[m] if m == k else Qs[m] for m in range(len(Cs))]) for k in range(len(Cs)))
    return bool(np.max(np.abs(lhs - rhs)) <= atol)


@dataclass(frozen=True, eq=False)
class KernelFactorSet:
    """The d factors of ``Q`` and of the hatted kernels, one pair per axis."""

    Q: tuple
    Qhat: tuple

    @property
    def shape(self):
        return tuple(_size(A) for A in self.Q)

    def apply_Q(self, z):
        return mvm1(self.Q, z)

    def apply_Qt(self, z):
        return mvm1(self.Q, z, use_transpose=True)

    def apply_Qhat(self, z):
        return mvm2(self.Q, self.Qhat, z)

    def storage(self):
        return sum(A.storage() if isinstance(A, HMatrix) else A.size for A in self.Q + self.Qhat)


def build_factors(grid_x, grid_y=None, lam=50.0, p=2.0, eps_tol=0.01, eta0=None, n_min=32,
                  smoothness=None):
    """H-matrix factors for every axis of two tensor grids (``grid_y`` defaults to ``grid_x``)."""
    grid_y = grid_x if grid_y is None else grid_y
    if grid_x.shape != grid_y.shape:
        raise LengthMismatch(f"grid shapes differ: {grid_x.shape} vs {grid_y.shape}")
    cost = Cost1D(p)
    Q, Qhat = [], []
    for ax, ay in zip(grid_x.axes, grid_y.axes):
        kern = RegularizedKernel(cost, lam, KAPPA)
        H = build_hmatrix(kern, ax, ay, eps_tol, eta0, n_min, smoothness)
        # both kernels share smoothness constants, hence the same partition and ranks
        Hhat = build_hmatrix(kern.hat(), ax, ay, eps_tol, H.eta0, n_min, smoothness,
                             partition=H.root)
        Q.append(H)
        Qhat.append(Hhat)
    return KernelFactorSet(tuple(Q), tuple(Qhat))


def dense_factors(grid_x, grid_y=None, lam=50.0, p=2.0):
    """Exact dense per-axis kernel matrices (oracle counterpart of :func:`build_factors`)."""
    grid_y = grid_x if grid_y is None else grid_y
    cost = Cost1D(p)
    Q, Qhat = [], []
    for ax, ay in zip(grid_x.axes, grid_y.axes):
        C = cost.matrix(ax.points, ay.points)
        Qk = np.exp(-lam * C)
        Q.append(Qk)
        Qhat.append(C * Qk)
    return KernelFactorSet(tuple(Q), tuple(Qhat))
