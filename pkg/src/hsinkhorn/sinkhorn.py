"""Sinkhorn matrix scaling and the Sinkhorn divergence.

The solver only sees the kernel through matvec callables, so the same loop
runs against dense ``exp(-lam*C)`` and against Kronecker/H-matrix factors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import Grid1D, ProbabilityVector, TensorGrid
from .errors import LengthMismatch, MaxIterExceeded, NonpositiveDenominator, ValidationError
from .kernels import Cost1D
from .kron import build_factors
from .wasserstein1d import w2_1d


@dataclass(frozen=True)
class SinkhornConfig:
    lam: float = 50.0
    eps_s: float = 0.01
    max_iter: int = 10_000
    p: float = 2.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("lambda must be positive")
        if not self.eps_s > 0:
            raise ValidationError("eps_s must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValidationError("max_iter must be a positive integer")
        if not self.p >= 1:
            raise ValidationError("p must be >= 1")


@dataclass(eq=False)
class SinkhornState:
    u: np.ndarray
    v: np.ndarray
    iterations: int
    residual: float
    trace: list = field(default_factory=list)

    def write_trace(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "residual"])
            w.writerows(self.trace)


def _values(f):
    return f.values if isinstance(f, ProbabilityVector) else np.asarray(f, dtype=float)


def _scale(target, denom, which):
    """``target / denom`` with zero output wherever the target mass is zero.

    A nonpositive denominator under a positive target is fatal. Under a zero
    target it is tolerated: the row carries no mass in any scaling, and
    H-matrix error routinely drives such far-field entries to about -1e-12.
    """
    pos = denom > 0
    bad = ~pos & (target > 0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NonpositiveDenominator(
            f"{which} has {int(bad.sum())} nonpositive entries under positive mass "
            f"(first at {i}: {denom[i]!r}); lambda may be too large for the kernel approximation"
        )
    if pos.all():
        return target / denom
    out = np.zeros_like(target)
    np.divide(target, denom, out=out, where=pos)
    return out


def sinkhorn_scaling(f, g, apply_Q, apply_Qt, cfg=SinkhornConfig()):
    """Alternate ``u = f / (Q v)``, ``v = g / (Q^T u)`` until both marginals are within ``eps_s``.

    Starts from ``u = 1/n`` and ``v = g / (Q^T u)``. The ``Q v`` computed for
    the stopping test is reused by the next ``u`` update, so each iteration
    costs two matvecs.
    """
    fv, gv = _values(f), _values(g)
    n = fv.size
    if gv.size != n:
        raise LengthMismatch(f"f has length {n}, g has length {gv.size}")
    u = np.full(n, 1.0 / n)
    v = _scale(gv, apply_Qt(u), "Q^T u")
    Qv = apply_Q(v)
    trace = []
    residual = np.inf
    for it in range(1, cfg.max_iter + 1):
        u = _scale(fv, Qv, "Q v")
        Qtu = apply_Qt(u)
        v = _scale(gv, Qtu, "Q^T u")
        Qv = apply_Q(v)
        residual = max(np.max(np.abs(u * Qv - fv)), np.max(np.abs(v * Qtu - gv)))
        trace.append((it, float(residual)))
        if residual <= cfg.eps_s:
            return SinkhornState(u, v, it, float(residual), trace)
    raise MaxIterExceeded(
        f"no convergence in {cfg.max_iter} iterations (residual {residual:.3e})",
        residual=float(residual),
        iterations=cfg.max_iter,
    )


def sinkhorn_divergence(state, apply_Qhat, p=2.0):
    """``(u^T Qhat v) ** (1/p)``, clamping a slightly negative inner product to 0."""
    inner = float(state.u @ apply_Qhat(state.v))
    return max(inner, 0.0) ** (1.0 / p)


def dense_sinkhorn(f, g, C, cfg=SinkhornConfig()):
    """Reference solver with the exact dense kernels ``Q = exp(-lam C)`` and ``C * Q``."""
    C = np.asarray(C, dtype=float)
    Q = np.exp(-cfg.lam * C)
    state = sinkhorn_scaling(f, g, Q.dot, Q.T.dot, cfg)
    Qhat = C * Q
    return state, sinkhorn_divergence(state, Qhat.dot, cfg.p)


def cost_matrix(grid_x, grid_y=None, p=2.0):
    """Dense cost ``sum_k |x_k - y_k|**p`` over two tensor grids, in linear-index order."""
    if isinstance(grid_x, Grid1D):
        grid_x = TensorGrid((grid_x,))
    if grid_y is None:
        grid_y = grid_x
    elif isinstance(grid_y, Grid1D):
        grid_y = TensorGrid((grid_y,))
    cost = Cost1D(p)
    C = np.zeros((grid_x.n, grid_y.n))
    for k, (ax, ay) in enumerate(zip(grid_x.axes, grid_y.axes)):
        Ck = cost.matrix(ax.points, ay.points)
        ix = np.unravel_index(np.arange(grid_x.n), grid_x.shape, order="F")[k]
        iy = np.unravel_index(np.arange(grid_y.n), grid_y.shape, order="F")[k]
        C += Ck[np.ix_(ix, iy)]
    return C


def hierarchical_sinkhorn(f, g, grid, cfg=SinkhornConfig(), eps_tol=0.01, eta0=None, n_min=32,
                          smoothness=None, factors=None):
    """Sinkhorn divergence with H-matrix Kronecker factors; returns ``(state, S)``.

    Pass prebuilt ``factors`` to reuse them across many marginal pairs.
    """
    if isinstance(grid, Grid1D):
        grid = TensorGrid((grid,))
    fv, gv = _values(f), _values(g)
    grid.check(fv)
    grid.check(gv)
    if factors is None:
        factors = build_factors(grid, lam=cfg.lam, p=cfg.p, eps_tol=eps_tol, eta0=eta0,
                                n_min=n_min, smoothness=smoothness)
    state = sinkhorn_scaling(fv, gv, factors.apply_Q, factors.apply_Qt, cfg)
    return state, sinkhorn_divergence(state, factors.apply_Qhat, cfg.p)


def upper_bound_check(f, g, grid, cfg=SinkhornConfig(), slack=1e-9):
    """Whether the dense Sinkhorn divergence dominates the 1-D W2 distance."""
    if cfg.p != 2:
        raise ValidationError("the W2 comparison needs p = 2")
    _, s = dense_sinkhorn(f, g, cost_matrix(grid, p=2.0), cfg)
    return s >= w2_1d(f, g, grid) - slack
