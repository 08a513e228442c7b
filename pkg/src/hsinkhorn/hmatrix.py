"""Hierarchical low-rank representation of a 1-D kernel matrix.

The index square is split as a quadtree: a block is kept whole when it is
admissible (``diam(rows) / dist(rows, cols) <= eta0``) or has reached
``n_min`` rows, and is otherwise cut into four at the midpoints. Admissible
leaves are replaced by ``L @ R.T`` from barycentric interpolation of the
kernel in ``x`` on Chebyshev points; the local rank is chosen a priori so
the whole matrix meets a Frobenius tolerance.

Matvecs do not walk the tree. After construction the leaves are packed
into groups of identical shape and applied as batched matmuls. Within a
group the contributions to one row range are summed with ``np.add.reduceat``
in tree order, and groups are applied in a fixed order, so results are
deterministic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BadSize, DivergentRank, LengthMismatch
from .kernels import default_smoothness

ADMISSIBLE = "admissible"
DENSE = "dense"
INTERNAL = "internal"

_ETA_RTOL = 1e-12


@dataclass(frozen=True)
class IndexRange:
    """Half-open contiguous range ``[start, end)`` of grid indices."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad index range [{self.start}, {self.end})")

    @property
    def size(self):
        return self.end - self.start

    def halves(self):
        mid = (self.start + self.end) // 2
        return IndexRange(self.start, mid), IndexRange(mid, self.end)


@dataclass(frozen=True, eq=False)
class LowRankFactors:
    """Block approximated by ``L @ R.T``."""

    L: np.ndarray
    R: np.ndarray

    @property
    def rank(self):
        return self.L.shape[1]

    def dense(self):
        return self.L @ self.R.T


@dataclass(eq=False)
class BlockNode:
    """Quadtree node. Leaves carry their kind and, if low-rank, their rank;
    the numbers themselves live in the owning :class:`HMatrix`."""

    row: IndexRange
    col: IndexRange
    kind: str
    children: tuple = ()
    eta: float = math.inf
    rank: int = 0
    # admissible by the predicate but cheaper to keep dense
    admissible: bool = False

    def leaves(self):
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind == INTERNAL:
                stack.extend(reversed(node.children))
            else:
                yield node


def _diam_dist(row, col, xs, ys):
    diam = abs(xs[row.end - 1] - xs[row.start])
    # interval distance; equals min |x_i - y_j| for non-overlapping ranges
    dist = max(0.0, ys[col.start] - xs[row.end - 1], xs[row.start] - ys[col.end - 1])
    return diam, dist


def block_eta(row, col, xs, ys):
    diam, dist = _diam_dist(row, col, xs, ys)
    if dist <= 0:
        return math.inf
    return diam / dist


def admissible(row, col, grid_x, grid_y, eta0):
    xs = grid_x.points if hasattr(grid_x, "points") else np.asarray(grid_x)
    ys = grid_y.points if hasattr(grid_y, "points") else np.asarray(grid_y)
    return _admissible(row, col, xs, ys, eta0)


def _admissible(row, col, xs, ys, eta0):
    diam, dist = _diam_dist(row, col, xs, ys)
    if dist <= 0:
        return False
    return diam <= eta0 * dist * (1 + _ETA_RTOL)


def check_size(n, n_min):
    if n_min < 1 or n < n_min or n % n_min:
        raise BadSize(f"grid size {n} is not n_min*2**m with n_min={n_min}")
    m = n // n_min
    if m & (m - 1):
        raise BadSize(f"grid size {n} is not n_min*2**m with n_min={n_min}; resample first")


def build_partition(grid_x, grid_y, eta0, n_min=32):
    """Quadtree of block leaves (factors not yet filled in)."""
    if grid_x.n != grid_y.n:
        raise BadSize(f"grids differ in size: {grid_x.n} vs {grid_y.n}")
    check_size(grid_x.n, n_min)
    return _partition(grid_x.points, grid_y.points, eta0, n_min)


def _partition(xs, ys, eta0, n_min):
    n = len(xs)
    root = BlockNode(IndexRange(0, n), IndexRange(0, n), INTERNAL)
    stack = [root]
    while stack:
        node = stack.pop()
        row, col = node.row, node.col
        if _admissible(row, col, xs, ys, eta0):
            node.kind = ADMISSIBLE
            node.eta = block_eta(row, col, xs, ys)
        elif row.size <= n_min:
            node.kind = DENSE
        else:
            r0, r1 = row.halves()
            c0, c1 = col.halves()
            node.children = tuple(
                BlockNode(r, c, INTERNAL) for r, c in ((r0, c0), (r0, c1), (r1, c0), (r1, c1))
            )
            stack.extend(node.children)
    return root


def optimal_rank(eps_tol, n_k, c, alpha, eta):
    """Smallest r with ``c * (alpha*eta/4)**r <= eps_tol / n_k``, at least 1."""
    if not eps_tol > 0:
        raise ValueError("eps_tol must be positive")
    q = alpha * eta / 4.0
    if q >= 1:
        raise DivergentRank(
            f"alpha*eta/4 = {q:.4g} >= 1: admissibility parameter too large for convergence"
        )
    if q <= 0:
        return 1
    r = math.ceil(math.log(eps_tol / (c * n_k)) / math.log(q))
    return max(r, 1)


def chebyshev_nodes(a, b, r):
    """First-kind Chebyshev points on [a, b] and their scaled barycentric weights."""
    k = np.arange(r)
    theta = (2 * k + 1) * np.pi / (2 * r)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)
    weights = (-1.0) ** k * np.sin(theta)
    return nodes, weights


def interpolation_matrix(x, nodes, weights):
    """Rows of Lagrange basis values ``l_k(x_i)`` in barycentric form.

    Points that coincide with a node get the exact unit row.
    """
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - nodes[None, :]
    scale = max(abs(nodes[-1] - nodes[0]), np.finfo(float).tiny)
    hit = np.abs(diff) < 1e-14 * scale
    diff[hit] = 1.0
    C = weights / diff
    L = C / C.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    if rows.any():
        L[rows] = hit[rows].astype(float)
    return L


def _lowrank(kernel, x, y, r):
    a, b = x[0], x[-1]
    if b == a:
        return LowRankFactors(np.ones((x.size, 1)), kernel(a, y)[:, None])
    nodes, weights = chebyshev_nodes(a, b, r)
    L = interpolation_matrix(x, nodes, weights)
    R = kernel(nodes[None, :], y[:, None])
    return LowRankFactors(L, R)


def build_lowrank_block(kernel, row, col, grid_x, grid_y, r):
    if not 1 <= r <= row.size:
        raise ValueError(f"rank {r} outside [1, {row.size}]")
    xs = grid_x.points[row.start:row.end]
    ys = grid_y.points[col.start:col.end]
    return _lowrank(kernel, xs, ys, r)


def _block_rank(eps_tol, n_k, smooth, eta, dist):
    r = optimal_rank(eps_tol, n_k, smooth.local_constant(1, dist), smooth.alpha, eta)
    if smooth.beta > 0:
        q = smooth.alpha * eta / 4.0
        while smooth.local_constant(r, dist) * q**r > eps_tol / n_k:
            r += 1
    return r


def assign_ranks(root, grid_x, grid_y, eps_tol, smoothness):
    """Give every admissible leaf its a priori rank; demote it to dense if r > #rows."""
    xs, ys = grid_x.points, grid_y.points
    n_k = grid_x.n
    for leaf in root.leaves():
        if leaf.kind != ADMISSIBLE:
            continue
        _, dist = _diam_dist(leaf.row, leaf.col, xs, ys)
        r = _block_rank(eps_tol, n_k, smoothness, leaf.eta, dist)
        if r <= leaf.row.size:
            leaf.rank = r
        else:
            leaf.kind = DENSE
            leaf.admissible = True
    return root


@lru_cache(maxsize=None)
def _reference_interpolation(b, r):
    # blocks of a uniform grid are affine images of one reference block
    nodes, weights = chebyshev_nodes(0.0, 1.0, r)
    t = np.arange(b) / (b - 1) if b > 1 else np.full(1, 0.5)
    L = interpolation_matrix(t, nodes, weights)
    L.setflags(write=False)
    return nodes, L


def _eval(kernel, x, y):
    out = np.asarray(kernel(x, y), dtype=float)
    out.setflags(write=False)
    return out


@dataclass(eq=False)
class _Group:
    """Leaves of one shape. ``L`` is a single ``(b, r)`` matrix shared by all
    members (uniform grid); ``right`` is ``R`` per leaf, or the dense blocks."""

    rows: np.ndarray
    cols: np.ndarray
    b: int
    right: np.ndarray
    L: np.ndarray | None = None
    row_order: tuple = field(default=None)
    col_order: tuple = field(default=None)

    @property
    def lowrank(self):
        return self.L is not None

    def block(self, j):
        if self.L is None:
            return self.right[j]
        return self.L @ self.right[j].T


def _segments(starts):
    """Sort permutation plus reduceat boundaries for repeated starts."""
    perm = np.argsort(starts, kind="stable")
    s = starts[perm]
    bounds = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    return perm, bounds, s[bounds]


def _assemble(root, kernel, xs, ys):
    buckets = {}
    for leaf in root.leaves():
        key = (leaf.kind == ADMISSIBLE, leaf.row.size, leaf.rank)
        buckets.setdefault(key, []).append(leaf)
    groups, index = [], {}
    # dense first, then low-rank by decreasing block size and rank
    for key in sorted(buckets, key=lambda k: (k[0], -k[1], -k[2])):
        lowrank, b, r = key
        leaves = buckets[key]
        rows = np.array([lf.row.start for lf in leaves], dtype=np.intp)
        cols = np.array([lf.col.start for lf in leaves], dtype=np.intp)
        offs = np.arange(b)
        yb = ys[cols[:, None] + offs]
        if lowrank:
            ref, L = _reference_interpolation(b, r)
            a, e = xs[rows], xs[rows + b - 1]
            nodes = a[:, None] + (e - a)[:, None] * ref
            g = _Group(rows, cols, b, _eval(kernel, nodes[:, None, :], yb[:, :, None]), L)
        else:
            xb = xs[rows[:, None] + offs]
            g = _Group(rows, cols, b, _eval(kernel, xb[:, :, None], yb[:, None, :]))
        g.row_order, g.col_order = _segments(rows), _segments(cols)
        for j, lf in enumerate(leaves):
            index[id(lf)] = (len(groups), j)
        groups.append(g)
    return groups, index


class HMatrix:
    """Hierarchical approximation ``A_H`` of ``A = [kernel(x_i, y_j)]``.

    Immutable once built; concurrent matvecs are safe.
    """

    def __init__(self, root, grid_x, grid_y, kernel, eta0, n_min, eps_tol):
        self.root = root
        self.grid_x = grid_x
        self.grid_y = grid_y
        self.kernel = kernel
        self.eta0 = eta0
        self.n_min = n_min
        self.eps_tol = eps_tol
        self.n = grid_x.n
        self.shape = (grid_x.n, grid_y.n)
        self._groups, self._index = _assemble(root, kernel, grid_x.points, grid_y.points)

    def leaves(self):
        return list(self.root.leaves())

    def block(self, leaf):
        """The stored data of one leaf: :class:`LowRankFactors` or a dense array."""
        gi, j = self._index[id(leaf)]
        g = self._groups[gi]
        return LowRankFactors(g.L, g.right[j]) if g.lowrank else g.right[j]

    def _apply(self, z, transpose):
        z = np.asarray(z, dtype=float)
        if z.shape[0] != self.n:
            raise LengthMismatch(f"vector of length {z.shape[0]} for H-matrix of size {self.n}")
        Z = z.reshape(self.n, -1)
        out = np.zeros_like(Z)
        for g in self._groups:
            src, dst = (g.rows, g.col_order) if transpose else (g.cols, g.row_order)
            offs = np.arange(g.b)
            Zb = Z[src[:, None] + offs]
            if not g.lowrank:
                Y = (g.right.transpose(0, 2, 1) if transpose else g.right) @ Zb
            elif transpose:
                Y = g.right @ (g.L.T @ Zb)
            else:
                Y = g.L @ (g.right.transpose(0, 2, 1) @ Zb)
            perm, bounds, starts = dst
            out[starts[:, None] + offs] += np.add.reduceat(Y[perm], bounds, axis=0)
        return out.reshape(z.shape)

    def matvec(self, z):
        """``A_H @ z``; ``z`` may carry extra trailing columns."""
        return self._apply(z, transpose=False)

    def rmatvec(self, z):
        """``A_H.T @ z``."""
        return self._apply(z, transpose=True)

    def to_dense(self):
        A = np.zeros(self.shape)
        for g in self._groups:
            for j, (r0, c0) in enumerate(zip(g.rows, g.cols)):
                A[r0:r0 + g.b, c0:c0 + g.b] = g.block(j)
        return A

    def storage(self):
        """Stored reals counted per leaf: ``b*b`` dense, ``2*b*r`` low-rank."""
        total = 0
        for g in self._groups:
            m = g.rows.size
            total += m * (2 * g.b * g.L.shape[1] if g.lowrank else g.b * g.b)
        return total

    def leaf_table(self):
        rows = []
        for leaf in self.root.leaves():
            rank = leaf.rank if leaf.kind == ADMISSIBLE else leaf.row.size
            rows.append((leaf.row.start, leaf.row.end, leaf.col.start, leaf.col.end, leaf.kind, rank))
        return rows

    def dump_partition(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row_start", "row_end", "col_start", "col_end", "kind", "rank"])
            w.writerows(self.leaf_table())


def build_hmatrix(kernel, grid_x, grid_y, eps_tol=0.01, eta0=None, n_min=32, smoothness=None,
                  partition=None):
    """Assemble ``A_H`` with ``||A - A_H||_F <= eps_tol`` by a priori rank choice.

    Each admissible leaf gets its own rank from its own ``eta``. ``eta0``
    defaults to ``2 / alpha``. A ``partition`` (the ``root`` of an HMatrix
    built on the same grids with the same ``eta0``, ``n_min``, ``eps_tol``
    and smoothness) skips the tree build.
    """
    smooth = smoothness if smoothness is not None else default_smoothness(kernel)
    if eta0 is None:
        eta0 = 2.0 / smooth.alpha
    if partition is None:
        partition = build_partition(grid_x, grid_y, eta0, n_min)
        assign_ranks(partition, grid_x, grid_y, eps_tol, smooth)
    return HMatrix(partition, grid_x, grid_y, kernel, eta0, n_min, eps_tol)


def hmatvec(H, z):
    return H.matvec(z)


def hmatvec_transpose(H, z):
    return H.rmatvec(z)
