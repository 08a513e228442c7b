"""Three-pulse shift experiment: loss curves over a shift sweep and timing scaling."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Grid1D, SignedSignal, TensorGrid, split_and_normalize
from .errors import ValidationError
from .kron import build_factors
from .sinkhorn import SinkhornConfig, cost_matrix, dense_sinkhorn, hierarchical_sinkhorn
from .wasserstein1d import w2_1d

DENSE = "dense"
HIER = "hier"
LOSSES = ("d_E", "d_W", "d_S", "d_S_H")
MAX_SHIFT = 0.3
PULSE_CENTERS = (0.4, 0.5, 0.6)
PULSE_SIGNS = (1.0, -1.0, 1.0)


@dataclass(frozen=True)
class PulseParams:
    sigma: float
    shift: float = 0.0
    n: int = 4096

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("sigma must be positive")
        if abs(self.shift) > MAX_SHIFT + 1e-12:
            raise ValidationError(f"shift must lie in [-{MAX_SHIFT}, {MAX_SHIFT}]")
        if self.n < 2:
            raise ValidationError("need at least 2 samples")


def three_pulse(params):
    """Gaussian pulses +, -, + centred at 0.4, 0.5, 0.6 (moved right by ``shift``) on [0, 1]."""
    grid = Grid1D.unit(params.n)
    x = grid.points
    f = np.zeros_like(x)
    for c, sign in zip(PULSE_CENTERS, PULSE_SIGNS):
        f += sign * np.exp(-(((x - params.shift - c) / params.sigma) ** 2))
    return SignedSignal(f, TensorGrid((grid,)))


def euclidean_loss(f, g):
    return float(np.linalg.norm(f.values - g.values))


def wasserstein_loss(f, g):
    grid = f.grid.axes[0]
    fp, fn, _, _ = split_and_normalize(f)
    gp, gn, _, _ = split_and_normalize(g)
    return w2_1d(fp, gp, grid) + w2_1d(fn, gn, grid)


class SinkhornLoss:
    """Sign-split quadratic Sinkhorn loss on a fixed 1-D grid.

    Kernel data (dense matrices or H-matrix factors) depends only on the grid
    and ``cfg``, so it is built once and reused across calls.
    """

    def __init__(self, grid, cfg=SinkhornConfig(), mode=HIER, eps_tol=0.01, eta0=None, n_min=32):
        if mode not in (DENSE, HIER):
            raise ValidationError(f"unknown mode {mode!r}")
        self.grid = grid if isinstance(grid, TensorGrid) else TensorGrid((grid,))
        self.cfg = cfg
        self.mode = mode
        if mode == DENSE:
            self._C = cost_matrix(self.grid, p=cfg.p)
        else:
            self._factors = build_factors(self.grid, lam=cfg.lam, p=cfg.p, eps_tol=eps_tol,
                                          eta0=eta0, n_min=n_min)

    def divergence(self, a, b):
        if self.mode == DENSE:
            return dense_sinkhorn(a, b, self._C, self.cfg)[1]
        return hierarchical_sinkhorn(a, b, self.grid, self.cfg, factors=self._factors)[1]

    def __call__(self, f, g):
        fp, fn, _, _ = split_and_normalize(f)
        gp, gn, _, _ = split_and_normalize(g)
        return self.divergence(fp, gp) + self.divergence(fn, gn)


def sinkhorn_loss(f, g, cfg=SinkhornConfig(), mode=HIER, eps_tol=0.01, eta0=None, n_min=32):
    return SinkhornLoss(f.grid, cfg, mode, eps_tol, eta0, n_min)(f, g)


@dataclass
class SweepResult:
    shifts: np.ndarray
    losses: dict
    timings: dict = field(default_factory=dict)

    def argmin(self, name):
        return float(self.shifts[int(np.argmin(self.losses[name]))])

    def write_csv(self, path):
        names = [k for k in LOSSES if k in self.losses]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["shift"] + names)
            for i, s in enumerate(self.shifts):
                w.writerow([repr(float(s))] + [repr(float(self.losses[k][i])) for k in names])


def sweep_shifts(num_shifts):
    if num_shifts == 1:
        return np.zeros(1)
    return np.linspace(-MAX_SHIFT, MAX_SHIFT, num_shifts)


def run_sweep(sigma, n=4096, lam=50.0, num_shifts=61, losses=LOSSES, eps_tol=0.01, eps_s=0.01,
              n_min=32, eta0=None):
    """Evaluate the requested losses between f and g(s) over uniform shifts in [-0.3, 0.3].

    ``timings`` holds wall-clock seconds per evaluation for each loss.
    """
    unknown = set(losses) - set(LOSSES)
    if unknown:
        raise ValidationError(f"unknown losses {sorted(unknown)}")
    cfg = SinkhornConfig(lam=lam, eps_s=eps_s)
    f = three_pulse(PulseParams(sigma, 0.0, n))
    grid = f.grid
    fns = {"d_E": euclidean_loss, "d_W": wasserstein_loss}
    if "d_S" in losses:
        fns["d_S"] = SinkhornLoss(grid, cfg, DENSE)
    if "d_S_H" in losses:
        fns["d_S_H"] = SinkhornLoss(grid, cfg, HIER, eps_tol, eta0, n_min)
    shifts = sweep_shifts(num_shifts)
    out = {k: np.empty(len(shifts)) for k in losses}
    timings = {k: np.empty(len(shifts)) for k in losses}
    for i, s in enumerate(shifts):
        g = three_pulse(PulseParams(sigma, float(s), n))
        for k in losses:
            t0 = time.perf_counter()
            out[k][i] = fns[k](f, g)
            timings[k][i] = time.perf_counter() - t0
    return SweepResult(shifts, out, timings)


def local_minima(values):
    """Count of strict discrete interior local minima (plateaus count once)."""
    v = np.asarray(values)
    count = 0
    for i in range(1, v.size - 1):
        if v[i] < v[i - 1]:
            j = i
            while j + 1 < v.size and v[j + 1] == v[i]:
                j += 1
            if j + 1 < v.size and v[j + 1] > v[i]:
                count += 1
    return count


def _bench_pair(n, sigma, shift):
    f = three_pulse(PulseParams(sigma, 0.0, n))
    g = three_pulse(PulseParams(sigma, shift, n))
    fp = split_and_normalize(f)[0]
    gp = split_and_normalize(g)[0]
    return fp, gp, f.grid


def time_divergence(n, lam=50.0, sigma=0.05, mode=HIER, repetitions=3, shift=0.1, eps_tol=0.01,
                    eps_s=0.01, n_min=32):
    """Median wall time of one full divergence evaluation, kernel construction included."""
    fp, gp, grid = _bench_pair(n, sigma, shift)
    cfg = SinkhornConfig(lam=lam, eps_s=eps_s)
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        if mode == HIER:
            hierarchical_sinkhorn(fp, gp, grid, cfg, eps_tol=eps_tol, n_min=n_min)
        else:
            dense_sinkhorn(fp, gp, cost_matrix(grid, p=cfg.p), cfg)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


@dataclass
class BenchRow:
    n: int
    seconds: float
    repetitions: int


def bench_scaling(n_list, lam=50.0, sigma=0.05, repetitions=3, **kw):
    return [BenchRow(n, time_divergence(n, lam, sigma, HIER, repetitions, **kw), repetitions)
            for n in n_list]


def loglog_slope(ns, seconds):
    return float(np.polyfit(np.log(ns), np.log(seconds), 1)[0])


def write_bench_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "seconds", "repetitions"])
        for r in rows:
            w.writerow([r.n, repr(r.seconds), r.repetitions])
