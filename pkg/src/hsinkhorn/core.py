"""Probability vectors, uniform tensor grids, signed signals and their CSV format.

Linear indices over a :class:`TensorGrid` follow column-stacking (Fortran)
order: axis 1 varies fastest. This matches ``vec`` in the Kronecker layer,
so factor ``k`` of ``A(d) x ... x A(1)`` acts on axis ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LengthMismatch, OutOfRange, ValidationError, ZeroMassPart

SIMPLEX_TOL = 1e-12
ZERO_MASS = 1e-14


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("probability vector must be a nonempty 1-D array")
        if not np.all(np.isfinite(v)):
            raise ValidationError("probability vector has non-finite entries")
        if np.any(v < 0):
            raise ValidationError("probability vector has negative entries")
        total = v.sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValidationError(f"probability vector sums to {total!r}, not 1")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @classmethod
    def normalized(cls, values):
        """Scale nonnegative ``values`` onto the simplex."""
        v = np.asarray(values, dtype=float)
        mass = v.sum()
        if not mass > ZERO_MASS:
            raise ZeroMassPart(f"cannot normalize: total mass {mass!r}")
        return cls(v / mass)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` points from ``x_min`` to ``x_max`` inclusive."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"grid needs at least 2 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValidationError("grid needs x_max > x_min")
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def points(self):
        return self.x_min + np.arange(self.n) * self.spacing

    @classmethod
    def unit(cls, n):
        return cls(0.0, 1.0, n)


@dataclass(frozen=True)
class TensorGrid:
    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise ValidationError("tensor grid needs at least one axis")
        object.__setattr__(self, "axes", axes)

    @property
    def d(self):
        return len(self.axes)

    @property
    def shape(self):
        """Sizes ``(n_1, ..., n_d)``."""
        return tuple(ax.n for ax in self.axes)

    @property
    def n(self):
        return int(np.prod(self.shape))

    def unravel(self, index):
        """Linear index -> zero-based tuple ``(i_1, ..., i_d)``."""
        return tuple(int(i) for i in np.unravel_index(index, self.shape, order="F"))

    def ravel(self, idx):
        return int(np.ravel_multi_index(tuple(idx), self.shape, order="F"))

    def check(self, values):
        if len(values) != self.n:
            raise LengthMismatch(f"vector of length {len(values)} on grid with n={self.n}")

    @classmethod
    def unit(cls, *sizes):
        return cls(tuple(Grid1D.unit(n) for n in sizes))


@dataclass(frozen=True, eq=False)
class SignedSignal:
    values: np.ndarray
    grid: TensorGrid = field(default=None)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1:
            raise ValidationError("signal must be 1-D (linearized)")
        if not np.all(np.isfinite(v)):
            raise ValidationError("signal has non-finite entries")
        grid = self.grid if self.grid is not None else TensorGrid.unit(v.size)
        grid.check(v)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "grid", grid)


def split_and_normalize(sig, allow_empty=False):
    """Split a signal into normalized positive and negative parts.

    Returns ``(pos, neg, pos_mass, neg_mass)`` with
    ``sig = pos_mass * pos - neg_mass * neg``. An empty part raises
    :class:`ZeroMassPart`, or comes back as ``None`` with mass 0 when
    ``allow_empty`` is set.
    """
    values = sig.values if isinstance(sig, SignedSignal) else np.asarray(sig, dtype=float)
    parts = []
    for raw in (np.maximum(values, 0.0), np.maximum(-values, 0.0)):
        mass = raw.sum()
        if mass > ZERO_MASS:
            parts.append((ProbabilityVector(raw / mass), float(mass)))
        elif allow_empty:
            parts.append((None, 0.0))
        else:
            raise ZeroMassPart(f"sign part has mass {mass!r}")
    (pos, pm), (neg, nm) = parts
    return pos, neg, pm, nm


def resample_to_grid(points, values, target):
    """Piecewise-linear resampling of samples at sorted ``points`` onto ``target``."""
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.shape != values.shape or points.ndim != 1:
        raise LengthMismatch("points and values must be 1-D arrays of equal length")
    if np.any(np.diff(points) <= 0):
        raise ValidationError("source points must be strictly increasing")
    slack = 1e-12 * max(1.0, abs(target.x_max - target.x_min))
    if target.x_min < points[0] - slack or target.x_max > points[-1] + slack:
        raise OutOfRange(
            f"target [{target.x_min}, {target.x_max}] exceeds source "
            f"[{points[0]}, {points[-1]}]"
        )
    return np.interp(target.points, points, values)


def read_vector_csv(path):
    """Read one value per line; returns ``(values, header)``.

    ``header`` holds whatever of ``n``, ``d``, ``nk`` the optional
    ``# n=<int> d=<int> nk=<a,b,...>`` line declared.
    """
    header = {}
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                if key in ("n", "d"):
                    header[key] = int(val)
                elif key == "nk":
                    header[key] = tuple(int(x) for x in val.split(","))
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ValidationError(f"{path}: not a number: {line!r}") from None
    values = np.array(vals)
    if "n" in header and header["n"] != values.size:
        raise LengthMismatch(f"{path}: header says n={header['n']}, found {values.size} values")
    if "nk" in header:
        if int(np.prod(header["nk"])) != values.size:
            raise LengthMismatch(f"{path}: nk={header['nk']} does not multiply to {values.size}")
        if "d" in header and header["d"] != len(header["nk"]):
            raise ValidationError(f"{path}: d={header['d']} but nk has {len(header['nk'])} entries")
    return values, header


def write_vector_csv(path, values, shape=None):
    values = np.asarray(values, dtype=float).ravel()
    shape = tuple(shape) if shape is not None else (values.size,)
    lines = [f"# n={values.size} d={len(shape)} nk={','.join(map(str, shape))}"]
    lines += [repr(float(x)) for x in values]
    Path(path).write_text("\n".join(lines) + "\n")
