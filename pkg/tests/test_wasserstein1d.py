import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsinkhorn.core import Grid1D, ProbabilityVector, split_and_normalize
from hsinkhorn.errors import ValidationError
from hsinkhorn.experiment import PulseParams, sweep_shifts, three_pulse
from hsinkhorn.wasserstein1d import Cdf, cdf, inverse_cdf, w2_1d

seeds = st.integers(0, 2**32 - 1)


def _random_pv(seed, n):
    return ProbabilityVector.normalized(np.random.default_rng(seed).random(n))


def test_cdf_point_mass():
    assert np.array_equal(cdf([1.0, 0.0, 0.0], Grid1D.unit(3)).F, [1, 1, 1])


def test_cdf_uniform():
    assert np.allclose(cdf([0.25] * 4, Grid1D.unit(4)).F, [0.25, 0.5, 0.75, 1.0], rtol=0, atol=1e-15)


@given(seeds)
def test_cdf_vs_exact_prefix(seed):
    f = _random_pv(seed, 200)
    exact = np.cumsum([Fraction(x) for x in f.values])
    assert np.max(np.abs(cdf(f, Grid1D.unit(200)).F - exact.astype(float))) <= 1e-12


def test_cdf_rejects_decreasing():
    with pytest.raises(ValidationError):
        Cdf(Grid1D.unit(3), [0.5, 0.4, 1.0])


def test_inverse_point_mass():
    grid = Grid1D.unit(11)
    f = np.zeros(11)
    f[7] = 1.0
    G = cdf(f, grid)
    for t in np.linspace(1e-9, 1.0, 50):
        assert inverse_cdf(G, t) == grid.points[7]


def test_inverse_uniform_median():
    grid = Grid1D.unit(101)
    G = cdf(np.full(101, 1 / 101), grid)
    assert abs(inverse_cdf(G, 0.5) - 0.5) <= grid.spacing


@given(seeds)
def test_inverse_brackets(seed):
    grid = Grid1D.unit(64)
    f = np.random.default_rng(seed).random(64)
    f[np.random.default_rng(seed + 1).random(64) < 0.3] = 0.0
    f = ProbabilityVector.normalized(f)
    G = cdf(f, grid)
    for t in np.random.default_rng(seed).uniform(1e-6, 1.0, 100):
        i = int(round(inverse_cdf(G, t) / grid.spacing))
        assert G.F[i] >= t
        if i > 0:
            assert G.F[i - 1] < t


@given(seeds)
def test_identity(seed):
    f = _random_pv(seed, 128)
    assert w2_1d(f, f, Grid1D.unit(128)) <= 1e-10


@pytest.mark.parametrize("i,j", [(0, 9), (3, 4), (8, 2)])
def test_point_masses(i, j):
    grid = Grid1D.unit(10)
    f, g = np.zeros(10), np.zeros(10)
    f[i] = g[j] = 1.0
    expected = abs(grid.points[i] - grid.points[j]) * math.sqrt(grid.spacing)
    assert math.isclose(w2_1d(f, g, grid), expected, rel_tol=1e-12)


@given(seeds)
def test_symmetry_within_quadrature(seed):
    grid = Grid1D.unit(100)
    f, g = _random_pv(seed, 100), _random_pv(seed + 1, 100)
    assert abs(w2_1d(f, g, grid) - w2_1d(g, f, grid)) <= 2 * grid.spacing * 1.0


def test_translation_linear():
    grid = Grid1D.unit(21)
    f = np.zeros(21)
    f[0] = 1.0
    dists = []
    for k in range(1, 6):
        g = np.zeros(21)
        g[k] = 1.0
        dists.append(w2_1d(f, g, grid))
    assert np.allclose(np.array(dists) / np.arange(1, 6), dists[0], rtol=1e-12)


def test_pulse_sweep_minimum_at_zero():
    n = 1024
    grid = Grid1D.unit(n)
    ref, *_ = split_and_normalize(three_pulse(PulseParams(0.05, 0.0, n)))
    shifts = sweep_shifts(61)
    vals = [w2_1d(ref, split_and_normalize(three_pulse(PulseParams(0.05, s, n)))[0], grid)
            for s in shifts]
    assert shifts[int(np.argmin(vals))] == 0.0
