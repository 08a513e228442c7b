import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsinkhorn.errors import UnknownSmoothness
from hsinkhorn.kernels import Cost1D, SmoothnessParams, default_smoothness, eval, kappa, kappa_hat

coords = st.floats(-5, 5, allow_nan=False)


def test_kappa_zero_distance():
    assert eval(kappa(50), 0.3, 0.3) == 1.0


@pytest.mark.parametrize("lam", [0.1, 5, 50, 500])
def test_kappa_hat_zero_distance(lam):
    assert eval(kappa_hat(lam), 0.7, 0.7) == 0.0


def test_kappa_value():
    assert math.isclose(eval(kappa(50), 0.2, 0.3), 0.6065306597126334, rel_tol=1e-12)


def test_underflow_is_silent():
    assert eval(kappa(50), 0.0, 100.0) == 0.0


@given(coords, coords)
def test_symmetry(x, y):
    for k in (kappa(3.0), kappa_hat(3.0), kappa(2.0, p=1.0)):
        assert eval(k, x, y) == eval(k, y, x)


@given(coords, coords, coords)
def test_p1_cost_is_a_metric(x, y, z):
    c = Cost1D(1.0)
    assert c(x, x) == 0 and c(x, y) >= 0 and c(x, y) == c(y, x)
    assert c(x, z) <= c(x, y) + c(y, z) + 1e-12


@given(coords, coords)
def test_kappa_range(x, y):
    v = eval(kappa(1.0), x, y)
    assert 0 <= v <= 1
    if x == y:
        assert v == 1
    assert eval(kappa_hat(1.0), x, y) >= 0


@given(st.floats(0.01, 2.0), st.floats(0.1, 10), st.floats(0.1, 10))
def test_kappa_decreases_in_lambda(dist, lam1, lam2):
    if lam1 == lam2:
        return
    lo, hi = sorted((lam1, lam2))
    assert eval(kappa(hi), 0.0, dist) < eval(kappa(lo), 0.0, dist)


def test_default_smoothness():
    assert default_smoothness(kappa(50)) == SmoothnessParams(1.0, 2.0, 0.0, 0.0)
    assert default_smoothness(kappa_hat(50)) == SmoothnessParams(1.0, 2.0, 0.0, 0.0)
    with pytest.raises(UnknownSmoothness):
        default_smoothness(kappa(50, p=1.0))


def _fd_derivative(f, x, m, h):
    # central differences of order m (binomial stencil)
    k = np.arange(m + 1)
    coef = (-1.0) ** k * np.array([math.comb(m, i) for i in k])
    pts = x + (m / 2 - k) * h
    return np.dot(coef, f(pts)) / h**m


@pytest.mark.parametrize("m", [1, 2, 3])
def test_derivative_bound(m):
    # |d^m k / dx^m| <= 2^m m! |x-y|^-m for p=2, lam=1
    k = kappa(1.0)
    for d in np.linspace(0.05, 4.0, 60):
        deriv = _fd_derivative(lambda x: k(x, 0.0), d, m, 1e-3)
        assert abs(deriv) <= 2**m * math.factorial(m) * d ** (-m) * 1.05
