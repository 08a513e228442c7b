"""1-D power-distance costs and the regularized kernels built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownSmoothness, ValidationError

KAPPA = "kappa"
KAPPA_HAT = "kappa_hat"


@dataclass(frozen=True)
class Cost1D:
    """c(x, y) = |x - y|**p."""

    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValidationError(f"cost exponent must be >= 1, got {self.p}")

    def __call__(self, x, y):
        diff = np.abs(np.subtract(x, y, dtype=float))
        if self.p == 2:
            return diff * diff
        if self.p == 1:
            return diff
        return diff**self.p

    def matrix(self, x, y):
        return self(np.asarray(x)[:, None], np.asarray(y)[None, :])


@dataclass(frozen=True)
class RegularizedKernel:
    """exp(-lam*c) (``variant="kappa"``) or c*exp(-lam*c) (``"kappa_hat"``).

    Evaluation broadcasts over array arguments. Underflow to 0 is silent.
    """

    cost: Cost1D
    lam: float
    variant: str = KAPPA

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")
        if self.variant not in (KAPPA, KAPPA_HAT):
            raise ValidationError(f"unknown kernel variant {self.variant!r}")

    def __call__(self, x, y):
        c = self.cost(x, y)
        k = np.exp(-self.lam * c)
        return k if self.variant == KAPPA else c * k

    def matrix(self, x, y):
        return self(np.asarray(x, dtype=float)[:, None], np.asarray(y, dtype=float)[None, :])

    def hat(self):
        return RegularizedKernel(self.cost, self.lam, KAPPA_HAT)


def kappa(lam, p=2.0):
    return RegularizedKernel(Cost1D(p), lam, KAPPA)


def kappa_hat(lam, p=2.0):
    return RegularizedKernel(Cost1D(p), lam, KAPPA_HAT)


def eval(kernel, x, y):  # noqa: A001 - mirrors the operation name
    return float(kernel(x, y))


@dataclass(frozen=True)
class SmoothnessParams:
    """Constants of the derivative bound

    |d^m/dx^m k(x, y)| <= c0 * m! * alpha**m * m**beta * |x - y|**(-m - s).
    """

    c0: float = 1.0
    alpha: float = 2.0
    beta: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValidationError("alpha must be positive")

    def local_constant(self, rank, dist):
        """The block constant c = c0 * r**beta * dist**(-s) of the interpolation bound."""
        c = self.c0
        if self.beta:
            c *= float(rank) ** self.beta
        if self.s:
            c *= float(dist) ** (-self.s)
        return c


def default_smoothness(kernel):
    """Built-in constants; only squared-distance costs have them."""
    if kernel.cost.p != 2:
        raise UnknownSmoothness(
            f"no built-in smoothness constants for p={kernel.cost.p}; pass SmoothnessParams"
        )
    return SmoothnessParams(c0=1.0, alpha=2.0, beta=0.0, s=0.0)
