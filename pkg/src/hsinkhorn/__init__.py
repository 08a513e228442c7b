"""Near-linear Sinkhorn divergence on tensor-product grids via H-matrix Kronecker factors."""

from .core import Grid1D, ProbabilityVector, SignedSignal, TensorGrid, split_and_normalize
from .hmatrix import HMatrix, build_hmatrix
from .kernels import Cost1D, RegularizedKernel, SmoothnessParams, kappa, kappa_hat
from .kron import KernelFactorSet, build_factors, kron_matvec, mvm1, mvm2
from .sinkhorn import (
    SinkhornConfig,
    SinkhornState,
    dense_sinkhorn,
    hierarchical_sinkhorn,
    sinkhorn_divergence,
    sinkhorn_scaling,
)
from .wasserstein1d import w2_1d

__all__ = [
    "Cost1D",
    "Grid1D",
    "HMatrix",
    "KernelFactorSet",
    "ProbabilityVector",
    "RegularizedKernel",
    "SignedSignal",
    "SinkhornConfig",
    "SinkhornState",
    "SmoothnessParams",
    "TensorGrid",
    "build_factors",
    "build_hmatrix",
    "dense_sinkhorn",
    "hierarchical_sinkhorn",
    "kappa",
    "kappa_hat",
    "kron_matvec",
    "mvm1",
    "mvm2",
    "sinkhorn_divergence",
    "sinkhorn_scaling",
    "split_and_normalize",
    "w2_1d",
]
