"""Gram matrices of kernel atoms: construction, factorization, and linear solves.

All least-squares updates and exact-recovery ratios in the package route
through ``GramMatrix`` so factorizations are computed once per support.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DegenerateSupportError, NumericalError
from .kernels import KernelSpec, kernel_eval
from .param_space import Support

# A Cholesky pivot below this threshold marks the support as numerically
# coincident.
PIVOT_THRESHOLD = 1e-12

# Relative residual allowed on a linear solve before it is declared unstable.
SOLVE_RESIDUAL_TOL = 1e-10


def build_gram(kernel: KernelSpec, support: Support) -> np.ndarray:
    """Symmetric matrix G with G[i, j] = kappa(s_i, s_j) and unit diagonal."""
    k = len(support)
    G = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            G[i, j] = G[j, i] = kernel_eval(kernel, support.points[i], support.points[j])
    return G


def correlation_vector(kernel: KernelSpec, support: Support, theta) -> np.ndarray:
    """Vector g with g[i] = kappa(theta, s_i)."""
    return np.array([kernel_eval(kernel, theta, s) for s in support.points])


@dataclass(frozen=True)
class GramMatrix:
    """A factorized Gram matrix tied to its support."""

    matrix: np.ndarray = field(repr=False)
    support: Support

    @classmethod
    def build(cls, kernel: KernelSpec, support: Support) -> "GramMatrix":
        return cls(matrix=build_gram(kernel, support), support=support)

    @cached_property
    def _cho(self):
        try:
            c, low = scipy.linalg.cho_factor(self.matrix, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise DegenerateSupportError(
                f"Gram matrix of {len(self.support)} atoms is not positive definite: {exc}"
            ) from exc
        # cho_factor leaves the Cholesky pivots on the diagonal of c.
        if float(np.min(np.diag(c)) ** 2) < PIVOT_THRESHOLD:
            raise DegenerateSupportError(
                "Gram matrix has a Cholesky pivot below the coincidence threshold"
            )
        return c, low

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G x = rhs, verifying the relative residual of the solve."""
        rhs = np.asarray(rhs, dtype=float)
        x = scipy.linalg.cho_solve(self._cho, rhs)
        scale = float(np.linalg.norm(rhs))
        if scale > 0:
            rel = float(np.linalg.norm(self.matrix @ x - rhs)) / scale
            if rel > SOLVE_RESIDUAL_TOL:
                raise NumericalError(f"Gram solve relative residual {rel:.3e} exceeds tolerance")
        return x

    def erc_ratio(self, g_theta: np.ndarray) -> float:
        """l1 norm of G^{-1} g_theta: the exact-recovery ratio at one probe."""
        return float(np.abs(self.solve(g_theta)).sum())

    def residual_norm_sq(self, w: np.ndarray) -> float:
        """w^T G w, clamped against tiny negative round-off."""
        w = np.asarray(w, dtype=float)
        val = float(w @ self.matrix @ w)
        if val < 0:
            slack = 1e-12 * float(np.abs(w).sum()) ** 2
            if val < -slack:
                raise NumericalError(f"negative squared residual {val:.3e}")
            val = 0.0
        return val


def solve_gram(kernel: KernelSpec, support: Support, rhs: np.ndarray) -> np.ndarray:
    """One-shot convenience wrapper around GramMatrix.solve."""
    return GramMatrix.build(kernel, support).solve(rhs)


def erc_ratio(kernel: KernelSpec, support: Support, theta) -> float:
    """Exact-recovery ratio ||G^{-1} g_theta||_1 at a single probe point."""
    gm = GramMatrix.build(kernel, support)
    return gm.erc_ratio(correlation_vector(kernel, support, theta))
