"""Completely monotone kernel families and the Gaussian control kernel.

A CMF kernel evaluates as ``phi(||a - b||_p^p)`` with ``p`` in (0, 1] and
``phi`` completely monotone, ``phi(0) = 1``, ``phi -> 0`` at infinity.  Two
families are built in (exponential and inverse-linear decay); additional
families can be supplied with closed-form first and second derivatives.  The
Gaussian kernel ``exp(-(a-b)^2 / 4)`` is provided as the smooth control case:
it satisfies the sampled kernel axioms but is not of CMF form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .param_space import as_point, lp_pseudo_norm, same_point

# Backend codes understood by the compiled correlation core.
FAMILY_LAPLACE = 0
FAMILY_INVERSE_LINEAR = 1
FAMILY_GAUSSIAN = 2


@dataclass(frozen=True)
class CMFSpec:
    """One completely monotone function with closed-form derivatives.

    ``radius_for`` returns an argument ``x`` with ``phi(x) <= eps``; the
    optimizer relies on it for exact search-region exclusion bounds.
    """

    name: str
    phi: Callable[[float], float]
    dphi: Callable[[float], float]
    d2phi: Callable[[float], float]
    radius_for: Callable[[float], float]
    lam: float | None = None
    core_code: int | None = field(default=None)


def laplace(lam: float) -> CMFSpec:
    """phi(x) = exp(-lam * x)."""
    if lam <= 0:
        raise ParameterError(f"lam must be positive, got {lam}")
    return CMFSpec(
        name="laplace",
        phi=lambda x: math.exp(-lam * x),
        dphi=lambda x: -lam * math.exp(-lam * x),
        d2phi=lambda x: lam * lam * math.exp(-lam * x),
        radius_for=lambda eps: -math.log(eps) / lam,
        lam=lam,
        core_code=FAMILY_LAPLACE,
    )


def inverse_linear(lam: float) -> CMFSpec:
    """phi(x) = 1 / (1 + lam * x)."""
    if lam <= 0:
        raise ParameterError(f"lam must be positive, got {lam}")
    return CMFSpec(
        name="inverse_linear",
        phi=lambda x: 1.0 / (1.0 + lam * x),
        dphi=lambda x: -lam / (1.0 + lam * x) ** 2,
        d2phi=lambda x: 2.0 * lam * lam / (1.0 + lam * x) ** 3,
        radius_for=lambda eps: (1.0 / eps - 1.0) / lam,
        lam=lam,
        core_code=FAMILY_INVERSE_LINEAR,
    )


def cmf_eval(spec: CMFSpec, x: float) -> float:
    """Evaluate phi(x) for x >= 0; phi(0) is exactly 1."""
    if x < 0:
        raise ParameterError(f"CMF argument must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    return spec.phi(x)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel on R^D: either a CMF family with exponent p, or the Gaussian control."""

    dimension: int
    cmf: CMFSpec | None = None
    p: float | None = None
    gaussian: bool = False

    @classmethod
    def cmf_kernel(cls, cmf: CMFSpec, p: float, dimension: int) -> "KernelSpec":
        if not 0.0 < p <= 1.0:
            raise ParameterError(f"p must lie in (0, 1], got {p}")
        if dimension < 1:
            raise ParameterError(f"dimension must be >= 1, got {dimension}")
        return cls(dimension=dimension, cmf=cmf, p=float(p))

    @classmethod
    def gaussian_control(cls) -> "KernelSpec":
        """kappa(a, b) = exp(-(a - b)^2 / 4), one-dimensional, not of CMF form."""
        return cls(dimension=1, gaussian=True)

    @property
    def is_cmf(self) -> bool:
        return self.cmf is not None

    @property
    def core_code(self) -> int | None:
        """Backend family code, or None when only the generic path applies."""
        if self.gaussian:
            return FAMILY_GAUSSIAN
        return self.cmf.core_code

    @property
    def lam(self) -> float:
        return 0.0 if self.gaussian else self.cmf.lam

    def tail_bound(self, axis_distance: float) -> float:
        """Upper bound on kappa(a, b) when |a_d - b_d| >= axis_distance for some axis d."""
        if self.gaussian:
            return math.exp(-0.25 * axis_distance * axis_distance)
        return cmf_eval(self.cmf, axis_distance ** self.p)

    def radius_for_tail(self, eps: float) -> float:
        """Axis distance R with tail_bound(R) <= eps (eps in (0, 1))."""
        if not 0.0 < eps < 1.0:
            raise ParameterError(f"eps must lie in (0, 1), got {eps}")
        if self.gaussian:
            return 2.0 * math.sqrt(-math.log(eps))
        return self.cmf.radius_for(eps) ** (1.0 / self.p)


def kernel_eval(kernel: KernelSpec, a, b) -> float:
    """kappa(a, b); symmetric, equals 1 exactly iff a == b within tolerance."""
    pa, pb = as_point(a), as_point(b)
    if len(pa) != kernel.dimension or len(pb) != kernel.dimension:
        raise ParameterError(
            f"points of dimension {len(pa)}/{len(pb)} fed to a kernel on R^{kernel.dimension}"
        )
    if same_point(pa, pb):
        return 1.0
    if kernel.gaussian:
        d = pa[0] - pb[0]
        return math.exp(-0.25 * d * d)
    diff = [x - y for x, y in zip(pa, pb)]
    return cmf_eval(kernel.cmf, lp_pseudo_norm(diff, kernel.p))


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    violations: tuple[str, ...]
    n_samples: int


def check_admissible(kernel: KernelSpec, n_samples: int, seed: int = 0) -> AdmissibilityReport:
    """Sampled check of the kernel axioms.

    Verifies unit norm, symmetry, nonnegativity, the strict bound
    kappa(a, b) < 1 for distinct points, and vanishing at large distance.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    violations: list[str] = []
    D = kernel.dimension
    for _ in range(n_samples):
        a = tuple(rng.uniform(-10, 10, D))
        b = tuple(rng.uniform(-10, 10, D))
        if kernel_eval(kernel, a, a) != 1.0:
            violations.append(f"unit norm fails at {a}")
            break
        kab = kernel_eval(kernel, a, b)
        kba = kernel_eval(kernel, b, a)
        if abs(kab - kba) > 1e-14:
            violations.append(f"symmetry fails at {a}, {b}")
            break
        if kab < 0.0:
            violations.append(f"negativity at {a}, {b}")
            break
        if not same_point(a, b) and kab >= 1.0:
            violations.append(f"strict bound < 1 fails at {a}, {b}")
            break
    # Vanishing: at the closed-form radius the kernel must drop below 1e-12.
    R = kernel.radius_for_tail(1e-12)
    origin = tuple(0.0 for _ in range(D))
    far = (R,) + tuple(0.0 for _ in range(D - 1))
    if kernel_eval(kernel, origin, far) > 1e-12 * (1 + 1e-9):
        violations.append(f"vanishing fails at axis distance {R}")
    return AdmissibilityReport(passed=not violations, violations=tuple(violations), n_samples=n_samples)


def finite_difference_check(spec: CMFSpec, xs: Sequence[float]) -> bool:
    """Central differences of phi agree with the closed-form derivatives.

    Step sizes are chosen per order so truncation and round-off errors stay
    balanced; tolerances reflect the achievable accuracy at each order.
    """
    h1, h2 = 1e-6, 1e-4
    for x in xs:
        d1 = (spec.phi(x + h1) - spec.phi(x - h1)) / (2 * h1)
        if abs(d1 - spec.dphi(x)) > 1e-6 + 1e-6 * abs(spec.dphi(x)):
            return False
        d2 = (spec.phi(x + h2) - 2 * spec.phi(x) + spec.phi(x - h2)) / (h2 * h2)
        if abs(d2 - spec.d2phi(x)) > 1e-5 + 1e-4 * abs(spec.d2phi(x)):
            return False
    return True
