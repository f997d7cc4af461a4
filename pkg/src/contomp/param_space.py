"""Parameter-space geometry: points, supports, Cartesian grids and separation statistics.

A "point" is a plain tuple of floats; all container types are immutable and
safe to share across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParameterError

# Two points whose coordinates all agree within this absolute tolerance are
# considered the same point.
TAU_EQ = 1e-12

Point = tuple


def as_point(coords) -> tuple[float, ...]:
    """Normalize scalars / sequences / arrays to a finite float tuple."""
    if np.isscalar(coords):
        coords = (coords,)
    pt = tuple(float(c) for c in coords)
    if not pt:
        raise ParameterError("a point needs at least one coordinate")
    if not all(np.isfinite(pt)):
        raise ParameterError(f"non-finite coordinate in point {pt}")
    return pt


def same_point(a: Sequence[float], b: Sequence[float], tol: float = TAU_EQ) -> bool:
    """True when every coordinate of ``a`` and ``b`` agrees within ``tol``."""
    return len(a) == len(b) and all(abs(x - y) <= tol for x, y in zip(a, b))


@dataclass(frozen=True)
class Support:
    """An ordered set of pairwise-distinct points sharing one ambient dimension."""

    points: tuple[tuple[float, ...], ...]
    dimension: int

    @classmethod
    def from_points(cls, points: Iterable) -> "Support":
        pts = tuple(as_point(p) for p in points)
        if not pts:
            raise ParameterError("support must contain at least one point")
        dim = len(pts[0])
        for p in pts:
            if len(p) != dim:
                raise ParameterError("support points have inconsistent dimensions")
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                if same_point(p, q):
                    raise ParameterError(f"support points {p} and {q} coincide within {TAU_EQ}")
        return cls(points=pts, dimension=dim)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[tuple[float, ...]]:
        return iter(self.points)

    def array(self) -> np.ndarray:
        """Points stacked as a (k, D) array."""
        return np.asarray(self.points, dtype=float)


@dataclass(frozen=True)
class CartesianGrid:
    """A product of per-axis coordinate sets, with the product set materialized."""

    axes: tuple[tuple[float, ...], ...]
    points: tuple[tuple[float, ...], ...]
    dimension: int

    @classmethod
    def from_axes(cls, axes: Iterable[Iterable[float]]) -> "CartesianGrid":
        cleaned = tuple(_dedup_sorted(a) for a in axes)
        if not cleaned or any(not a for a in cleaned):
            raise ParameterError("grid needs at least one value per axis")
        pts = tuple(itertools.product(*cleaned))
        return cls(axes=cleaned, points=pts, dimension=len(cleaned))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point) -> bool:
        p = as_point(point)
        return any(same_point(p, q) for q in self.points)

    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


def _dedup_sorted(values: Iterable[float]) -> tuple[float, ...]:
    out: list[float] = []
    for v in sorted(float(x) for x in values):
        if not out or v - out[-1] > TAU_EQ:
            out.append(v)
    return tuple(out)


def lp_pseudo_norm(v: Sequence[float], p: float) -> float:
    """Sum of |v_d|^p for p in (0, 1].

    This is the p-th power of the lp quasi-norm, which is the quantity all
    kernels in this package consume.
    """
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterError("non-finite entry in vector")
    if p == 1.0:
        return float(np.sum(np.abs(arr)))
    return float(np.sum(np.abs(arr) ** p))


def set_aug(support: Support) -> CartesianGrid:
    """Smallest Cartesian grid containing the support.

    Axis ``d`` of the grid is the set of d-th coordinates appearing in the
    support, so the grid has at most ``len(support) ** D`` points.
    """
    if len(support) == 0:
        raise ParameterError("empty support")
    axes = [
        [p[d] for p in support.points]
        for d in range(support.dimension)
    ]
    return CartesianGrid.from_axes(axes)


def min_axis_separation(support: Support) -> float | None:
    """Smallest nonzero per-coordinate gap between any two support points.

    Returns ``None`` if no pair of points differs in any coordinate, which
    cannot happen for a valid support of two or more distinct points but is
    guarded anyway.
    """
    if len(support) < 2:
        raise ParameterError("separation needs at least two points")
    best: float | None = None
    for d in range(support.dimension):
        coords = sorted(p[d] for p in support.points)
        for a, b in zip(coords, coords[1:]):
            gap = b - a
            if gap > TAU_EQ and (best is None or gap < best):
                best = gap
    return best
