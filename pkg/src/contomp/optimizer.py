"""Global maximization of |weighted kernel sum| over the parameter space.

The objective is v(t) = sum_l w_l * kappa(t, a_l) for a fixed anchor set.
The search combines three sound ingredients:

* exact seeds at the anchors and at the Cartesian product of their per-axis
  coordinates (where maximizers of CMF-kernel sums concentrate),
* a uniform per-axis grid over the anchor bounding box inflated by an
  exclusion radius R chosen so that sum|w| * tail(R) is below the best seed
  value, which rules out maximizers outside the box,
* cyclic per-coordinate golden-section refinement inside brackets delimited
  by anchor coordinates, where the objective is smooth.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _corr
from .errors import EmptyResidualError, ParameterError
from .kernels import KernelSpec
from .param_space import Support, same_point

# Hard per-axis grid caps keep the materialized product tractable as the
# dimension grows; exact seeds and refinement carry the precision.
_GRID_CAP = {1: 512, 2: 128, 3: 32}

# Candidates refined by coordinate descent.
_N_REFINE = 8

# A section whose best sampled value is below this fraction of sum|w| is
# treated as identically zero.
_ZERO_FRACTION = 1e-13


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points_per_axis: int = 512
    refine_iterations: int = 60
    tie_tolerance: float = 1e-9
    exclusion_epsilon: float = 1e-12


class CorrelationFunction:
    """|v(t)| for v(t) = sum_l weights[l] * kappa(t, anchors[l])."""

    def __init__(self, weights, anchors, kernel: KernelSpec):
        if isinstance(anchors, Support):
            anchors = anchors.array()
        self.anchors = np.ascontiguousarray(anchors, dtype=float)
        if self.anchors.ndim != 2:
            raise ParameterError("anchors must form a (m, D) array")
        self.weights = np.ascontiguousarray(weights, dtype=float)
        if self.weights.shape != (self.anchors.shape[0],):
            raise ParameterError("one weight per anchor required")
        if self.anchors.shape[1] != kernel.dimension:
            raise ParameterError(
                f"anchors of dimension {self.anchors.shape[1]} with a kernel on R^{kernel.dimension}"
            )
        self.kernel = kernel
        self.total = float(np.abs(self.weights).sum())
        self._code = kernel.core_code
        self._p = 1.0 if kernel.p is None else kernel.p

    @property
    def dimension(self) -> int:
        return self.anchors.shape[1]

    def signed(self, point) -> float:
        pt = np.ascontiguousarray(point, dtype=float).reshape(-1)
        if self._code is not None:
            return float(_corr.eval_one(self._code, self.kernel.lam, self._p, self.weights, self.anchors, pt))
        return float(_corr.eval_one_generic(self.kernel.cmf.phi, self._p, self.weights, self.anchors, pt))

    def __call__(self, point) -> float:
        return abs(self.signed(point))

    def batch(self, points: np.ndarray) -> np.ndarray:
        pts = np.ascontiguousarray(points, dtype=float)
        if self._code is not None:
            return np.asarray(_corr.eval_batch(self._code, self.kernel.lam, self._p, self.weights, self.anchors, pts))
        return _corr.eval_batch_generic(self.kernel.cmf.phi, self._p, self.weights, self.anchors, pts)

    def golden(self, base: np.ndarray, axis: int, lo: float, hi: float, iters: int) -> tuple[float, float]:
        base = np.ascontiguousarray(base, dtype=float)
        if self._code is not None:
            return _corr.golden_max(self._code, self.kernel.lam, self._p, self.weights, self.anchors, base, axis, lo, hi, iters)
        return _corr.golden_max_generic(self.kernel.cmf.phi, self._p, self.weights, self.anchors, base, axis, lo, hi, iters)


@dataclass(frozen=True)
class ArgmaxResult:
    """Tie set of global maximizers, sorted lexicographically."""

    maximizers: tuple[tuple[float, ...], ...]
    value: float
    exclusion_radius: float

    @property
    def canonical(self) -> tuple[float, ...]:
        """Lexicographically smallest maximizer."""
        return self.maximizers[0]


@dataclass(frozen=True)
class SectionArgmaxResult:
    maximizers: tuple[float, ...]
    value: float
    identically_zero: bool


def _exclusion_radius(f: CorrelationFunction, best0: float, cfg: OptimizerConfig) -> float:
    eps = max(cfg.exclusion_epsilon, min(0.5, best0 / (2.0 * f.total)))
    return f.kernel.radius_for_tail(eps)


def _grid_cap(D: int) -> int:
    return _GRID_CAP.get(D, max(8, int(round(32768 ** (1.0 / D)))))


def _axis_anchor_coords(f: CorrelationFunction) -> list[list[float]]:
    return [sorted(set(f.anchors[:, d].tolist())) for d in range(f.dimension)]


def _product_points(axes: Sequence[Sequence[float]]) -> np.ndarray:
    grids = np.meshgrid(*[np.asarray(a, dtype=float) for a in axes], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _refine_point(
    f: CorrelationFunction,
    pt: np.ndarray,
    val: float,
    breakpoints: list[list[float]],
    cfg: OptimizerConfig,
) -> tuple[np.ndarray, float]:
    pt = pt.copy()
    for _ in range(20):
        moved = 0.0
        for d in range(f.dimension):
            bs = breakpoints[d]
            t = pt[d]
            # Brackets adjacent to t: one on each side when t sits on a
            # breakpoint, otherwise the single bracket containing t.
            i = bisect.bisect_left(bs, t)
            lo_i = max(i - 1, 0)
            hi_i = min(bisect.bisect_right(bs, t) + 1, len(bs))
            brackets = {
                (bs[j], bs[j + 1]) for j in range(lo_i, hi_i - 1) if bs[j + 1] > bs[j]
            }
            best_t, best_v = t, val
            for a, b in brackets:
                tt, vv = f.golden(pt, d, a, b, cfg.refine_iterations)
                if vv > best_v:
                    best_t, best_v = tt, vv
            if best_v > val:
                moved = max(moved, abs(best_t - pt[d]))
                pt[d] = best_t
                val = best_v
        if moved <= 1e-12:
            break
    return pt, val


def global_argmax(f: CorrelationFunction, cfg: OptimizerConfig | None = None) -> ArgmaxResult:
    """Tie set of maximizers of |v| over R^D."""
    cfg = cfg or OptimizerConfig()
    if f.total == 0.0:
        raise EmptyResidualError("all weights are zero")
    axes_coords = _axis_anchor_coords(f)

    # Stage 1: exact seeds on the Cartesian product of anchor coordinates.
    exact = _product_points(axes_coords)
    exact_vals = f.batch(exact)
    best0 = float(exact_vals.max())

    R = _exclusion_radius(f, best0, cfg)
    lo = f.anchors.min(axis=0) - R
    hi = f.anchors.max(axis=0) + R

    # Stage 2: uniform per-axis grid plus anchor coordinates and midpoints.
    n = min(cfg.grid_points_per_axis, _grid_cap(f.dimension))
    full_axes = []
    for d in range(f.dimension):
        coords = set(np.linspace(lo[d], hi[d], n).tolist())
        coords.update(axes_coords[d])
        ac = axes_coords[d]
        coords.update((a + b) / 2.0 for a, b in zip(ac, ac[1:]))
        full_axes.append(sorted(coords))
    grid = _product_points(full_axes)
    vals = f.batch(grid)

    order = np.argsort(vals)[::-1][:_N_REFINE]
    breakpoints = [
        sorted(set(axes_coords[d]) | {lo[d], hi[d]}) for d in range(f.dimension)
    ]
    results: list[tuple[np.ndarray, float]] = []
    for i in order:
        pt, v = _refine_point(f, grid[i].copy(), float(vals[i]), breakpoints, cfg)
        results.append((pt, v))
    # Exact seeds participate in the tie set without refinement drift.
    for i in range(len(exact)):
        results.append((exact[i], float(exact_vals[i])))

    best = max(v for _, v in results)
    # Cluster near-ties, keeping each cluster's best representative.
    clusters: list[tuple[tuple[float, ...], float]] = []
    for pt, v in sorted(results, key=lambda r: -r[1]):
        if v < best - cfg.tie_tolerance:
            break
        tp = tuple(pt.tolist())
        if not any(same_point(tp, q, tol=cfg.tie_tolerance * 10 + 1e-9) for q, _ in clusters):
            clusters.append((tp, v))
    maximizers = tuple(sorted(q for q, _ in clusters))
    return ArgmaxResult(maximizers=maximizers, value=best, exclusion_radius=R)


def argmax_1d_section(
    f: CorrelationFunction, base, axis: int, cfg: OptimizerConfig | None = None
) -> SectionArgmaxResult:
    """Maximize |v| along the line {base with coordinate ``axis`` free}.

    ``base[axis]`` must be 0 so the returned scalars are the coordinate values
    themselves.
    """
    cfg = cfg or OptimizerConfig()
    if f.total == 0.0:
        raise EmptyResidualError("all weights are zero")
    base = np.ascontiguousarray(base, dtype=float).reshape(-1)
    if base.shape != (f.dimension,):
        raise ParameterError("base point has the wrong dimension")
    if base[axis] != 0.0:
        raise ParameterError("base coordinate on the free axis must be 0")

    ac = sorted(set(f.anchors[:, axis].tolist()))
    seeds = list(ac) + [(a + b) / 2.0 for a, b in zip(ac, ac[1:])]

    def eval_ts(ts: Sequence[float]) -> np.ndarray:
        pts = np.tile(base, (len(ts), 1))
        pts[:, axis] = ts
        return f.batch(pts)

    seed_vals = eval_ts(seeds)
    best0 = float(seed_vals.max())
    R = _exclusion_radius(f, best0, cfg)
    lo, hi = ac[0] - R, ac[-1] + R
    ts = sorted(set(np.linspace(lo, hi, min(cfg.grid_points_per_axis, 512)).tolist()) | set(seeds))
    vals = eval_ts(ts)
    best = float(vals.max())
    if best <= _ZERO_FRACTION * f.total:
        return SectionArgmaxResult(maximizers=(), value=0.0, identically_zero=True)

    bs = sorted(set(ac) | {lo, hi})
    results: list[tuple[float, float]] = []
    order = np.argsort(vals)[::-1][:_N_REFINE]
    for i in order:
        t, v = float(ts[i]), float(vals[i])
        j = bisect.bisect_left(bs, t)
        for br in {(max(j - 1, 0), max(j, 1)), (min(j, len(bs) - 1), min(j + 1, len(bs) - 1))}:
            if br[1] > br[0]:
                tt, vv = f.golden(base, axis, bs[br[0]], bs[br[1]], cfg.refine_iterations)
                if vv > v:
                    t, v = tt, vv
        results.append((t, v))
    for t, v in zip(seeds, seed_vals):
        results.append((float(t), float(v)))

    best = max(v for _, v in results)
    clusters: list[tuple[float, float]] = []
    for t, v in sorted(results, key=lambda r: -r[1]):
        if v < best - cfg.tie_tolerance:
            break
        if all(abs(t - q) > cfg.tie_tolerance * 10 + 1e-9 for q, _ in clusters):
            clusters.append((t, v))
    maximizers = tuple(sorted(t for t, _ in clusters))
    return SectionArgmaxResult(maximizers=maximizers, value=best, identically_zero=False)
