"""Pure-Python correlation core.

Evaluates weighted kernel sums v(t) = sum_l w_l * kappa(t, a_l) and refines
one-dimensional sections of |v| by golden-section search.  The compiled
extension module mirrors this interface exactly; either one is selected at
import time by ``_corr``.

Built-in families are identified by integer codes; custom completely monotone
functions go through the ``*_generic`` variants that accept a phi callable.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

LAPLACE = 0
INVERSE_LINEAR = 1
GAUSSIAN = 2

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _phi(family: int, lam: float, x: float) -> float:
    if family == LAPLACE:
        return math.exp(-lam * x)
    if family == INVERSE_LINEAR:
        return 1.0 / (1.0 + lam * x)
    raise ValueError(f"unknown family code {family}")


def eval_one(
    family: int,
    lam: float,
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    point: np.ndarray,
) -> float:
    """Signed weighted kernel sum at a single point."""
    m, D = anchors.shape
    total = 0.0
    for l in range(m):
        if family == GAUSSIAN:
            d = point[0] - anchors[l, 0]
            k = math.exp(-0.25 * d * d)
        else:
            x = 0.0
            for dd in range(D):
                diff = abs(point[dd] - anchors[l, dd])
                x += diff if p == 1.0 else diff ** p
            k = _phi(family, lam, x)
        total += weights[l] * k
    return total


def eval_batch(
    family: int,
    lam: float,
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    """|weighted kernel sum| at each row of ``points``."""
    if family == GAUSSIAN:
        d2 = (points[:, 0:1] - anchors[:, 0][None, :]) ** 2
        K = np.exp(-0.25 * d2)
    else:
        diff = np.abs(points[:, None, :] - anchors[None, :, :])
        X = diff.sum(axis=2) if p == 1.0 else (diff ** p).sum(axis=2)
        K = np.exp(-lam * X) if family == LAPLACE else 1.0 / (1.0 + lam * X)
    return np.abs(K @ weights)


def golden_max(
    family: int,
    lam: float,
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    base: np.ndarray,
    axis: int,
    lo: float,
    hi: float,
    iters: int,
) -> tuple[float, float]:
    """Best (t, |v|) found on the section base[axis] := t over [lo, hi].

    Golden-section refinement; endpoints are always evaluated, and the
    overall best evaluated point is returned (robust when the section is
    not unimodal on the bracket).
    """
    m, D = anchors.shape
    # Off-axis distance contributions are constant along the section.
    part = np.empty(m)
    for l in range(m):
        x = 0.0
        for dd in range(D):
            if dd == axis:
                continue
            diff = abs(base[dd] - anchors[l, dd])
            x += diff if p == 1.0 else diff ** p
        part[l] = x
    ax_coord = anchors[:, axis].copy()

    def g(t: float) -> float:
        total = 0.0
        for l in range(m):
            if family == GAUSSIAN:
                d = t - ax_coord[l]
                k = math.exp(-0.25 * d * d)
            else:
                diff = abs(t - ax_coord[l])
                x = part[l] + (diff if p == 1.0 else diff ** p)
                k = _phi(family, lam, x)
            total += weights[l] * k
        return abs(total)

    return _golden_loop(g, lo, hi, iters)


def _golden_loop(
    g: Callable[[float], float], lo: float, hi: float, iters: int
) -> tuple[float, float]:
    best_t, best_v = lo, g(lo)
    vh = g(hi)
    if vh > best_v:
        best_t, best_v = hi, vh
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(iters):
        if fc > best_v:
            best_t, best_v = c, fc
        if fd > best_v:
            best_t, best_v = d, fd
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = g(d)
        if b - a <= 1e-14 * max(1.0, abs(a), abs(b)):
            break
    for t, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_t, best_v = t, v
    return best_t, best_v


def eval_one_generic(
    phi: Callable[[float], float],
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    point: np.ndarray,
) -> float:
    m, D = anchors.shape
    total = 0.0
    for l in range(m):
        x = 0.0
        for dd in range(D):
            diff = abs(point[dd] - anchors[l, dd])
            x += diff if p == 1.0 else diff ** p
        total += weights[l] * (1.0 if x == 0.0 else phi(x))
    return total


def eval_batch_generic(
    phi: Callable[[float], float],
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    out = np.empty(len(points))
    for i in range(len(points)):
        out[i] = abs(eval_one_generic(phi, p, weights, anchors, points[i]))
    return out


def golden_max_generic(
    phi: Callable[[float], float],
    p: float,
    weights: np.ndarray,
    anchors: np.ndarray,
    base: np.ndarray,
    axis: int,
    lo: float,
    hi: float,
    iters: int,
) -> tuple[float, float]:
    pt = np.array(base, dtype=float)

    def g(t: float) -> float:
        pt[axis] = t
        return abs(eval_one_generic(phi, p, weights, anchors, pt))

    return _golden_loop(g, lo, hi, iters)
