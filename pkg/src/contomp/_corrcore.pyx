# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled correlation core.

Mirrors the interface of the pure-Python module ``_corrpy``: weighted kernel
sums for the built-in families and golden-section refinement of 1-D sections.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, pow, sqrt

cnp.import_array()

LAPLACE = 0
INVERSE_LINEAR = 1
GAUSSIAN = 2

cdef int _LAPLACE = 0
cdef int _INVERSE_LINEAR = 1
cdef int _GAUSSIAN = 2

cdef double _INV_GOLDEN = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _phi(int family, double lam, double x) nogil:
    if family == _LAPLACE:
        return exp(-lam * x)
    return 1.0 / (1.0 + lam * x)


cdef double _eval_one(int family, double lam, double p,
                      double[::1] w, double[:, ::1] a,
                      double[::1] pt) nogil:
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t D = a.shape[1]
    cdef Py_ssize_t l, dd
    cdef double total = 0.0
    cdef double x, diff, k
    for l in range(m):
        if family == _GAUSSIAN:
            diff = pt[0] - a[l, 0]
            k = exp(-0.25 * diff * diff)
        else:
            x = 0.0
            if p == 1.0:
                for dd in range(D):
                    x += fabs(pt[dd] - a[l, dd])
            else:
                for dd in range(D):
                    x += pow(fabs(pt[dd] - a[l, dd]), p)
            k = _phi(family, lam, x)
        total += w[l] * k
    return total


def eval_one(int family, double lam, double p,
             double[::1] weights, double[:, ::1] anchors,
             double[::1] point):
    """Signed weighted kernel sum at a single point."""
    return _eval_one(family, lam, p, weights, anchors, point)


def eval_batch(int family, double lam, double p,
               double[::1] weights, double[:, ::1] anchors,
               double[:, ::1] points):
    """|weighted kernel sum| at each row of ``points``."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    for i in range(n):
        out[i] = fabs(_eval_one(family, lam, p, weights, anchors, points[i]))
    return out_arr


cdef double _section(int family, double lam, double p,
                     double[::1] w, double[::1] part,
                     double[::1] ax_coord, double t) nogil:
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t l
    cdef double total = 0.0
    cdef double diff, x, k
    for l in range(m):
        if family == _GAUSSIAN:
            diff = t - ax_coord[l]
            k = exp(-0.25 * diff * diff)
        else:
            diff = fabs(t - ax_coord[l])
            if p == 1.0:
                x = part[l] + diff
            else:
                x = part[l] + pow(diff, p)
            k = _phi(family, lam, x)
        total += w[l] * k
    return fabs(total)


def golden_max(int family, double lam, double p,
               double[::1] weights, double[:, ::1] anchors,
               double[::1] base, int axis,
               double lo, double hi, int iters):
    """Best (t, |v|) found on the section base[axis] := t over [lo, hi]."""
    cdef Py_ssize_t m = anchors.shape[0]
    cdef Py_ssize_t D = anchors.shape[1]
    cdef Py_ssize_t l, dd
    cdef double x

    part_arr = np.empty(m)
    ax_arr = np.empty(m)
    cdef double[::1] part = part_arr
    cdef double[::1] ax_coord = ax_arr
    for l in range(m):
        x = 0.0
        for dd in range(D):
            if dd == axis:
                continue
            if p == 1.0:
                x += fabs(base[dd] - anchors[l, dd])
            else:
                x += pow(fabs(base[dd] - anchors[l, dd]), p)
        part[l] = x
        ax_coord[l] = anchors[l, axis]

    cdef double best_t = lo
    cdef double best_v = _section(family, lam, p, weights, part, ax_coord, lo)
    cdef double vh = _section(family, lam, p, weights, part, ax_coord, hi)
    if vh > best_v:
        best_t = hi
        best_v = vh

    cdef double a = lo
    cdef double b = hi
    cdef double c = b - _INV_GOLDEN * (b - a)
    cdef double d = a + _INV_GOLDEN * (b - a)
    cdef double fc = _section(family, lam, p, weights, part, ax_coord, c)
    cdef double fd = _section(family, lam, p, weights, part, ax_coord, d)
    cdef double scale
    cdef int it
    for it in range(iters):
        if fc > best_v:
            best_t = c
            best_v = fc
        if fd > best_v:
            best_t = d
            best_v = fd
        if fc >= fd:
            b = d
            d = c
            fd = fc
            c = b - _INV_GOLDEN * (b - a)
            fc = _section(family, lam, p, weights, part, ax_coord, c)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INV_GOLDEN * (b - a)
            fd = _section(family, lam, p, weights, part, ax_coord, d)
        scale = 1.0
        if fabs(a) > scale:
            scale = fabs(a)
        if fabs(b) > scale:
            scale = fabs(b)
        if b - a <= 1e-14 * scale:
            break
    if fc > best_v:
        best_t = c
        best_v = fc
    if fd > best_v:
        best_t = d
        best_v = fd
    return best_t, best_v
