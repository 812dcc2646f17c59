"""Vectorized directed rounding on float64 ndarrays (internal).

The scalar backends in :mod:`svbound.rounding` are exact but per-element;
matrix kernels need array versions.  Addition and subtraction use two-sum,
which is exact, so results widen only when the rounded value is provably on
the wrong side.  Products, quotients and reductions are computed in
round-to-nearest and then widened by strictly more than one ulp
(``vdown``/``vup``), which covers a single correct rounding of any
magnitude, including subnormals.  Exact zeros are preserved where the
mathematics guarantees them so that point identities survive.
"""

from __future__ import annotations

import numpy as np

U = 2.0 ** -53           # unit roundoff of binary64
_EPS_W = 2.0 ** -51      # widening slope: > 2 ulp relative, covers any single rounding
_ETA = 5e-324            # smallest subnormal; absolute widening floor
_MAX = np.finfo(np.float64).max
_INF = np.inf


def vdown(p: np.ndarray) -> np.ndarray:
    """Lower bound for values whose nearest-rounded image is ``p``."""
    with np.errstate(all="ignore"):
        w = p - (np.abs(p) * _EPS_W + _ETA)
        out = np.where(np.isfinite(p), w, p)
        return np.where(p == _INF, _MAX, out)


def vup(p: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        w = p + (np.abs(p) * _EPS_W + _ETA)
        out = np.where(np.isfinite(p), w, p)
        return np.where(p == -_INF, -_MAX, out)


def vadd_down(a, b):
    with np.errstate(all="ignore"):
        s = a + b
        bb = s - a
        err = (a - (s - bb)) + (b - bb)
        out = np.where(err < 0, np.nextafter(s, -_INF), s)
        return np.where(np.isfinite(s), out, np.where(s == _INF, _MAX, s))


def vadd_up(a, b):
    with np.errstate(all="ignore"):
        s = a + b
        bb = s - a
        err = (a - (s - bb)) + (b - bb)
        out = np.where(err > 0, np.nextafter(s, _INF), s)
        return np.where(np.isfinite(s), out, np.where(s == -_INF, -_MAX, s))


def vsub_down(a, b):
    return vadd_down(a, np.negative(b))


def vsub_up(a, b):
    return vadd_up(a, np.negative(b))


def _prod(a, b):
    # candidate endpoint product; 0 * inf means 0 under set semantics
    p = a * b
    if np.isnan(p).any():
        p = np.where(np.isnan(p) & ((a == 0) | (b == 0)), 0.0, p)
    return p


def viv_mul(alo, ahi, blo, bhi):
    """Elementwise interval product from endpoint bound arrays."""
    with np.errstate(all="ignore"):
        p1 = _prod(alo, blo)
        p2 = _prod(alo, bhi)
        p3 = _prod(ahi, blo)
        p4 = _prod(ahi, bhi)
        lo = vdown(np.minimum(np.minimum(p1, p2), np.minimum(p3, p4)))
        hi = vup(np.maximum(np.maximum(p1, p2), np.maximum(p3, p4)))
        z = ((alo == 0) & (ahi == 0)) | ((blo == 0) & (bhi == 0))
        if z.any():
            lo = np.where(z, 0.0, lo)
            hi = np.where(z, 0.0, hi)
    return lo, hi


def viv_div_pos(alo, ahi, clo, chi):
    """Elementwise interval quotient by a positive interval [clo, chi]."""
    with np.errstate(all="ignore"):
        lo = np.where(alo == 0, 0.0, vdown(np.where(alo >= 0, alo / chi, alo / clo)))
        hi = np.where(ahi == 0, 0.0, vup(np.where(ahi >= 0, ahi / clo, ahi / chi)))
    return lo, hi


def viv_scale(lo, hi, s: float):
    """Interval scaling by a point scalar."""
    if s == 0.0:
        z = np.zeros_like(lo)
        return z, z.copy()
    if s == 1.0:
        return lo.copy(), hi.copy()
    if s == -1.0:
        return -hi, -lo
    with np.errstate(all="ignore"):
        if s > 0:
            return vdown(s * lo), vup(s * hi)
        return vdown(s * hi), vup(s * lo)


def viv_scale_cols(lo, hi, s: np.ndarray):
    """Scale column j of the interval array by the point scalar s[j] >= 0."""
    if np.any(s < 0):
        raise ValueError("column scales must be nonnegative")
    with np.errstate(all="ignore"):
        out_lo = np.where(s == 0, 0.0, vdown(lo * s))
        out_hi = np.where(s == 0, 0.0, vup(hi * s))
    return out_lo, out_hi


def iv_sum(lo, hi, axis=None):
    """Interval sum along an axis: rigorous bounds for sums of members."""
    k = lo.size if axis is None else lo.shape[axis]
    g = gamma_up(max(k, 1))
    with np.errstate(all="ignore"):
        slo = np.sum(lo, axis=axis)
        shi = np.sum(hi, axis=axis)
        mlo = np.sum(np.abs(lo), axis=axis)
        mhi = np.sum(np.abs(hi), axis=axis)
    return vdown(slo - 2.0 * g * mlo), vup(shi + 2.0 * g * mhi)


def nonneg_sum_up(x, axis=None):
    """Upper bound of a sum of nonnegative entries."""
    k = x.size if axis is None else x.shape[axis]
    f = 1.0 + 4.0 * max(k, 1) * U
    with np.errstate(all="ignore"):
        return vup(np.sum(x, axis=axis) * f)


def gamma_up(k: int) -> float:
    """Upper bound of k*u / (1 - k*u), the standard dot-product error factor."""
    t = k * U
    if t >= 0.25:
        raise ValueError("dimension too large for rigorous gemm bounds")
    g = t / (1.0 - 2.0 * t)
    return float(np.nextafter(np.nextafter(g, _INF), _INF))


def midrad_to_bounds(c, r):
    return vsub_down(c, r), vadd_up(c, r)


def bounds_to_midrad(lo, hi):
    with np.errstate(all="ignore"):
        m = 0.5 * (lo + hi)
        bad = ~np.isfinite(m)
        if bad.any():
            m = np.where(bad, 0.5 * lo + 0.5 * hi, m)
            m = np.where(np.isfinite(m), m, 0.0)
    r = np.maximum(vsub_up(hi, m), vsub_up(m, lo))
    return m, r
