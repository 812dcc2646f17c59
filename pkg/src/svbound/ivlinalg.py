"""Dense interval matrices and the rigorous linear-algebra building blocks.

An :class:`IntervalMatrix` keeps inf/sup endpoint arrays per axis (real part
always, imaginary part for complex matrices) plus a structural flag.  Fast
kernels run numpy matrix products in round-to-nearest and add a rigorous
a-priori error radius (the standard k*u/(1-k*u) dot-product bound, which is
valid for any summation order and with FMA contraction, i.e. for any sane
BLAS); a scalar reference path exists for cross-checking.  Point matrices
are plain ``numpy.ndarray`` values, aliased :data:`DenseMatrix`.

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _vround as vr
from .errors import NotProvablyPositiveDefinite, NotVerifiablyNonsingular
from .interval import ComplexInterval, RealInterval
from .rounding import get_backend

__all__ = [
    "DenseMatrix",
    "IntervalMatrix",
    "EmbeddingPair",
    "imm_multiply",
    "nrmbnd",
    "interval_cholesky",
    "verify_spd",
    "enclose_solve",
    "lower_bound_sigma_min_spd",
    "real_embedding",
    "augment_pair",
]

DenseMatrix = np.ndarray

GENERAL = "general"
HERMITIAN = "hermitian"
UPPER = "upper"


def _asarray(x):
    a = np.asarray(x, dtype=np.float64)
    return np.atleast_2d(a)


def _hypot_up(a, b):
    with np.errstate(all="ignore"):
        return vr.vup(np.hypot(a, b) * (1.0 + 2.0 ** -50))


class IntervalMatrix:
    """Dense interval matrix in inf-sup form (with midpoint-radius views).

    ``sym`` is one of ``"general"``, ``"hermitian"``, ``"upper"``; the
    hermitian flag is validated at construction (equal transposed real
    bounds, negated transposed imaginary bounds, real diagonal).
    """

    __slots__ = ("lo", "hi", "lo_im", "hi_im", "sym")

    def __init__(self, lo, hi, lo_im=None, hi_im=None, sym=GENERAL):
        lo, hi = _asarray(lo), _asarray(hi)
        if lo.shape != hi.shape:
            raise ValueError("endpoint shape mismatch")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise ValueError("NaN endpoint")
        if (lo > hi).any():
            raise ValueError("inverted interval entry")
        self.lo, self.hi = lo, hi
        if lo_im is not None:
            lo_im, hi_im = _asarray(lo_im), _asarray(hi_im)
            if lo_im.shape != lo.shape or hi_im.shape != lo.shape:
                raise ValueError("imaginary endpoint shape mismatch")
            if np.isnan(lo_im).any() or np.isnan(hi_im).any():
                raise ValueError("NaN endpoint")
            if (lo_im > hi_im).any():
                raise ValueError("inverted interval entry")
            if not lo_im.any() and not hi_im.any():
                lo_im = hi_im = None  # exactly real
        self.lo_im, self.hi_im = lo_im, hi_im
        self.sym = sym
        if sym == HERMITIAN:
            self._check_hermitian()
        elif sym == UPPER:
            self._check_upper()
        elif sym != GENERAL:
            raise ValueError(f"unknown structure flag {sym!r}")

    # -- construction -------------------------------------------------

    @classmethod
    def from_point(cls, a, sym=GENERAL):
        a = np.atleast_2d(np.asarray(a))
        if np.iscomplexobj(a):
            re = np.ascontiguousarray(a.real, dtype=np.float64)
            im = np.ascontiguousarray(a.imag, dtype=np.float64)
            return cls(re, re.copy(), im, im.copy(), sym=sym)
        a = a.astype(np.float64, copy=True)
        return cls(a, a.copy(), sym=sym)

    @classmethod
    def from_midrad(cls, mid, rad, rad_im=None, sym=GENERAL):
        mid = np.atleast_2d(np.asarray(mid))
        rad = np.broadcast_to(np.asarray(rad, dtype=np.float64), mid.shape)
        if np.iscomplexobj(mid):
            rim = rad if rad_im is None else np.broadcast_to(np.asarray(rad_im, dtype=np.float64), mid.shape)
            re_lo, re_hi = vr.midrad_to_bounds(mid.real.astype(np.float64), rad)
            im_lo, im_hi = vr.midrad_to_bounds(mid.imag.astype(np.float64), rim)
            return cls(re_lo, re_hi, im_lo, im_hi, sym=sym)
        lo, hi = vr.midrad_to_bounds(mid.astype(np.float64), rad)
        return cls(lo, hi, sym=sym)

    @classmethod
    def identity(cls, n):
        e = np.eye(n)
        return cls(e, e.copy(), sym=HERMITIAN)

    @classmethod
    def zeros(cls, m, n=None, sym=GENERAL):
        n = m if n is None else n
        z = np.zeros((m, n))
        return cls(z, z.copy(), sym=sym)

    # -- validation ---------------------------------------------------

    def _check_hermitian(self):
        if self.rows != self.cols:
            raise ValueError("hermitian flag on a non-square matrix")
        if not (np.array_equal(self.lo, self.lo.T) and np.array_equal(self.hi, self.hi.T)):
            raise ValueError("hermitian flag: real bounds are not symmetric")
        if self.lo_im is not None:
            if not (np.array_equal(self.lo_im, -self.hi_im.T)):
                raise ValueError("hermitian flag: imaginary bounds not conjugate-symmetric")
            d = np.arange(self.rows)
            if self.lo_im[d, d].any() or self.hi_im[d, d].any():
                raise ValueError("hermitian flag: diagonal has nonzero imaginary part")

    def _check_upper(self):
        il = np.tril_indices(self.rows, k=-1)
        bad = self.lo[il].any() or self.hi[il].any()
        if self.lo_im is not None:
            bad = bad or self.lo_im[il].any() or self.hi_im[il].any()
        if bad:
            raise ValueError("upper flag: entries below the diagonal")

    # -- basic properties ----------------------------------------------

    @property
    def shape(self):
        return self.lo.shape

    @property
    def rows(self):
        return self.lo.shape[0]

    @property
    def cols(self):
        return self.lo.shape[1]

    @property
    def is_complex(self):
        return self.lo_im is not None

    def re_bounds(self):
        return self.lo, self.hi

    def im_bounds(self):
        if self.lo_im is None:
            z = np.zeros_like(self.lo)
            return z, z
        return self.lo_im, self.hi_im

    def entry(self, i, j):
        re = RealInterval(float(self.lo[i, j]), float(self.hi[i, j]))
        if self.lo_im is None:
            return re
        return ComplexInterval(re, RealInterval(float(self.lo_im[i, j]), float(self.hi_im[i, j])))

    def mid(self):
        m, _ = vr.bounds_to_midrad(self.lo, self.hi)
        if self.lo_im is None:
            return m
        mi, _ = vr.bounds_to_midrad(self.lo_im, self.hi_im)
        return m + 1j * mi

    def rad(self):
        """Per-axis upward radius; a single array for real matrices,
        a (re, im) pair for complex ones."""
        _, r = vr.bounds_to_midrad(self.lo, self.hi)
        if self.lo_im is None:
            return r
        _, ri = vr.bounds_to_midrad(self.lo_im, self.hi_im)
        return r, ri

    def mag(self):
        """Entrywise upper bound of member magnitudes."""
        m = np.maximum(np.abs(self.lo), np.abs(self.hi))
        if self.lo_im is None:
            return m
        mi = np.maximum(np.abs(self.lo_im), np.abs(self.hi_im))
        return _hypot_up(m, mi)

    def nnz(self):
        return int(np.count_nonzero(self.mag()))

    def contains(self, a) -> bool:
        a = np.atleast_2d(np.asarray(a))
        if a.shape != self.shape:
            return False
        re = a.real if np.iscomplexobj(a) else a
        if not ((self.lo <= re).all() and (re <= self.hi).all()):
            return False
        im_lo, im_hi = self.im_bounds()
        im = a.imag if np.iscomplexobj(a) else np.zeros_like(re)
        return bool((im_lo <= im).all() and (im <= im_hi).all())

    # -- structural ops (exact) ----------------------------------------

    def T(self):
        if self.lo_im is None:
            return IntervalMatrix(self.lo.T.copy(), self.hi.T.copy())
        return IntervalMatrix(self.lo.T.copy(), self.hi.T.copy(),
                              self.lo_im.T.copy(), self.hi_im.T.copy())

    def conj(self):
        if self.lo_im is None:
            return self
        return IntervalMatrix(self.lo.copy(), self.hi.copy(),
                              -self.hi_im, -self.lo_im, sym=self.sym if self.sym == GENERAL else GENERAL)

    def H(self):
        """Conjugate transpose (exact)."""
        if self.sym == HERMITIAN:
            return self
        if self.lo_im is None:
            return IntervalMatrix(self.lo.T.copy(), self.hi.T.copy())
        return IntervalMatrix(self.lo.T.copy(), self.hi.T.copy(),
                              -self.hi_im.T, -self.lo_im.T)

    def __neg__(self):
        if self.lo_im is None:
            return IntervalMatrix(-self.hi, -self.lo, sym=self.sym)
        return IntervalMatrix(-self.hi, -self.lo, -self.hi_im, -self.lo_im, sym=self.sym)

    # -- interval arithmetic --------------------------------------------

    def _combine_flag(self, other):
        if self.sym == other.sym and self.sym in (HERMITIAN, UPPER):
            return self.sym
        return GENERAL

    def __add__(self, other):
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        lo = vr.vadd_down(self.lo, other.lo)
        hi = vr.vadd_up(self.hi, other.hi)
        if self.lo_im is None and other.lo_im is None:
            return IntervalMatrix(lo, hi, sym=self._combine_flag(other))
        a_lo, a_hi = self.im_bounds()
        b_lo, b_hi = other.im_bounds()
        return IntervalMatrix(lo, hi, vr.vadd_down(a_lo, b_lo), vr.vadd_up(a_hi, b_hi),
                              sym=self._combine_flag(other))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: float):
        """Product with a point real scalar."""
        lo, hi = vr.viv_scale(self.lo, self.hi, float(s))
        if self.lo_im is None:
            return IntervalMatrix(lo, hi, sym=self.sym)
        li, hi_i = vr.viv_scale(self.lo_im, self.hi_im, float(s))
        return IntervalMatrix(lo, hi, li, hi_i, sym=self.sym)

    def scale_cols(self, s: np.ndarray):
        """Scale column j by the nonnegative point scalar s[j]."""
        s = np.asarray(s, dtype=np.float64)
        lo, hi = vr.viv_scale_cols(self.lo, self.hi, s)
        if self.lo_im is None:
            return IntervalMatrix(lo, hi)
        li, hi_i = vr.viv_scale_cols(self.lo_im, self.hi_im, s)
        return IntervalMatrix(lo, hi, li, hi_i)

    def add_diag(self, t: float):
        """Add the point scalar t to every diagonal entry."""
        bk = get_backend()
        lo, hi = self.lo.copy(), self.hi.copy()
        for i in range(min(self.rows, self.cols)):
            lo[i, i] = bk.add_down(lo[i, i], t)
            hi[i, i] = bk.add_up(hi[i, i], t)
        if self.lo_im is None:
            return IntervalMatrix(lo, hi, sym=self.sym)
        return IntervalMatrix(lo, hi, self.lo_im.copy(), self.hi_im.copy(), sym=self.sym)

    def widen_by(self, r: float):
        """Inflate every entry by [-r, r] on each axis."""
        if r < 0:
            raise ValueError("negative inflation")
        lo = vr.vsub_down(self.lo, r)
        hi = vr.vadd_up(self.hi, r)
        if self.lo_im is None:
            return IntervalMatrix(lo, hi)
        return IntervalMatrix(lo, hi, vr.vsub_down(self.lo_im, r), vr.vadd_up(self.hi_im, r))

    def intersect(self, other):
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if (lo > hi).any():
            raise ValueError("empty intersection")
        if self.lo_im is None and other.lo_im is None:
            return IntervalMatrix(lo, hi)
        a_lo, a_hi = self.im_bounds()
        b_lo, b_hi = other.im_bounds()
        li, hi_i = np.maximum(a_lo, b_lo), np.minimum(a_hi, b_hi)
        if (li > hi_i).any():
            raise ValueError("empty intersection")
        return IntervalMatrix(lo, hi, li, hi_i)

    def symmetrized(self):
        """Intersect with the conjugate transpose and flag hermitian.

        Valid whenever every member of interest is Hermitian (the true
        value set of products like X^H S X with S Hermitian).
        """
        e = self.intersect(self.H())
        # force exact structural symmetry so the flag validates
        lo = np.maximum(e.lo, e.lo.T)
        hi = np.minimum(e.hi, e.hi.T)
        if e.lo_im is None:
            return IntervalMatrix(lo, hi, sym=HERMITIAN)
        li = np.maximum(e.lo_im, -e.hi_im.T)
        hi_i = np.minimum(e.hi_im, -e.lo_im.T)
        d = np.arange(self.rows)
        li[d, d] = 0.0
        hi_i[d, d] = 0.0
        return IntervalMatrix(lo, hi, li, hi_i, sym=HERMITIAN)

    @staticmethod
    def block2x2(a11, a12, a21, a22, sym=GENERAL):
        """Assemble [[a11, a12], [a21, a22]] exactly."""
        blocks = (a11, a12, a21, a22)
        cplx = any(b.lo_im is not None for b in blocks)
        lo = np.block([[a11.lo, a12.lo], [a21.lo, a22.lo]])
        hi = np.block([[a11.hi, a12.hi], [a21.hi, a22.hi]])
        if not cplx:
            return IntervalMatrix(lo, hi, sym=sym)
        ims = [b.im_bounds() for b in blocks]
        li = np.block([[ims[0][0], ims[1][0]], [ims[2][0], ims[3][0]]])
        hi_i = np.block([[ims[0][1], ims[1][1]], [ims[2][1], ims[3][1]]])
        return IntervalMatrix(lo, hi, li, hi_i, sym=sym)

    def __repr__(self):
        kind = "complex" if self.is_complex else "real"
        return f"<IntervalMatrix {self.rows}x{self.cols} {kind} {self.sym}>"


@dataclass(frozen=True)
class EmbeddingPair:
    """Real doubling of a complex pencil: blocks [[Re, -Im], [Im, Re]].

    Singular values of the embedded pencil equal those of the original,
    each with doubled multiplicity.
    """

    Abar: IntervalMatrix
    Bbar: IntervalMatrix


# -- products ----------------------------------------------------------


def _imm_real(alo, ahi, blo, bhi):
    """Midpoint-radius enclosure of an interval matrix product.

    With k the inner dimension, G >= gamma_{k+4} and P >= |mA||mB| computed
    in nearest mode, the exact radius is bounded by
    (R1 + G*P)(1 + 2G) + k*eta, which the inflation below dominates.
    """
    mA, rA = vr.bounds_to_midrad(alo, ahi)
    mB, rB = vr.bounds_to_midrad(blo, bhi)
    k = mA.shape[1]
    G = vr.gamma_up(k + 4)
    with np.errstate(all="ignore"):
        C = mA @ mB
        P = np.abs(mA) @ np.abs(mB)
        R1 = np.abs(mA) @ rB + rA @ np.abs(mB) + rA @ rB
        R = vr.vup((R1 + G * P) * (1.0 + 8.0 * G) + k * 2.0 ** -1070)
    return vr.midrad_to_bounds(C, R)


def _imm_fast(A: IntervalMatrix, B: IntervalMatrix) -> IntervalMatrix:
    if not A.is_complex and not B.is_complex:
        lo, hi = _imm_real(A.lo, A.hi, B.lo, B.hi)
        return IntervalMatrix(lo, hi)
    ar_lo, ar_hi = A.re_bounds()
    ai_lo, ai_hi = A.im_bounds()
    br_lo, br_hi = B.re_bounds()
    bi_lo, bi_hi = B.im_bounds()
    rr = _imm_real(ar_lo, ar_hi, br_lo, br_hi)
    ii = _imm_real(ai_lo, ai_hi, bi_lo, bi_hi)
    ri = _imm_real(ar_lo, ar_hi, bi_lo, bi_hi)
    ir = _imm_real(ai_lo, ai_hi, br_lo, br_hi)
    re_lo = vr.vsub_down(rr[0], ii[1])
    re_hi = vr.vsub_up(rr[1], ii[0])
    im_lo = vr.vadd_down(ri[0], ir[0])
    im_hi = vr.vadd_up(ri[1], ir[1])
    return IntervalMatrix(re_lo, re_hi, im_lo, im_hi)


def _imm_reference(A: IntervalMatrix, B: IntervalMatrix) -> IntervalMatrix:
    from .interval import iv_add, iv_mul

    m, k, n = A.rows, A.cols, B.cols
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            acc = iv_mul(A.entry(i, 0), B.entry(0, j))
            for t in range(1, k):
                acc = iv_add(acc, iv_mul(A.entry(i, t), B.entry(t, j)))
            out[i, j] = acc
    cplx = any(isinstance(v, ComplexInterval) for v in out.flat)
    lo = np.zeros((m, n))
    hi = np.zeros((m, n))
    li = np.zeros((m, n)) if cplx else None
    hi_i = np.zeros((m, n)) if cplx else None
    for i in range(m):
        for j in range(n):
            v = out[i, j]
            if isinstance(v, ComplexInterval):
                lo[i, j], hi[i, j] = v.re.lo, v.re.hi
                li[i, j], hi_i[i, j] = v.im.lo, v.im.hi
            else:
                lo[i, j], hi[i, j] = v.lo, v.hi
    return IntervalMatrix(lo, hi, li, hi_i)


def imm_multiply(A: IntervalMatrix, B: IntervalMatrix, method: str = "fast") -> IntervalMatrix:
    """Interval matrix product containing {A'B' : A' in A, B' in B}.

    ``fast`` runs three-plus point gemms with a rigorous radius term;
    ``reference`` is the scalar triple loop (for small cross-checks).
    """
    if A.cols != B.rows:
        raise ValueError(f"inner dimensions {A.cols} and {B.rows} disagree")
    if method == "fast":
        return _imm_fast(A, B)
    if method == "reference":
        return _imm_reference(A, B)
    raise ValueError(f"unknown method {method!r}")


def _point_product(a: np.ndarray, b: np.ndarray) -> IntervalMatrix:
    """Enclosure of the exact product of two point matrices."""
    return imm_multiply(IntervalMatrix.from_point(a), IntervalMatrix.from_point(b))


# -- norm bounds --------------------------------------------------------


def nrmbnd(A: IntervalMatrix) -> float:
    """Rigorous upper bound of the spectral norm over all members.

    Hermitian-flagged input uses the magnitude row-sum bound; the general
    path bounds sqrt(|| |A|^T |A| ||_inf) with upward rounding throughout.
    """
    m = A.mag()
    if not np.isfinite(m).all():
        return float("inf")
    if A.sym == HERMITIAN:
        return float(np.max(vr.nonneg_sum_up(m, axis=1)))
    v = vr.nonneg_sum_up(m, axis=1)
    with np.errstate(all="ignore"):
        w = (m.T @ v) * (1.0 + 4.0 * max(A.rows, 1) * vr.U) + A.rows * 2.0 ** -1060
    return get_backend().sqrt_up(float(np.max(vr.vup(w))))


def nrm2_upper(M: IntervalMatrix, sigma_hint: float | None = None, retries: int = 8) -> float:
    """Tight rigorous upper bound of the spectral norm over all members.

    Certifies ||M'|| < t by verifying t^2 I - M^H M positive definite on
    the interval Gram enclosure, escalating t from an approximate largest
    singular value.  Falls back to :func:`nrmbnd` if certification fails.
    """
    bk = get_backend()
    if sigma_hint is None:
        mid = M.mid()
        if not np.isfinite(mid).all():
            return nrmbnd(M)
        try:
            sigma_hint = float(np.linalg.svd(mid, compute_uv=False)[0])
        except np.linalg.LinAlgError:
            return nrmbnd(M)
    G = imm_multiply(M.H(), M).symmetrized()
    t = sigma_hint * (1.0 + 2.0 ** -26) + 2.0 ** -1000
    for k in range(retries):
        if not np.isfinite(t):
            break
        tt = bk.mul_up(t, t)
        if verify_spd((-G).add_diag(tt)):
            return t
        t *= 1.0 + 10.0 ** (k - 8)
    return nrmbnd(M)


def _mig_array(A: IntervalMatrix) -> np.ndarray:
    lo, hi = A.lo, A.hi
    m = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
    if A.lo_im is None:
        return m
    mi = np.where(A.lo_im > 0, A.lo_im, np.where(A.hi_im < 0, -A.hi_im, 0.0))
    with np.errstate(all="ignore"):
        h = np.hypot(m, mi) * (1.0 - 2.0 ** -50)
    return np.maximum(vr.vdown(h), 0.0)


def nrm_lower(A: IntervalMatrix, x: np.ndarray) -> float:
    """Lower bound of ||A'|| valid for every member A': ||A'x|| / ||x||."""
    bk = get_backend()
    xcol = np.asarray(x).reshape(-1, 1)
    y = imm_multiply(A, IntervalMatrix.from_point(xcol))
    mig = _mig_array(y)
    with np.errstate(all="ignore"):
        q = vr.vdown(mig * mig)
        num2 = float(np.sum(q)) * (1.0 - 4.0 * max(y.rows, 1) * vr.U)
    num = bk.sqrt_down(max(0.0, float(vr.vdown(np.asarray(num2)))))
    ax = np.abs(xcol).ravel()
    with np.errstate(all="ignore"):
        den2 = vr.nonneg_sum_up(vr.vup(ax * ax * (1.0 + 2.0 ** -48)))
    den = bk.sqrt_up(float(den2))
    if den == 0.0:
        raise ValueError("zero test vector")
    return max(0.0, bk.div_down(num, den))


# -- interval Cholesky ---------------------------------------------------


def _bandwidth(A: IntervalMatrix) -> int:
    m = A.mag()
    r, c = np.nonzero(m)
    if r.size == 0:
        return 0
    return int(np.max(np.abs(r - c)))


def interval_cholesky(B: IntervalMatrix) -> IntervalMatrix:
    """Interval Cholesky factor R (upper): every member B' has a factor in R.

    Fails with :class:`NotProvablyPositiveDefinite` when a pivot interval
    reaches a non-positive number.  Band structure is detected and the
    update window restricted accordingly (Cholesky preserves bandwidth).
    """
    if B.sym != HERMITIAN:
        raise ValueError("interval_cholesky requires a hermitian-flagged matrix")
    bk = get_backend()
    n = B.rows
    bw = _bandwidth(B)
    slo, shi = B.lo.copy(), B.hi.copy()
    cplx = B.is_complex
    if cplx:
        silo, sihi = B.lo_im.copy(), B.hi_im.copy()
        rilo, rihi = np.zeros((n, n)), np.zeros((n, n))
    rlo, rhi = np.zeros((n, n)), np.zeros((n, n))
    for k in range(n):
        plo, phi = slo[k, k], shi[k, k]
        if plo <= 0.0:
            raise NotProvablyPositiveDefinite(
                f"pivot {k}: diagonal interval [{plo}, {phi}] reaches a non-positive number"
            )
        dlo, dhi = bk.sqrt_down(plo), bk.sqrt_up(phi)
        rlo[k, k], rhi[k, k] = dlo, dhi
        w = min(n, k + 1 + bw)
        if k + 1 >= w:
            continue
        a, b = slo[k, k + 1:w], shi[k, k + 1:w]
        qlo, qhi = vr.viv_div_pos(a, b, dlo, dhi)
        rlo[k, k + 1:w], rhi[k, k + 1:w] = qlo, qhi
        if cplx:
            qilo, qihi = vr.viv_div_pos(silo[k, k + 1:w], sihi[k, k + 1:w], dlo, dhi)
            rilo[k, k + 1:w], rihi[k, k + 1:w] = qilo, qihi
            # outer product conj(q)_i q_j:
            #   re = re_i re_j + im_i im_j,  im = re_i im_j - im_i re_j
            rr = vr.viv_mul(qlo[:, None], qhi[:, None], qlo[None, :], qhi[None, :])
            ii = vr.viv_mul(qilo[:, None], qihi[:, None], qilo[None, :], qihi[None, :])
            ri = vr.viv_mul(qlo[:, None], qhi[:, None], qilo[None, :], qihi[None, :])
            ir = vr.viv_mul(qilo[:, None], qihi[:, None], qlo[None, :], qhi[None, :])
            ore_lo = vr.vadd_down(rr[0], ii[0])
            ore_hi = vr.vadd_up(rr[1], ii[1])
            oim_lo = vr.vsub_down(ri[0], ir[1])
            oim_hi = vr.vsub_up(ri[1], ir[0])
            silo[k + 1:w, k + 1:w] = vr.vsub_down(silo[k + 1:w, k + 1:w], oim_hi)
            sihi[k + 1:w, k + 1:w] = vr.vsub_up(sihi[k + 1:w, k + 1:w], oim_lo)
        else:
            ore_lo, ore_hi = vr.viv_mul(qlo[:, None], qhi[:, None], qlo[None, :], qhi[None, :])
        slo[k + 1:w, k + 1:w] = vr.vsub_down(slo[k + 1:w, k + 1:w], ore_hi)
        shi[k + 1:w, k + 1:w] = vr.vsub_up(shi[k + 1:w, k + 1:w], ore_lo)
    if cplx:
        return IntervalMatrix(rlo, rhi, rilo, rihi, sym=UPPER)
    return IntervalMatrix(rlo, rhi, sym=UPPER)


# -- verified positive definiteness --------------------------------------


def _rad_mag(A: IntervalMatrix) -> np.ndarray:
    r = A.rad()
    if A.lo_im is None:
        return r
    return _hypot_up(r[0], r[1])


def verify_spd(M: IntervalMatrix) -> bool:
    """True only if every member of M is positive definite.

    Shifted floating Cholesky: factor mid(M) - c*I and certify via the
    a-posteriori backward-error bound that c exceeds radius, rounding and
    representation errors together.  False is always inconclusive, never a
    statement that some member is indefinite.
    """
    if M.sym != HERMITIAN:
        raise ValueError("verify_spd requires a hermitian-flagged matrix")
    n = M.rows
    mid = M.mid()
    if not np.isfinite(mid).all():
        return False
    mid = (mid + mid.conj().T) / 2.0
    rho_rad = float(np.max(vr.nonneg_sum_up(_rad_mag(M), axis=1)))
    if not np.isfinite(rho_rad):
        return False
    gam = vr.gamma_up(3 * (n + 1))
    amid = np.abs(mid)
    c = rho_rad + gam * float(np.max(amid.sum(axis=1))) + n * 2.0 ** -1060
    for _ in range(12):
        F = mid.copy()
        F[np.diag_indices(n)] -= c
        try:
            R = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            return False
        if np.iscomplexobj(R):
            if not (np.isfinite(R.real).all() and np.isfinite(R.imag).all()):
                return False
        elif not np.isfinite(R).all():
            return False
        aR = np.abs(R)
        with np.errstate(all="ignore"):
            t = float(np.max(aR.T @ aR.sum(axis=1)))
        e_fact = gam * t * (1.0 + 16.0 * n * vr.U)
        e_diag = 2.0 * vr.U * float(np.max(np.abs(np.diag(F)))) + 2.0 ** -1060
        need = (e_fact + e_diag + rho_rad) * (1.0 + 2.0 ** -40) + 2.0 ** -1060
        if c >= need:
            return True
        c = 2.0 * need
    return False


# -- verified linear-system enclosure -------------------------------------


def enclose_solve(A: IntervalMatrix, C: IntervalMatrix) -> IntervalMatrix:
    """Enclosure of {A'^{-1} C' : A' in A, C' in C} via residual iteration.

    One-step approximate-inverse enclosure: with X ~ mid(A)^{-1} and
    beta = ||I - X A|| < 1, the set lies in X C inflated entrywise by
    ||X C|| beta / (1 - beta).
    """
    if A.rows != A.cols:
        raise ValueError("coefficient matrix must be square")
    if A.rows != C.rows:
        raise ValueError("dimension mismatch")
    bk = get_backend()
    mid = A.mid()
    try:
        X = np.linalg.inv(mid)
    except np.linalg.LinAlgError as exc:
        raise NotVerifiablyNonsingular("approximate inverse failed") from exc
    if not np.isfinite(X).all():
        raise NotVerifiablyNonsingular("approximate inverse is not finite")
    Xi = IntervalMatrix.from_point(X)
    E = IntervalMatrix.identity(A.rows) - imm_multiply(Xi, A)
    beta = nrmbnd(E)
    if not beta < 1.0:
        raise NotVerifiablyNonsingular(f"residual norm bound {beta} >= 1")
    Y = imm_multiply(Xi, C)
    r = bk.div_up(bk.mul_up(nrmbnd(Y), beta), bk.sub_down(1.0, beta))
    return Y.widen_by(r)


# -- smallest eigenvalue of an SPD interval matrix ------------------------


def lower_bound_sigma_min_spd(B: IntervalMatrix, shrink: float = 0.99, retries: int = 40) -> float:
    """Certified s >= 0 with sigma_min(B') >= s for every member B'."""
    if B.sym != HERMITIAN:
        raise ValueError("hermitian-flagged matrix required")
    from scipy.linalg import eigh

    mid = B.mid()
    mid = (mid + mid.conj().T) / 2.0
    try:
        lam = float(eigh(mid, eigvals_only=True, subset_by_index=(0, 0))[0])
    except (np.linalg.LinAlgError, ValueError):
        return 0.0
    if not np.isfinite(lam) or lam <= 0.0:
        return 0.0
    s = shrink * lam
    for _ in range(retries):
        if s <= 0.0:
            return 0.0
        if verify_spd(B.add_diag(-s)):
            return s
        s *= 0.5
    return 0.0


# -- structure builders ----------------------------------------------------


def real_embedding(A: IntervalMatrix, B: IntervalMatrix) -> EmbeddingPair:
    """Real 2n x 2n doubling [[Re, -Im], [Im, Re]] of the pencil (A, B)."""
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError("pencil matrices must be square and equal size")
    if B.sym != HERMITIAN:
        raise ValueError("B must be hermitian-flagged")

    def blocks(M):
        re = IntervalMatrix(M.lo.copy(), M.hi.copy())
        il, ih = M.im_bounds()
        im = IntervalMatrix(il.copy(), ih.copy())
        return re, im

    are, aim = blocks(A)
    bre, bim = blocks(B)
    Abar = IntervalMatrix.block2x2(are, -aim, aim, are)
    Bbar = IntervalMatrix.block2x2(bre, -bim, bim, bre, sym=HERMITIAN)
    return EmbeddingPair(Abar, Bbar)


def augment_pair(A: IntervalMatrix, B: IntervalMatrix, theta: float) -> IntervalMatrix:
    """Hermitian [[theta B, A^H], [A, theta B]] of size 2n."""
    if A.shape != B.shape or A.rows != A.cols:
        raise ValueError("matrices must be square and equal size")
    if B.sym != HERMITIAN:
        raise ValueError("B must be hermitian-flagged")
    tb = B.scale(float(theta))
    return IntervalMatrix.block2x2(tb, A.H(), A, tb, sym=HERMITIAN)
