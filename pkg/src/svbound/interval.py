"""Scalar intervals with guaranteed containment.

``RealInterval`` is a closed interval [lo, hi] of binary64 endpoints;
``ComplexInterval`` is the axis-aligned rectangle re x im.  Every operation
returns an interval that contains the exact set result whatever rounding
occurred, using the directed scalar kernels from :mod:`svbound.rounding`.
Endpoints may be infinite only as the result of overflow widening; NaN is
rejected at construction because a silent NaN would void every containment
guarantee downstream.

Values are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .rounding import RoundingBackend, get_backend

__all__ = [
    "RealInterval",
    "ComplexInterval",
    "Interval",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_div",
    "iv_neg",
    "iv_square",
    "iv_sqrt",
    "iv_sqrt_bounds",
    "mid_rad",
    "mag",
    "mig",
    "iv_hull",
    "iv_intersect",
]


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN endpoint")
        if lo > hi or lo == math.inf or hi == -math.inf:
            raise ValueError(f"empty or inverted interval [{lo}, {hi}]")

    @classmethod
    def point(cls, x: float) -> "RealInterval":
        return cls(x, x)

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def issubset(self, other: "RealInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other):
        return iv_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _coerce(other))

    def __rsub__(self, other):
        return iv_sub(_coerce(other), self)

    def __mul__(self, other):
        return iv_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, _coerce(other))

    def __rtruediv__(self, other):
        return iv_div(_coerce(other), self)

    def __neg__(self):
        return RealInterval(-self.hi, -self.lo)

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class ComplexInterval:
    re: RealInterval
    im: RealInterval

    @classmethod
    def point(cls, z: complex) -> "ComplexInterval":
        z = complex(z)
        return cls(RealInterval.point(z.real), RealInterval.point(z.imag))

    def __contains__(self, z: complex) -> bool:
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def issubset(self, other: "ComplexInterval") -> bool:
        return self.re.issubset(other.re) and self.im.issubset(other.im)

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def __add__(self, other):
        return iv_add(self, _coerce_c(other))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _coerce_c(other))

    def __rsub__(self, other):
        return iv_sub(_coerce_c(other), self)

    def __mul__(self, other):
        return iv_mul(self, _coerce_c(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __repr__(self):
        return f"({self.re!r} + {self.im!r}i)"


Interval = Union[RealInterval, ComplexInterval]


def _coerce(x) -> RealInterval:
    if isinstance(x, RealInterval):
        return x
    return RealInterval.point(float(x))


def _coerce_c(x) -> Interval:
    if isinstance(x, (RealInterval, ComplexInterval)):
        return x
    if isinstance(x, complex) and x.imag != 0.0:
        return ComplexInterval.point(x)
    return RealInterval.point(float(x))


def _promote(a: Interval) -> ComplexInterval:
    if isinstance(a, ComplexInterval):
        return a
    return ComplexInterval(a, RealInterval(0.0, 0.0))


def iv_add(a: Interval, b: Interval, backend: RoundingBackend | None = None) -> Interval:
    bk = backend or get_backend()
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        return ComplexInterval(iv_add(a.re, b.re, bk), iv_add(a.im, b.im, bk))
    return RealInterval(bk.add_down(a.lo, b.lo), bk.add_up(a.hi, b.hi))


def iv_sub(a: Interval, b: Interval, backend: RoundingBackend | None = None) -> Interval:
    bk = backend or get_backend()
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        return ComplexInterval(iv_sub(a.re, b.re, bk), iv_sub(a.im, b.im, bk))
    return RealInterval(bk.sub_down(a.lo, b.hi), bk.sub_up(a.hi, b.lo))


def iv_mul(a: Interval, b: Interval, backend: RoundingBackend | None = None) -> Interval:
    bk = backend or get_backend()
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        re = iv_sub(iv_mul(a.re, b.re, bk), iv_mul(a.im, b.im, bk), bk)
        im = iv_add(iv_mul(a.re, b.im, bk), iv_mul(a.im, b.re, bk), bk)
        return ComplexInterval(re, im)
    lo = min(
        bk.mul_down(a.lo, b.lo),
        bk.mul_down(a.lo, b.hi),
        bk.mul_down(a.hi, b.lo),
        bk.mul_down(a.hi, b.hi),
    )
    hi = max(
        bk.mul_up(a.lo, b.lo),
        bk.mul_up(a.lo, b.hi),
        bk.mul_up(a.hi, b.lo),
        bk.mul_up(a.hi, b.hi),
    )
    return RealInterval(lo, hi)


def iv_div(a: Interval, b: Interval, backend: RoundingBackend | None = None) -> Interval:
    """Interval quotient; the divisor must exclude zero."""
    bk = backend or get_backend()
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        den = iv_add(iv_square(b.re, bk), iv_square(b.im, bk), bk)
        if den.lo <= 0.0:
            raise ZeroDivisionError("complex interval divisor contains zero")
        num = iv_mul(a, b.conj(), bk)
        return ComplexInterval(iv_div(num.re, den, bk), iv_div(num.im, den, bk))
    if b.lo <= 0.0 <= b.hi:
        raise ZeroDivisionError("interval divisor contains zero")
    lo = min(
        bk.div_down(a.lo, b.lo),
        bk.div_down(a.lo, b.hi),
        bk.div_down(a.hi, b.lo),
        bk.div_down(a.hi, b.hi),
    )
    hi = max(
        bk.div_up(a.lo, b.lo),
        bk.div_up(a.lo, b.hi),
        bk.div_up(a.hi, b.lo),
        bk.div_up(a.hi, b.hi),
    )
    return RealInterval(lo, hi)


def iv_neg(a: Interval) -> Interval:
    return -a


def iv_square(a: RealInterval, backend: RoundingBackend | None = None) -> RealInterval:
    """x**2 over the interval; tighter than iv_mul(a, a) around zero."""
    bk = backend or get_backend()
    if a.lo >= 0.0:
        return RealInterval(bk.mul_down(a.lo, a.lo), bk.mul_up(a.hi, a.hi))
    if a.hi <= 0.0:
        return RealInterval(bk.mul_down(a.hi, a.hi), bk.mul_up(a.lo, a.lo))
    m = max(-a.lo, a.hi)
    return RealInterval(0.0, bk.mul_up(m, m))


def iv_sqrt(a: RealInterval, backend: RoundingBackend | None = None) -> RealInterval:
    bk = backend or get_backend()
    if a.lo < 0.0:
        raise ValueError("interval extends below zero")
    return RealInterval(bk.sqrt_down(a.lo), bk.sqrt_up(a.hi))


def iv_sqrt_bounds(x: float, backend: RoundingBackend | None = None) -> tuple[float, float]:
    """Adjacent-or-equal floats (lo, hi) with lo <= sqrt(x) <= hi."""
    bk = backend or get_backend()
    if x < 0.0:
        raise ValueError("sqrt of a negative number")
    return bk.sqrt_down(x), bk.sqrt_up(x)


def mid_rad(a: Interval, backend: RoundingBackend | None = None):
    """Representable midpoint and upward-rounded radius with
    [mid - rad, mid + rad] containing ``a`` (per axis for rectangles)."""
    bk = backend or get_backend()
    if isinstance(a, ComplexInterval):
        mre, rre = mid_rad(a.re, bk)
        mim, rim = mid_rad(a.im, bk)
        return complex(mre, mim), (rre, rim)
    m = 0.5 * (a.lo + a.hi)
    if not math.isfinite(m):
        m = 0.5 * a.lo + 0.5 * a.hi
    if not math.isfinite(m):
        m = 0.0
    r = max(bk.sub_up(m, a.lo), bk.sub_up(a.hi, m))
    return m, r


def mag(a: Interval) -> float:
    """Upper bound on |x| over all x in ``a``."""
    if isinstance(a, ComplexInterval):
        h = math.hypot(mag(a.re), mag(a.im))
        if math.isfinite(h):
            h = math.nextafter(math.nextafter(h, math.inf), math.inf)
        return h
    return max(abs(a.lo), abs(a.hi))


def mig(a: Interval) -> float:
    """Lower bound on |x| over all x in ``a`` (0 if the interval meets 0)."""
    if isinstance(a, ComplexInterval):
        h = math.hypot(mig(a.re), mig(a.im))
        return max(0.0, math.nextafter(math.nextafter(h, -math.inf), -math.inf))
    if a.lo > 0.0:
        return a.lo
    if a.hi < 0.0:
        return -a.hi
    return 0.0


def iv_hull(a: Interval, b: Interval) -> Interval:
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        return ComplexInterval(iv_hull(a.re, b.re), iv_hull(a.im, b.im))
    return RealInterval(min(a.lo, b.lo), max(a.hi, b.hi))


def iv_intersect(a: Interval, b: Interval) -> Interval:
    if isinstance(a, ComplexInterval) or isinstance(b, ComplexInterval):
        a, b = _promote(a), _promote(b)
        return ComplexInterval(iv_intersect(a.re, b.re), iv_intersect(a.im, b.im))
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        raise ValueError("empty intersection")
    return RealInterval(lo, hi)
