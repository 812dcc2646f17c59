"""Directed rounding for binary64 scalars.

Every interval endpoint produced by this library comes from one of the
backends below.  A backend provides lower/upper bounds of the exact result
of ``+ - * / sqrt`` on floats; the contract is

    op_down(a, b) <= exact(a op b) <= op_up(a, b)

for all finite inputs, with the additional guarantee that a representable
exact result is returned unchanged (so identities like ``[0,0] + x = x``
survive round trips).

:class:`WideningBackend` computes in round-to-nearest and decides the
rounding direction from an error-free transformation (two-sum, Dekker
product, exact rational sign tests), so its output equals true directed
rounding without touching the FPU state.  :class:`FesetroundBackend`
switches the hardware rounding mode around each operation via ``libm``;
it is faster per operation but platform specific.  Both must pass the same
containment test suite.
"""

from __future__ import annotations

import abc
import math
from fractions import Fraction

_MAX = math.ldexp(1.0, 1023) * (2.0 - 2.0 ** -52)  # largest finite binary64
_INF = math.inf
_SPLIT = 2.0 ** 27 + 1.0

# Dekker's product error is exact when the splits neither overflow nor
# drop bits to underflow; outside this window we fall back to rationals.
_DK_LO = 2.0 ** -450
_DK_HI = 2.0 ** 450
_DK_P = 2.0 ** -900


def _two_sum_err(a: float, b: float, s: float) -> float:
    """Exact error of the rounded sum: a + b == s + err (Knuth)."""
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _dekker_err(a: float, b: float, p: float) -> float:
    """Exact error of the rounded product: a * b == p + err.

    Valid only inside the magnitude window checked by the caller.
    """
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


class RoundingBackend(abc.ABC):
    """Directed realizations of the five base operations."""

    @abc.abstractmethod
    def add_down(self, a: float, b: float) -> float: ...

    @abc.abstractmethod
    def add_up(self, a: float, b: float) -> float: ...

    def sub_down(self, a: float, b: float) -> float:
        return self.add_down(a, -b)

    def sub_up(self, a: float, b: float) -> float:
        return self.add_up(a, -b)

    @abc.abstractmethod
    def mul_down(self, a: float, b: float) -> float: ...

    @abc.abstractmethod
    def mul_up(self, a: float, b: float) -> float: ...

    @abc.abstractmethod
    def div_down(self, a: float, b: float) -> float: ...

    @abc.abstractmethod
    def div_up(self, a: float, b: float) -> float: ...

    @abc.abstractmethod
    def sqrt_down(self, x: float) -> float: ...

    @abc.abstractmethod
    def sqrt_up(self, x: float) -> float: ...


class WideningBackend(RoundingBackend):
    """Round-to-nearest plus error-free corrections; no FPU mode changes.

    Addition uses two-sum, multiplication Dekker's product (with an exact
    rational fallback outside its safe magnitude window), division and
    square root an exact sign test on the remainder.  The result is true
    directed rounding on every path.
    """

    def add_down(self, a, b):
        s = a + b
        if s == _INF:
            return _MAX
        if not math.isfinite(s):
            return s
        return math.nextafter(s, -_INF) if _two_sum_err(a, b, s) < 0 else s

    def add_up(self, a, b):
        s = a + b
        if s == -_INF:
            return -_MAX
        if not math.isfinite(s):
            return s
        return math.nextafter(s, _INF) if _two_sum_err(a, b, s) > 0 else s

    def _mul_err_sign(self, a, b, p):
        if _DK_LO <= abs(a) <= _DK_HI and _DK_LO <= abs(b) <= _DK_HI and abs(p) >= _DK_P:
            e = _dekker_err(a, b, p)
            return -1 if e < 0 else (1 if e > 0 else 0)
        r = Fraction(a) * Fraction(b) - Fraction(p)
        return -1 if r < 0 else (1 if r > 0 else 0)

    def mul_down(self, a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        p = a * b
        if p == _INF:
            return _MAX
        if not math.isfinite(p):
            return p
        return math.nextafter(p, -_INF) if self._mul_err_sign(a, b, p) < 0 else p

    def mul_up(self, a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        p = a * b
        if p == -_INF:
            return -_MAX
        if not math.isfinite(p):
            return p
        return math.nextafter(p, _INF) if self._mul_err_sign(a, b, p) > 0 else p

    def _div_err_sign(self, a, b, q):
        # sign(a/b - q) = sign(a - q*b) * sign(b), evaluated exactly
        r = Fraction(a) - Fraction(q) * Fraction(b)
        s = -1 if r < 0 else (1 if r > 0 else 0)
        return s if b > 0 else -s

    def div_down(self, a, b):
        if a == 0.0:
            return 0.0
        q = a / b
        if q == _INF:
            return _MAX
        if not math.isfinite(q) or not math.isfinite(a):
            return q
        return math.nextafter(q, -_INF) if self._div_err_sign(a, b, q) < 0 else q

    def div_up(self, a, b):
        if a == 0.0:
            return 0.0
        q = a / b
        if q == -_INF:
            return -_MAX
        if not math.isfinite(q) or not math.isfinite(a):
            return q
        return math.nextafter(q, _INF) if self._div_err_sign(a, b, q) > 0 else q

    @staticmethod
    def _sqrt_scaled(x):
        # Rescale by an even power of two so the remainder sign test runs
        # on magnitudes near 1, where the rational comparison is cheap and
        # scaling back is exact.
        _, e = math.frexp(x)
        t = e // 2 if e % 2 == 0 else (e - 1) // 2
        xs = math.ldexp(x, -2 * t)
        r = math.sqrt(xs)
        rr = Fraction(r) * Fraction(r) - Fraction(xs)
        return r, rr, t

    def sqrt_down(self, x):
        if x < 0.0:
            raise ValueError("sqrt of a negative number")
        if x == 0.0:
            return 0.0
        if x == _INF:
            return _MAX
        r, rr, t = self._sqrt_scaled(x)
        if rr > 0:
            r = math.nextafter(r, -_INF)
        return math.ldexp(r, t)

    def sqrt_up(self, x):
        if x < 0.0:
            raise ValueError("sqrt of a negative number")
        if x == 0.0:
            return 0.0
        if x == _INF:
            return _INF
        r, rr, t = self._sqrt_scaled(x)
        if rr < 0:
            r = math.nextafter(r, _INF)
        return math.ldexp(r, t)


class FesetroundBackend(RoundingBackend):
    """Hardware directed rounding via ``fesetround`` from libm.

    The floating-point environment is thread local per C99, so concurrent
    use from several threads is safe; every operation restores the mode
    it found.  Only x86-64 and aarch64 mode constants are wired up.
    """

    def __init__(self):
        import ctypes
        import platform

        machine = platform.machine().lower()
        if machine in ("x86_64", "amd64"):
            self._down, self._up = 0x400, 0x800
        elif machine in ("aarch64", "arm64"):
            self._down, self._up = 0x800000, 0x400000
        else:
            raise RuntimeError(f"no fesetround constants for {machine!r}")
        self._libm = ctypes.CDLL("libm.so.6", use_errno=True)
        self._libm.fesetround.argtypes = [ctypes.c_int]
        self._libm.fegetround.restype = ctypes.c_int

    def _run(self, mode, fn):
        libm = self._libm
        prev = libm.fegetround()
        libm.fesetround(mode)
        try:
            return fn()
        finally:
            libm.fesetround(prev)

    def add_down(self, a, b):
        return self._run(self._down, lambda: a + b)

    def add_up(self, a, b):
        return self._run(self._up, lambda: a + b)

    def mul_down(self, a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        return self._run(self._down, lambda: a * b)

    def mul_up(self, a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        return self._run(self._up, lambda: a * b)

    def div_down(self, a, b):
        if a == 0.0:
            return 0.0
        return self._run(self._down, lambda: a / b)

    def div_up(self, a, b):
        if a == 0.0:
            return 0.0
        return self._run(self._up, lambda: a / b)

    def sqrt_down(self, x):
        if x < 0.0:
            raise ValueError("sqrt of a negative number")
        return self._run(self._down, lambda: math.sqrt(x))

    def sqrt_up(self, x):
        if x < 0.0:
            raise ValueError("sqrt of a negative number")
        return self._run(self._up, lambda: math.sqrt(x))


_default: RoundingBackend = WideningBackend()


def get_backend() -> RoundingBackend:
    return _default


def set_backend(backend: RoundingBackend) -> RoundingBackend:
    """Install ``backend`` as the process-wide default; returns the old one."""
    global _default
    old = _default
    _default = backend
    return old
