"""Seeded test-matrix generators.

Random matrices come from numpy's Philox counter-based generator (stream
fixed by the seed, identical across platforms for a given numpy release);
the convection-diffusion pair is assembled in interval arithmetic so its
entries rigorously enclose the exact element integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interval import RealInterval, iv_add, iv_div, iv_mul, iv_sub
from .ivlinalg import HERMITIAN, IntervalMatrix
from .rounding import get_backend

__all__ = [
    "FemProblem",
    "GeneratorSpec",
    "gen_randn",
    "gen_shifted_sym",
    "gen_randsvd",
    "gen_spd_randsvd",
    "fem_assemble",
    "generate",
]


@dataclass(frozen=True)
class FemProblem:
    """Uniform-mesh convection-diffusion problem on the unit square.

    ``m`` interior nodes per axis (n = m^2), homogeneous Dirichlet data,
    rotation strength ``R_coef`` in the advection field
    b(x, y) = R (0.5 - y, x - 0.5) and constant reaction ``c_coef``.
    The mesh width is exactly 1/(m+1); it is represented as that quotient,
    never as a rounded float.
    """

    m: int
    R_coef: float = 0.0
    c_coef: complex = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")

    @property
    def n(self) -> int:
        return self.m * self.m

    @property
    def h_denominator(self) -> int:
        return self.m + 1


@dataclass(frozen=True)
class GeneratorSpec:
    """Deterministic description of one experiment matrix."""

    kind: str  # randn | shifted_sym | randsvd | spd_randsvd | fem
    n: int = 0
    kappa: float | None = None
    seed: int = 0
    complex_entries: bool = False
    fem: FemProblem | None = None

    def __post_init__(self):
        kinds = ("randn", "shifted_sym", "randsvd", "spd_randsvd", "fem")
        if self.kind not in kinds:
            raise ValueError(f"kind must be one of {kinds}")
        if self.kind == "fem":
            if self.fem is None:
                raise ValueError("fem kind needs a FemProblem")
        elif self.n < 1:
            raise ValueError("n must be positive")
        if self.kappa is not None and self.kappa < 1:
            raise ValueError("kappa must be >= 1")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _normals(rng, n, complex_entries):
    if complex_entries:
        return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return rng.standard_normal((n, n))


def gen_randn(n: int, seed: int, complex_entries: bool = False) -> np.ndarray:
    """i.i.d. standard normal entries (complex: unit-variance CN(0,1))."""
    return _normals(_rng(seed), n, complex_entries)


def gen_shifted_sym(n: int, seed: int, complex_entries: bool = False) -> np.ndarray:
    """n I + sym(randn): Hermitian, positive definite with high probability,
    condition number near 1 for large n."""
    b = _normals(_rng(seed), n, complex_entries)
    return n * np.eye(n) + (b + b.conj().T) * 0.5


def _haar(rng, n, complex_entries):
    q, r = np.linalg.qr(_normals(rng, n, complex_entries))
    # fix the phase so the distribution is Haar and the output deterministic
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def _geometric_sigma(n, kappa):
    if n == 1:
        return np.ones(1)
    return np.asarray(kappa, dtype=np.float64) ** (-np.arange(n) / (n - 1))


def gen_randsvd(n: int, kappa: float, seed: int, complex_entries: bool = False) -> np.ndarray:
    """Random matrix with geometrically spaced singular values,
    sigma_max ~ 1 and condition number ``kappa``."""
    rng = _rng(seed)
    sig = _geometric_sigma(n, kappa)
    u = _haar(rng, n, complex_entries)
    v = _haar(rng, n, complex_entries)
    return (u * sig) @ v.conj().T


def gen_spd_randsvd(n: int, kappa: float, seed: int, complex_entries: bool = False) -> np.ndarray:
    """Hermitian positive definite with geometric eigenvalues and
    condition number ``kappa``."""
    rng = _rng(seed)
    sig = _geometric_sigma(n, kappa)
    q = _haar(rng, n, complex_entries)
    a = (q * sig) @ q.conj().T
    return (a + a.conj().T) / 2.0


# ---------------------------------------------------------------------------
# P1 finite elements on the uniform right-triangle mesh of the unit square


_HALF = RealInterval.point(0.5)
# basis values at the three edge midpoints (edge e, vertex k)
_PHI_MID = ((0.5, 0.0, 0.5), (0.5, 0.5, 0.0), (0.0, 0.5, 0.5))
# vertex offset patterns: diagonal runs from (i, j) to (i+1, j+1)
_TRI_PATTERNS = (((0, 0), (1, 0), (1, 1)), ((0, 0), (1, 1), (0, 1)))


def _tri_geometry(pattern, h):
    """Gradients, area and local mass matrix for one triangle orientation;
    identical for every cell of the uniform mesh."""
    verts = [(iv_mul(RealInterval.point(di), h), iv_mul(RealInterval.point(dj), h)) for di, dj in pattern]
    (x0, y0), (x1, y1), (x2, y2) = verts
    det = iv_sub(iv_mul(iv_sub(x1, x0), iv_sub(y2, y0)), iv_mul(iv_sub(y1, y0), iv_sub(x2, x0)))
    area = iv_mul(_HALF, det)
    grads = [
        (iv_div(iv_sub(y1, y2), det), iv_div(iv_sub(x2, x1), det)),
        (iv_div(iv_sub(y2, y0), det), iv_div(iv_sub(x0, x2), det)),
        (iv_div(iv_sub(y0, y1), det), iv_div(iv_sub(x1, x0), det)),
    ]
    stiff = [[iv_mul(area, iv_add(iv_mul(grads[l][0], grads[k][0]), iv_mul(grads[l][1], grads[k][1])))
              for l in range(3)] for k in range(3)]
    third = iv_div(area, RealInterval.point(3.0))
    mass = [[None] * 3 for _ in range(3)]
    for k in range(3):
        for l in range(3):
            acc = RealInterval.point(0.0)
            for e in range(3):
                acc = iv_add(acc, RealInterval.point(_PHI_MID[e][k] * _PHI_MID[e][l]))
            mass[k][l] = iv_mul(third, acc)
    return grads, area, third, stiff, mass


def fem_assemble(p: FemProblem) -> tuple[IntervalMatrix, IntervalMatrix]:
    """Assemble (A, B): B the stiffness matrix, A stiffness + convection
    + reaction, all element integrals enclosed in interval arithmetic.

    The edge-midpoint quadrature is exact for the (at most quadratic)
    integrands, so the enclosures carry rounding error only.
    """
    m = p.m
    n = p.n
    h = iv_div(RealInterval.point(1.0), RealInterval.point(float(m + 1)))
    coords = [iv_mul(RealInterval.point(float(i)), h) for i in range(m + 2)]
    r_coef = RealInterval.point(float(p.R_coef))
    c = complex(p.c_coef)
    is_complex = c.imag != 0.0
    c_re = RealInterval.point(c.real)
    c_im = RealInterval.point(c.imag)

    geo = [_tri_geometry(pattern, h) for pattern in _TRI_PATTERNS]

    a_lo = np.zeros((n, n))
    a_hi = np.zeros((n, n))
    if is_complex:
        a_ilo = np.zeros((n, n))
        a_ihi = np.zeros((n, n))
    b_lo = np.zeros((n, n))
    b_hi = np.zeros((n, n))

    def node(i, j):
        return (j - 1) * m + (i - 1) if (1 <= i <= m and 1 <= j <= m) else -1

    for cj in range(m + 1):
        for ci in range(m + 1):
            for pattern, (grads, _area, third, stiff, mass) in zip(_TRI_PATTERNS, geo):
                nodes = [node(ci + di, cj + dj) for di, dj in pattern]
                if all(v < 0 for v in nodes):
                    continue
                # advection at the three edge midpoints of this element
                verts = [(coords[ci + di], coords[cj + dj]) for di, dj in pattern]
                bvals = []
                for e in range(3):
                    xa, ya = verts[e]
                    xb, yb = verts[(e + 1) % 3]
                    xm = iv_mul(_HALF, iv_add(xa, xb))
                    ym = iv_mul(_HALF, iv_add(ya, yb))
                    b1 = iv_mul(r_coef, iv_sub(_HALF, ym))
                    b2 = iv_mul(r_coef, iv_sub(xm, _HALF))
                    bvals.append((b1, b2))
                bdotg = [[iv_add(iv_mul(bvals[e][0], grads[l][0]), iv_mul(bvals[e][1], grads[l][1]))
                          for l in range(3)] for e in range(3)]
                for k in range(3):
                    gi = nodes[k]
                    if gi < 0:
                        continue
                    for l in range(3):
                        gj = nodes[l]
                        if gj < 0:
                            continue
                        conv = RealInterval.point(0.0)
                        for e in range(3):
                            w = _PHI_MID[e][k]
                            if w:
                                conv = iv_add(conv, iv_mul(RealInterval.point(w), bdotg[e][l]))
                        conv = iv_mul(third, conv)
                        kk = stiff[k][l]
                        ms = mass[k][l]
                        re = iv_add(iv_add(kk, conv), iv_mul(c_re, ms))
                        bk_ = kk
                        b_lo[gi, gj] = _acc_down(b_lo[gi, gj], bk_.lo)
                        b_hi[gi, gj] = _acc_up(b_hi[gi, gj], bk_.hi)
                        a_lo[gi, gj] = _acc_down(a_lo[gi, gj], re.lo)
                        a_hi[gi, gj] = _acc_up(a_hi[gi, gj], re.hi)
                        if is_complex:
                            im = iv_mul(c_im, ms)
                            a_ilo[gi, gj] = _acc_down(a_ilo[gi, gj], im.lo)
                            a_ihi[gi, gj] = _acc_up(a_ihi[gi, gj], im.hi)

    B = IntervalMatrix(b_lo, b_hi, sym=HERMITIAN)
    if is_complex:
        A = IntervalMatrix(a_lo, a_hi, a_ilo, a_ihi)
    else:
        A = IntervalMatrix(a_lo, a_hi)
    return A, B


def _acc_down(acc, x):
    return get_backend().add_down(acc, x)


def _acc_up(acc, x):
    return get_backend().add_up(acc, x)


def generate(spec: GeneratorSpec):
    """Materialize a spec: point matrix for random kinds, the interval
    (A, B) pair for ``fem``."""
    if spec.kind == "fem":
        return fem_assemble(spec.fem)
    if spec.kind == "randn":
        return gen_randn(spec.n, spec.seed, spec.complex_entries)
    if spec.kind == "shifted_sym":
        return gen_shifted_sym(spec.n, spec.seed, spec.complex_entries)
    if spec.kind == "randsvd":
        if spec.kappa is None:
            raise ValueError("randsvd needs kappa")
        return gen_randsvd(spec.n, spec.kappa, spec.seed, spec.complex_entries)
    if spec.kind == "spd_randsvd":
        if spec.kappa is None:
            raise ValueError("spd_randsvd needs kappa")
        return gen_spd_randsvd(spec.n, spec.kappa, spec.seed, spec.complex_entries)
    raise AssertionError
