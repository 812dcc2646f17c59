"""High-precision reference singular values (test oracle).

Computes the singular values of R^-H A R^-1 for B = R^H R entirely in
mpmath arbitrary precision: Cholesky, explicit triangular solves, then a
one-sided Jacobi iteration (warm-started from a double-precision basis so
convergence takes a couple of sweeps, which affects speed only: the Jacobi
limit does not depend on the starting rotation).  The run is repeated at
twice the precision and both must agree to >= 40 significant bits, else
the precision is doubled and the whole procedure retried.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
from mpmath import mp, mpc, mpf

from .errors import VerificationInconclusive

__all__ = ["oracle_singular_values"]

_AGREE_BITS = 40


def _to_mp(a: np.ndarray):
    n, m = a.shape
    if np.iscomplexobj(a):
        return [[mpc(float(a[i, j].real), float(a[i, j].imag)) for j in range(m)] for i in range(n)]
    return [[mpf(float(a[i, j])) for j in range(m)] for i in range(n)]


def _conj(x):
    return x.conjugate() if isinstance(x, mpc) else x


def _chol_upper(b):
    """Upper-triangular R with R^H R = B, exact Hermitian Cholesky in mp."""
    n = len(b)
    r = [[mpf(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = b[i][j]
            for k in range(i):
                s -= _conj(r[k][i]) * r[k][j]
            if j == i:
                sr = mp.re(s)
                if sr <= 0:
                    raise VerificationInconclusive("oracle Cholesky pivot not positive")
                r[i][i] = mp.sqrt(sr)
            else:
                r[i][j] = s / r[i][i]
    return r


def _solve_rh_left(r, a):
    """Y with R^H Y = A (forward substitution; R upper triangular)."""
    n = len(a)
    y = [row[:] for row in a]
    for i in range(n):
        rii = r[i][i]
        for j in range(n):
            s = y[i][j]
            for k in range(i):
                s -= _conj(r[k][i]) * y[k][j]
            y[i][j] = s / rii
    return y


def _solve_r_right(y, r):
    """M with M R = Y (column back substitution; R upper triangular)."""
    n = len(y)
    m_ = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = y[i][j]
            for k in range(j):
                s -= m_[i][k] * r[k][j]
            m_[i][j] = s / r[j][j]
    return m_


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[mpf(0)] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for t in range(k):
            x = ai[t]
            if x == 0:
                continue
            bt = b[t]
            oi = out[i]
            for j in range(m):
                oi[j] += x * bt[j]
    return out


def _jacobi_sigma(m_, bits, max_sweeps=40):
    """Singular values via one-sided Jacobi on columns of m_ (list rows)."""
    n = len(m_)
    cols = [[m_[i][j] for i in range(n)] for j in range(n)]
    tol = mpf(2) ** (-(bits - 6))
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                cp, cq = cols[p], cols[q]
                app = mp.re(mp.fsum(_conj(x) * x for x in cp))
                aqq = mp.re(mp.fsum(_conj(x) * x for x in cq))
                apq = mp.fsum(_conj(x) * y for x, y in zip(cp, cq))
                a = abs(apq)
                if app == 0 or aqq == 0 or a <= tol * mp.sqrt(app * aqq):
                    continue
                rotated = True
                tau = (aqq - app) / (2 * a)
                t = mp.sign(tau) / (abs(tau) + mp.sqrt(1 + tau * tau)) if tau != 0 else mpf(1)
                c = 1 / mp.sqrt(1 + t * t)
                s = (t * c) * (apq / a)
                sc = _conj(s)
                for i in range(n):
                    xi, yi = cp[i], cq[i]
                    cp[i] = c * xi - sc * yi
                    cq[i] = s * xi + c * yi
        if not rotated:
            break
    else:
        raise VerificationInconclusive("oracle Jacobi did not converge")
    sig = sorted((mp.sqrt(mp.re(mp.fsum(_conj(x) * x for x in col))) for col in cols), reverse=True)
    return sig


def _sigma_at(a_np, b_np, bits):
    with mp.workprec(bits):
        a = _to_mp(a_np)
        b = _to_mp(b_np)
        r = _chol_upper(b)
        y = _solve_rh_left(r, a)
        m_ = _solve_r_right(y, r)
        # warm start: rotate into a numerically near-diagonal basis first
        try:
            rd = sla.cholesky(b_np)
            md = sla.solve_triangular(rd, sla.solve_triangular(rd, a_np, trans="C").conj().T, trans="C").conj().T
            u0, _, v0h = np.linalg.svd(md)
            w = _matmul(_matmul(_to_mp(u0.conj().T), m_), _to_mp(v0h.conj().T))
        except (np.linalg.LinAlgError, ValueError):
            w = m_
        return _jacobi_sigma(w, bits)


def oracle_singular_values(
    A: np.ndarray,
    B: np.ndarray,
    precision_bits: int = 128,
    max_retries: int = 2,
) -> np.ndarray:
    """Reference singular values of the pencil, sorted non-increasing.

    ``B`` must be positive definite at the oracle's precision.  Raises
    :class:`VerificationInconclusive` if two precisions never agree.
    """
    A = np.atleast_2d(np.asarray(A))
    B = np.atleast_2d(np.asarray(B))
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square and of equal size")
    bits = max(int(precision_bits), 64)
    for _ in range(max_retries + 1):
        s_lo = _sigma_at(A, B, bits)
        s_hi = _sigma_at(A, B, 2 * bits)
        ok = True
        with mp.workprec(4 * bits):
            for x, y in zip(s_lo, s_hi):
                ref = max(abs(y), mpf(2) ** -900)
                if abs(x - y) > ref * mpf(2) ** (-_AGREE_BITS):
                    ok = False
                    break
        if ok:
            return np.array([float(x) for x in s_hi])
        bits *= 2
    raise VerificationInconclusive("oracle precisions disagree")
