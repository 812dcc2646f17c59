"""Approximate floating-point kernels.

Everything here runs in plain binary64 and only influences how *tight* the
verified enclosures come out, never whether they are valid; the rigorous
layer re-derives all guarantees from residuals.  Standard factorizations
are delegated to LAPACK (via numpy/scipy); the one-sided Jacobi SVD is
implemented here and used by default at small sizes, where its high
relative accuracy is cheap to have.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import PivotFailure

__all__ = [
    "BsvdFactors",
    "LdlFactors",
    "InertiaCount",
    "approx_cholesky",
    "approx_svd",
    "bsvd_decompose",
    "approx_ldlt",
    "inertia_of_D",
    "approx_gen_eig_extreme",
    "approx_inverse",
]

JACOBI_SIZE_LIMIT = 120  # larger problems go to LAPACK by default


@dataclass(frozen=True)
class BsvdFactors:
    """Approximate factors with A V_B ~ B U_B Sigma and X^H B X ~ I.

    ``sigma`` is sorted non-increasing with nonnegative entries.
    """

    U_B: np.ndarray
    sigma: np.ndarray
    V_B: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=np.float64)
        if (s < 0).any() or (np.diff(s) > 0).any():
            raise ValueError("sigma must be nonnegative and non-increasing")


@dataclass(frozen=True)
class LdlFactors:
    """P A P^T ~ L D L^H with D block diagonal (1x1 and 2x2 blocks)."""

    L: np.ndarray
    D: np.ndarray
    blocks: tuple  # (start, size) per diagonal block
    perm: np.ndarray


@dataclass(frozen=True)
class InertiaCount:
    npe: int
    nne: int
    nze: int

    @property
    def dim(self):
        return self.npe + self.nne + self.nze


def _all_finite(a: np.ndarray) -> bool:
    return bool(np.isfinite(a).all())


def approx_cholesky(B: np.ndarray) -> np.ndarray:
    """Upper-triangular R with R^H R ~ B; raises PivotFailure if B is not
    numerically positive definite."""
    try:
        R = sla.cholesky(B, lower=False)
    except np.linalg.LinAlgError as exc:
        raise PivotFailure(str(exc)) from exc
    return R


@lru_cache(maxsize=32)
def _round_robin(m: int):
    """Tournament pairing: m-1 rounds of disjoint column pairs (m even via
    a dummy slot that sits out)."""
    players = list(range(m)) + ([m] if m % 2 else [])
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        ps, qs = [], []
        for i in range(k // 2):
            a, b = players[i], players[k - 1 - i]
            if a < m and b < m:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _svd_jacobi(M: np.ndarray, max_sweeps: int = 60, tol: float = 2.0 ** -52):
    """One-sided Jacobi on columns; returns (U, sigma, V) with M = U S V^H."""
    if M.shape[0] != M.shape[1]:
        raise ValueError("jacobi backend expects a square matrix")
    n = M.shape[0]
    A = np.array(M, dtype=complex if np.iscomplexobj(M) else np.float64)
    V = np.eye(n, dtype=A.dtype)
    if n > 1:
        converged = False
        for _ in range(max_sweeps):
            rotated = False
            for ps, qs in _round_robin(n):
                cp, cq = A[:, ps], A[:, qs]
                app = np.einsum("ij,ij->j", cp.conj(), cp).real
                aqq = np.einsum("ij,ij->j", cq.conj(), cq).real
                apq = np.einsum("ij,ij->j", cp.conj(), cq)
                a = np.abs(apq)
                with np.errstate(all="ignore"):
                    need = a > tol * np.sqrt(app * aqq)
                need &= (app > 0) & (aqq > 0)
                if not need.any():
                    continue
                rotated = True
                ip, iq = ps[need], qs[need]
                aa, pp, qq = a[need], app[need], aqq[need]
                tau = (qq - pp) / (2.0 * aa)
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t[tau == 0] = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = (t * c) * (apq[need] / aa)
                cp, cq = A[:, ip], A[:, iq]
                A[:, ip] = c * cp - np.conj(s) * cq
                A[:, iq] = s * cp + c * cq
                vp, vq = V[:, ip], V[:, iq]
                V[:, ip] = c * vp - np.conj(s) * vq
                V[:, iq] = s * vp + c * vq
            if not rotated:
                converged = True
                break
        if not converged:
            raise np.linalg.LinAlgError("jacobi sweeps did not converge")
    sig = np.linalg.norm(A, axis=0)
    U = np.array(A)
    for j in range(n):
        if sig[j] > 0:
            U[:, j] /= sig[j]
    zero = np.nonzero(sig == 0)[0]
    if zero.size:
        # complete columns of zero singular values to an orthonormal basis
        keep = np.nonzero(sig > 0)[0]
        Q, _ = np.linalg.qr(np.hstack([U[:, keep], np.eye(n, dtype=A.dtype)]))
        for idx, j in enumerate(zero):
            U[:, j] = Q[:, keep.size + idx]
    order = np.argsort(-sig, kind="stable")
    return U[:, order], sig[order], V[:, order]


def approx_svd(M: np.ndarray, backend: str = "auto"):
    """SVD factors (U, sigma, V) with M ~ U diag(sigma) V^H, sigma sorted.

    ``auto`` uses one-sided Jacobi up to JACOBI_SIZE_LIMIT and LAPACK above.
    """
    M = np.atleast_2d(np.asarray(M))
    if not _all_finite(M):
        raise ValueError("non-finite entries")
    if backend == "auto":
        backend = "jacobi" if max(M.shape) <= JACOBI_SIZE_LIMIT and M.shape[0] == M.shape[1] else "lapack"
    if backend == "jacobi":
        return _svd_jacobi(M)
    if backend == "lapack":
        U, s, Vh = np.linalg.svd(M)
        return U, s, Vh.conj().T
    raise ValueError(f"unknown backend {backend!r}")


def bsvd_decompose(A: np.ndarray, B: np.ndarray, svd_backend: str = "auto") -> BsvdFactors:
    """Factor the pair: U_B = R^-1 U, V_B = R^-1 V, sigma from the SVD of
    R^-H A R^-1 (triangular solves throughout, no explicit inverse)."""
    A = np.atleast_2d(np.asarray(A))
    B = np.atleast_2d(np.asarray(B))
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square and of equal size")
    R = approx_cholesky(B)
    Y = sla.solve_triangular(R, A, trans="C")          # R^-H A
    M = sla.solve_triangular(R, Y.conj().T, trans="C").conj().T  # (R^-H A) R^-1
    if not _all_finite(M):
        raise PivotFailure("triangular solve produced non-finite values")
    U, sig, V = approx_svd(M, backend=svd_backend)
    U_B = sla.solve_triangular(R, U)
    V_B = sla.solve_triangular(R, V)
    if not (_all_finite(U_B) and _all_finite(V_B)):
        raise PivotFailure("backward substitution produced non-finite values")
    return BsvdFactors(U_B, sig, V_B)


def approx_ldlt(M: np.ndarray) -> LdlFactors:
    """Bunch-Kaufman LDL^H with partial pivoting (LAPACK sytrf/hetrf)."""
    M = np.atleast_2d(np.asarray(M))
    try:
        L, D, perm = sla.ldl(M, lower=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise PivotFailure(f"ldl factorization failed: {exc}") from exc
    if not (_all_finite(L) and _all_finite(D)):
        raise PivotFailure("ldl factorization produced non-finite values")
    n = M.shape[0]
    blocks = []
    i = 0
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0:
            blocks.append((i, 2))
            i += 2
        else:
            blocks.append((i, 1))
            i += 1
    return LdlFactors(L, D, tuple(blocks), perm)


def inertia_of_D(factors: LdlFactors) -> InertiaCount:
    """Exact inertia of the computed block-diagonal factor.

    2x2 blocks are classified by the exact rational sign of det and trace,
    so the count is a true statement about the floating-point D."""
    D = factors.D
    npe = nne = nze = 0
    for start, size in factors.blocks:
        if size == 1:
            v = float(np.real(D[start, start]))
            if v > 0:
                npe += 1
            elif v < 0:
                nne += 1
            else:
                nze += 1
            continue
        a = float(np.real(D[start, start]))
        c = float(np.real(D[start + 1, start + 1]))
        b = complex(D[start + 1, start])
        det = Fraction(a) * Fraction(c) - Fraction(b.real) ** 2 - Fraction(b.imag) ** 2
        tr = Fraction(a) + Fraction(c)
        if det < 0:
            npe += 1
            nne += 1
        elif det > 0:
            if tr > 0:
                npe += 2
            else:
                nne += 2
        else:
            if tr > 0:
                npe += 1
                nze += 1
            elif tr < 0:
                nne += 1
                nze += 1
            else:
                nze += 2
    return InertiaCount(npe, nne, nze)


def approx_gen_eig_extreme(A: np.ndarray, B: np.ndarray, prefer_positive: bool = False):
    """Smallest-magnitude eigenvalue of B^-1 A (A hermitian, B SPD) and its
    approximate eigenvector; accuracy is best effort."""
    A = np.atleast_2d(np.asarray(A))
    B = np.atleast_2d(np.asarray(B))
    A = (A + A.conj().T) / 2.0
    B = (B + B.conj().T) / 2.0
    w, Q = sla.eigh(A, B)
    if prefer_positive and (w > 0).any():
        i = int(np.argmax(w > 0))  # smallest positive (w ascending)
    else:
        i = int(np.argmin(np.abs(w)))
    return float(abs(w[i])), Q[:, i].copy()


def approx_inverse(A: np.ndarray) -> np.ndarray:
    """X with ||I - X A|| small for well-conditioned A."""
    X = np.linalg.inv(np.atleast_2d(np.asarray(A)))
    if not _all_finite(X):
        raise np.linalg.LinAlgError("inverse is not finite")
    return X
