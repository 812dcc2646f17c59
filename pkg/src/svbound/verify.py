"""Verified bounds for the singular values of R^-H A R^-1, B = R^H R.

Four routes, one soundness contract (bounds always contain the true
values; failures are reported, never silently weakened):

* :func:`method_p`      -- interval Cholesky of B, verified solve, norm of
  the product enclosure; the pre-existing approach kept for comparison.
* :func:`verify_all_singular_values` -- residual bounds around approximate
  factors of the b-weighted SVD; encloses every singular value at once.
* :func:`method_s1`     -- positive definiteness of the squared pencil,
  certifying sigma_min >= sqrt(theta).
* :func:`method_s2`     -- inertia of the augmented matrix [[tB, A^H], [A, tB]]
  certified through an LDL^H factorization, sigma_min >= theta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _vround as vr
from .approx import BsvdFactors, approx_gen_eig_extreme, approx_ldlt, inertia_of_D
from .errors import (
    NonpositiveLowerBound,
    NotVerifiablyNonsingular,
    OrthogonalityDefectTooLarge,
    PivotFailure,
    VerificationInconclusive,
)
from .ivlinalg import (
    HERMITIAN,
    IntervalMatrix,
    augment_pair,
    enclose_solve,
    imm_multiply,
    interval_cholesky,
    lower_bound_sigma_min_spd,
    nrm2_upper,
    nrm_lower,
    nrmbnd,
    real_embedding,
    verify_spd,
)
from .rounding import get_backend

__all__ = [
    "SingularValueEnclosure",
    "SigmaMinBound",
    "method_p",
    "verify_all_singular_values",
    "invert_enclosure",
    "method_s1",
    "method_s2",
    "upper_bound_sigma_min",
    "sigma_min_bound_from_enclosure",
]

DELTA_VARIANTS = ("D1", "D2", "D3")


@dataclass(frozen=True)
class SingularValueEnclosure:
    """Per-index bounds lower[i] <= sigma_i <= upper[i] (non-increasing),
    with the residual diagnostics that produced them."""

    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    beta: float
    delta: float
    delta_variant: str
    sigma_hat: np.ndarray

    def __post_init__(self):
        if (np.asarray(self.lower) > np.asarray(self.upper)).any():
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n(self):
        return len(self.lower)


@dataclass(frozen=True)
class SigmaMinBound:
    """Verified bracket of the smallest singular value of the pencil.

    ``lower`` is 0 exactly when the method reports failure; ``inv_lower``
    and ``inv_upper`` bracket sigma_min^{-1} when the method produces them
    natively.
    """

    method: str
    lower: float
    upper: float | None = None
    theta: float | None = None
    tau: float | None = None
    residual_delta: float | None = None
    epsilon: float | None = None
    status: str = "verified"
    inv_lower: float | None = None
    inv_upper: float | None = None

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("negative lower bound")
        if self.upper is not None and self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")


def _check_pair(A: IntervalMatrix, B: IntervalMatrix):
    if A.rows != A.cols:
        raise ValueError("A must be square")
    if A.shape != B.shape:
        raise ValueError("A and B must have equal shape")
    if B.sym != HERMITIAN:
        raise ValueError("B must be hermitian-flagged")


# ---------------------------------------------------------------------------
# previous method: interval Cholesky + verified solve + norm enclosure


def method_p(A: IntervalMatrix, B: IntervalMatrix) -> SigmaMinBound:
    """Enclose ||R A^-1 R^H|| = 1/sigma_min through the factor route.

    Raises :class:`NotProvablyPositiveDefinite` when the interval Cholesky
    factorization breaks down and :class:`NotVerifiablyNonsingular` when
    the solve cannot be certified.
    """
    _check_pair(A, B)
    bk = get_backend()
    R = interval_cholesky(B)
    S = enclose_solve(A, R.H())
    RS = imm_multiply(R, S)
    mid = RS.mid()
    try:
        _, sv, vh = np.linalg.svd(mid)
        rho_up = nrm2_upper(RS, sigma_hint=float(sv[0]))
        rho_lo = nrm_lower(RS, vh[0].conj())
    except np.linalg.LinAlgError:
        rho_up = nrmbnd(RS)
        rho_lo = 0.0
    lower = bk.div_down(1.0, rho_up) if (np.isfinite(rho_up) and rho_up > 0) else 0.0
    upper = bk.div_up(1.0, rho_lo) if rho_lo > 0 else None
    return SigmaMinBound(
        method="P",
        lower=lower,
        upper=upper,
        status="verified" if lower > 0 else "inconclusive",
        inv_lower=rho_lo if rho_lo > 0 else None,
        inv_upper=rho_up if np.isfinite(rho_up) else None,
    )


# ---------------------------------------------------------------------------
# all singular values from approximate factors


def verify_all_singular_values(
    A: IntervalMatrix,
    B: IntervalMatrix,
    factors: BsvdFactors,
    variant: str = "D1",
) -> SingularValueEnclosure:
    """Bounds (sigma_hat_i -+ delta) / sqrt((1 +- alpha)(1 +- beta)) with
    rigorously bounded alpha, beta and the chosen delta variant.

    D1 evaluates ||U^H A V - Sigma|| through the residual identity,
    D2 splits off alpha*sigma_max, D3 additionally splits the norm product;
    they trade tightness for fewer matrix products, in that order.
    """
    variant = variant.upper()
    if variant not in DELTA_VARIANTS:
        raise ValueError(f"unknown delta variant {variant!r}")
    _check_pair(A, B)
    bk = get_backend()
    n = A.rows
    sig = np.asarray(factors.sigma, dtype=np.float64)
    if factors.U_B.shape != (n, n) or factors.V_B.shape != (n, n) or sig.shape != (n,):
        raise ValueError("factor shapes do not match the pencil")
    Pu = IntervalMatrix.from_point(factors.U_B)
    Pv = IntervalMatrix.from_point(factors.V_B)
    eye = IntervalMatrix.identity(n)

    BU = imm_multiply(B, Pu)  # shared between alpha and the residual
    alpha_mat = (imm_multiply(Pu.H(), BU) - eye).symmetrized()
    alpha = nrmbnd(alpha_mat)
    beta = nrmbnd((imm_multiply(Pv.H(), imm_multiply(B, Pv)) - eye).symmetrized())
    if not (alpha < 1.0 and beta < 1.0):
        raise OrthogonalityDefectTooLarge(f"alpha={alpha}, beta={beta}")

    E = imm_multiply(A, Pv) - BU.scale_cols(sig)  # A V - B U Sigma
    sig_max = float(sig[0]) if n else 0.0
    if variant == "D1":
        T = imm_multiply(Pu.H(), E) + alpha_mat.scale_cols(sig)
        delta = nrmbnd(T)
    elif variant == "D2":
        delta = bk.add_up(nrmbnd(imm_multiply(Pu.H(), E)), bk.mul_up(alpha, sig_max))
    else:
        delta = bk.add_up(
            bk.mul_up(nrmbnd(Pu.H()), nrmbnd(E)), bk.mul_up(alpha, sig_max)
        )

    den_hi = bk.sqrt_up(bk.mul_up(bk.add_up(1.0, alpha), bk.add_up(1.0, beta)))
    den_lo = bk.sqrt_down(bk.mul_down(bk.sub_down(1.0, alpha), bk.sub_down(1.0, beta)))
    lower = np.empty(n)
    upper = np.empty(n)
    for i in range(n):
        num = bk.sub_down(float(sig[i]), delta)
        lower[i] = max(0.0, bk.div_down(num, den_hi)) if num > 0 else 0.0
        num_up = bk.add_up(float(sig[i]), delta)
        upper[i] = bk.div_up(num_up, den_lo) if den_lo > 0 else float("inf")
    return SingularValueEnclosure(lower, upper, alpha, beta, delta, variant, sig.copy())


def invert_enclosure(enc: SingularValueEnclosure) -> SingularValueEnclosure:
    """Enclosures of sigma_i(R A^-1 R^H) = 1/sigma_{n+1-i}, non-increasing.

    Requires sigma_hat_i - delta > 0 for all i; otherwise the reciprocal is
    unbounded and :class:`NonpositiveLowerBound` is raised (printed "inf").
    """
    bk = get_backend()
    sig, d = enc.sigma_hat, enc.delta
    if not (sig > d).all():
        raise NonpositiveLowerBound(
            f"sigma_hat - delta reaches {float(np.min(sig) - d)}"
        )
    num_lo = bk.sqrt_down(bk.mul_down(bk.sub_down(1.0, enc.alpha), bk.sub_down(1.0, enc.beta)))
    num_hi = bk.sqrt_up(bk.mul_up(bk.add_up(1.0, enc.alpha), bk.add_up(1.0, enc.beta)))
    n = enc.n
    lower = np.empty(n)
    upper = np.empty(n)
    for i in range(n):
        j = n - 1 - i  # i-th largest reciprocal comes from the (n-i)-th value
        s = float(sig[j])
        lower[i] = bk.div_down(num_lo, bk.add_up(s, d))
        den = bk.sub_down(s, d)
        if den <= 0:
            raise NonpositiveLowerBound("denominator underflowed to zero")
        upper[i] = bk.div_up(num_hi, den)
    with np.errstate(all="ignore"):
        sig_inv = 1.0 / sig[::-1]
    return SingularValueEnclosure(lower, upper, enc.alpha, enc.beta, d, enc.delta_variant, sig_inv)


def sigma_min_bound_from_enclosure(enc: SingularValueEnclosure) -> SigmaMinBound:
    """Summarize an all-values enclosure as a sigma_min bracket (method D)."""
    inv_lower = inv_upper = None
    try:
        inv = invert_enclosure(enc)
        inv_lower, inv_upper = float(inv.lower[0]), float(inv.upper[0])
    except NonpositiveLowerBound:
        pass
    return SigmaMinBound(
        method="D",
        lower=float(enc.lower[-1]),
        upper=float(enc.upper[-1]),
        status="verified",
        inv_lower=inv_lower,
        inv_upper=inv_upper,
    )


# ---------------------------------------------------------------------------
# sigma_min via positive definiteness of the squared pencil


def method_s1(
    A: IntervalMatrix,
    B: IntervalMatrix,
    epsilon: float = 0.01,
    retries: int = 6,
) -> SigmaMinBound:
    """Certify sigma_min >= sqrt(theta) from A^H A - theta B^2 > 0 and
    A A^H - theta B^2 > 0; theta is shaved from the approximate extreme
    eigenvalues of the squared pencils."""
    _check_pair(A, B)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    bk = get_backend()
    Am, Bm = A.mid(), B.mid()
    Bm = (Bm + Bm.conj().T) / 2.0
    t1, _ = approx_gen_eig_extreme(Am.conj().T @ Am, Bm @ Bm)
    t2, _ = approx_gen_eig_extreme(Am @ Am.conj().T, Bm @ Bm)
    t_approx = min(t1, t2)
    eps = epsilon
    if np.isfinite(t_approx) and t_approx > 0:
        AH = A.H()
        GA1 = imm_multiply(AH, A).symmetrized()
        GA2 = imm_multiply(A, AH).symmetrized()
        GB = imm_multiply(B, B).symmetrized()
        for _ in range(retries + 1):
            theta = (1.0 - eps) * t_approx
            if theta <= 0:
                break
            if verify_spd(GA1 - GB.scale(theta)) and verify_spd(GA2 - GB.scale(theta)):
                return SigmaMinBound(
                    method="S1",
                    lower=bk.sqrt_down(theta),
                    theta=theta,
                    epsilon=eps,
                    status="verified",
                )
            eps = 1.0 - (1.0 - eps) / 2.0
    return SigmaMinBound(method="S1", lower=0.0, epsilon=eps, status="inconclusive")


# ---------------------------------------------------------------------------
# sigma_min via the inertia of the augmented matrix


def method_s2(
    A: IntervalMatrix,
    B: IntervalMatrix,
    epsilon: float = 0.01,
    max_iters: int = 20,
    with_upper: bool = True,
) -> SigmaMinBound:
    """Certify sigma_min >= theta by counting the positive eigenvalues of
    [[theta B, A^H], [A, theta B]] through a shifted LDL^H factorization.

    Complex pencils are routed through the real block embedding first.
    tau starts at 10 u ||G|| and jumps past the measured residual on retry;
    an inertia mismatch halves theta instead.
    """
    _check_pair(A, B)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if A.is_complex or B.is_complex:
        emb = real_embedding(A, B)
        Ae, Be = emb.Abar, emb.Bbar
    else:
        Ae, Be = A, B
    N = Ae.rows
    Am, Be_m = Ae.mid(), Be.mid()
    Z = np.zeros_like(Am)
    abar = np.block([[Z, Am.T], [Am, Z]])
    bbar = np.block([[Be_m, Z], [Z, Be_m]])
    t_approx, xhat = approx_gen_eig_extreme(abar, bbar, prefer_positive=True)

    theta = (1.0 - epsilon) * t_approx
    tau = delta = None
    lower = 0.0
    status = "inconclusive"
    if np.isfinite(theta) and theta > 0:
        tau = None
        for _ in range(max_iters):
            if theta <= 0:
                break
            G = augment_pair(Ae, Be, theta)
            if tau is None:
                tau = 10.0 * vr.U * nrmbnd(G)
            F = G.mid()
            F = (F + F.T) / 2.0
            F[np.diag_indices(2 * N)] += tau
            try:
                fac = approx_ldlt(F)
            except PivotFailure:
                theta *= 0.5
                tau = None
                continue
            prod = imm_multiply(
                IntervalMatrix.from_point(fac.L),
                imm_multiply(
                    IntervalMatrix.from_point(fac.D),
                    IntervalMatrix.from_point(fac.L.conj().T),
                ),
            )
            delta = nrmbnd((G.add_diag(tau) - prod).symmetrized())
            if inertia_of_D(fac).npe == N and tau > delta:
                lower = theta
                status = "verified"
                break
            if tau <= delta:
                tau = max(2.0 * tau, 2.0 * delta)
                continue
            theta *= 0.5
            tau = None
    upper = None
    if status == "verified" and with_upper:
        try:
            upper = upper_bound_sigma_min(Ae, Be, lower, xhat)
        except (VerificationInconclusive, ValueError):
            upper = None
    return SigmaMinBound(
        method="S2",
        lower=lower,
        upper=upper,
        theta=theta if status == "verified" else None,
        tau=tau,
        residual_delta=delta,
        epsilon=epsilon,
        status=status,
    )


# ---------------------------------------------------------------------------
# upper bound of sigma_min from an approximate eigenvector


def _quadform_re(x: np.ndarray, Y: IntervalMatrix):
    """Real-part bounds of conj(x)^T Y for a point vector x and interval
    column Y (the quantities used here are real for Hermitian forms)."""
    xr = np.real(x).reshape(-1)
    xi = np.imag(x).reshape(-1)
    yre_lo, yre_hi = Y.lo.reshape(-1), Y.hi.reshape(-1)
    yim_lo, yim_hi = Y.im_bounds()
    yim_lo, yim_hi = yim_lo.reshape(-1), yim_hi.reshape(-1)
    # Re(conj(x) y) = xr*yre + xi*yim
    p1 = vr.viv_mul(xr, xr, yre_lo, yre_hi)
    p2 = vr.viv_mul(xi, xi, yim_lo, yim_hi)
    lo = vr.vadd_down(p1[0], p2[0])
    hi = vr.vadd_up(p1[1], p2[1])
    return vr.iv_sum(lo, hi)


def upper_bound_sigma_min(
    A: IntervalMatrix,
    B: IntervalMatrix,
    lower: float,
    xhat: np.ndarray,
) -> float:
    """Rigorous upper bound sigma_min <= lower + residual/(sqrt(s_B) * ||x||_B)
    from an approximate eigenvector of the augmented pencil.

    All quantities are evaluated in interval arithmetic; raises
    :class:`VerificationInconclusive` when sigma_min(B) cannot be bounded
    away from zero.
    """
    _check_pair(A, B)
    if lower < 0:
        raise ValueError("lower must be nonnegative")
    bk = get_backend()
    n = A.rows
    x = np.asarray(xhat).reshape(-1, 1)
    if x.shape[0] != 2 * n or not np.any(x):
        raise ValueError("xhat must be a nonzero vector of the augmented size")
    Abar = augment_pair(A, B, 0.0)
    Z = IntervalMatrix.zeros(n)
    Bbar = IntervalMatrix.block2x2(B, Z, Z, B, sym=HERMITIAN)
    xiv = IntervalMatrix.from_point(x)
    y1 = imm_multiply(Abar, xiv)
    y2 = imm_multiply(Bbar, xiv)
    z = y1 - y2.scale(lower)
    m = z.mag()
    with np.errstate(all="ignore"):
        num2 = vr.nonneg_sum_up(vr.vup(m * m * (1.0 + 2.0 ** -48)))
    num = bk.sqrt_up(float(num2))
    q_lo, _ = _quadform_re(x, y2)
    q_lo = float(q_lo)
    if q_lo <= 0:
        raise VerificationInconclusive("x^H B x not certified positive")
    den = bk.sqrt_down(q_lo)
    s_b = lower_bound_sigma_min_spd(B)
    if s_b <= 0:
        raise VerificationInconclusive("sigma_min(B) lower bound unproven")
    r = bk.div_up(num, bk.mul_down(den, bk.sqrt_down(s_b)))
    return bk.add_up(lower, r)
