"""Verified enclosures for the singular values of R^-H A R^-1, B = R^H R.

Rigorous (machine-verified) lower and upper bounds for the singular values
of the structured pencil, for a general nonsingular square A and Hermitian
positive definite B, plus the experiment harness that exercises them on
random and convection-diffusion finite-element matrices.
"""

from .interval import (
    ComplexInterval,
    RealInterval,
    iv_add,
    iv_div,
    iv_mul,
    iv_sqrt,
    iv_sqrt_bounds,
    iv_sub,
    mag,
    mid_rad,
)
from .ivlinalg import (
    EmbeddingPair,
    IntervalMatrix,
    augment_pair,
    enclose_solve,
    imm_multiply,
    interval_cholesky,
    lower_bound_sigma_min_spd,
    nrmbnd,
    real_embedding,
    verify_spd,
)
from .approx import (
    BsvdFactors,
    InertiaCount,
    LdlFactors,
    approx_cholesky,
    approx_gen_eig_extreme,
    approx_inverse,
    approx_ldlt,
    approx_svd,
    bsvd_decompose,
    inertia_of_D,
)
from .verify import (
    SigmaMinBound,
    SingularValueEnclosure,
    invert_enclosure,
    method_p,
    method_s1,
    method_s2,
    sigma_min_bound_from_enclosure,
    upper_bound_sigma_min,
    verify_all_singular_values,
)
from .rounding import FesetroundBackend, RoundingBackend, WideningBackend, get_backend, set_backend
from . import errors

__version__ = "0.1.0"
