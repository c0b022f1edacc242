"""Zolotarev and Kantorovich distances, max-sliced search, and projection bounds."""
from .bounds import (BoundParams, beta_w1, beta_zeta, rhs_w1, rhs_zeta, sigma_exponent,
                     zeta_moment_bound)
from .bump import BumpFunction, build_bump, certify_derivative_bound, eval_psi
from .errors import InfeasibleError, InvalidArgument, MomentViolation, ResourceLimit
from .kernel import SmoothingKernel, build_kernel, convolve_1d, kernel_mixed_moment, kernel_radial_moment
from .measures import (DensityPiece, DiscreteMeasure1D, DiscreteMeasureND, MultiIndex, abs_moment,
                       mixed_moment, moment_matched_pair, project, total_variation)
from .sliced import DirectionBudget, SlicedResult, max_sliced, sliced_profile
from .spectral import CharFn, char_fn, check_fourier_bound, kernel_char_fn_1d
from .transport import TransportPlan, w1_1d, w1_exact
from .zolotarev import IteratedCdf, iterated_cdf, zeta_p_1d, zeta_p_sign_oracle

__version__ = "0.1.0"

__all__ = [
    "BoundParams", "BumpFunction", "CharFn", "DensityPiece", "DirectionBudget", "DiscreteMeasure1D",
    "DiscreteMeasureND", "InfeasibleError", "InvalidArgument", "IteratedCdf", "MomentViolation",
    "MultiIndex", "ResourceLimit", "SlicedResult", "SmoothingKernel", "TransportPlan", "abs_moment",
    "beta_w1", "beta_zeta", "build_bump", "build_kernel", "certify_derivative_bound", "char_fn",
    "check_fourier_bound", "convolve_1d", "eval_psi", "iterated_cdf", "kernel_char_fn_1d",
    "kernel_mixed_moment", "kernel_radial_moment", "max_sliced", "mixed_moment", "moment_matched_pair",
    "project", "rhs_w1", "rhs_zeta", "sigma_exponent", "sliced_profile", "total_variation", "w1_1d",
    "w1_exact", "zeta_moment_bound", "zeta_p_1d", "zeta_p_sign_oracle",
]
