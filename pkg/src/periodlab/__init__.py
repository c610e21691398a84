"""Numerical period functions, Eisenstein series and transfer operators.

Submodules
----------
specfun
    Complex Gamma, zeta, Hurwitz zeta, K-Bessel and Whittaker functions.
autoforms
    Fourier data of automorphic forms, Eisenstein and Maass evaluators,
    the intertwining map ``iota``.
periodmap
    Periodic functions ``f``, period functions ``psi`` and residual checks.
transfer
    Taylor-basis truncation of the transfer operator and critical-line scans.
cli
    The ``periodlab`` command.
"""

from . import autoforms, errors, periodmap, specfun, transfer
from .autoforms import (
    CoefficientSet,
    EvalPoint,
    SpectralParam,
    eisenstein_coefficients,
    eisenstein_family_fe_residual,
    eval_eisenstein_fourier,
    eval_eisenstein_lattice,
    eval_maass,
    holomorphic_coefficients,
    iota_map,
    maass_coefficients,
    modular_invariance_residual,
)
from .errors import *  # noqa: F401,F403
from .periodmap import (
    EISENSTEIN_PSI_CONSTANT,
    PeriodicF,
    PsiEvaluator,
    capF_from_coefficients,
    eisenstein_psi,
    eisenstein_psi_continued,
    eisenstein_psi_direct,
    eval_f,
    f_from_coefficients,
    f_from_psi,
    limit_condition_residual,
    parity_residual,
    psi_evaluator_from_f,
    psi_from_f,
    psiiotaalpha_identity_residual,
    taylor_psi,
    three_term_residual,
)
from .transfer import (
    Bracket,
    Crossing,
    ScanRow,
    TransferMatrix,
    apply_transfer,
    build_transfer_matrix,
    eigen_spectrum,
    eigenfunction_to_psi,
    eisenstein_zero_probe,
    fixed_point_check,
    fredholm_dets,
    refine_crossing,
    scan_critical_line,
)

__version__ = "0.1.0"
