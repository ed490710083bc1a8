"""Band-limited eigenfunctions of the truncated Fourier transform on the
D-dimensional ball.

The library computes the radial eigenfunctions through the eigenvectors of
a symmetric tridiagonal operator in the weighted radial Zernike basis,
walks the associated eigenvalue chain, and ships an independent quadrature
oracle that checks every computed function against its defining integral
equation.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateExpansionError,
    DegenerateFunctionError,
    DegenerateRatioError,
    EigensolverError,
    ProlError,
    TruncationError,
    UnsupportedDimensionError,
)
from .gpsf_assembly import (
    EigenvalueTable,
    RadialGpsf,
    ZernikeExpansion,
    assemble_radial_gpsfs,
    compute_radial_gpsfs,
    eigenvalue_chain,
    full_eigenfunction_eval_2d3d,
    gamma_first,
    gamma_ratio,
    radial_eval,
    surface_harmonic_count,
    weighted_radial_eval,
    x_dphi_expansion,
)
from .oracle import (
    OracleConfig,
    apply_M,
    check_integral_residual,
    check_L_identity,
    gamma_by_quadrature,
)
from .special_functions import (
    JacobiParams,
    QuadratureRule,
    ZernikeIndex,
    bessel_j,
    gauss_legendre_01,
    jacobi_derivative,
    jacobi_eval,
    jacobi_table,
    log_gamma,
    zernike_normalized_eval,
    zernike_normalized_table,
    zernike_weighted_eval,
)
from .spectral_core import (
    EigenSystem,
    ProblemParams,
    TridiagonalOperator,
    build_operator,
    choose_truncation,
    eigendecompose,
    kappa,
    solve_eigensystem,
)

__all__ = [
    "__version__",
    "ProlError",
    "TruncationError",
    "EigensolverError",
    "DegenerateExpansionError",
    "DegenerateRatioError",
    "DegenerateFunctionError",
    "UnsupportedDimensionError",
    "JacobiParams",
    "ZernikeIndex",
    "QuadratureRule",
    "jacobi_eval",
    "jacobi_derivative",
    "jacobi_table",
    "zernike_normalized_eval",
    "zernike_normalized_table",
    "zernike_weighted_eval",
    "log_gamma",
    "bessel_j",
    "gauss_legendre_01",
    "ProblemParams",
    "TridiagonalOperator",
    "EigenSystem",
    "kappa",
    "build_operator",
    "choose_truncation",
    "eigendecompose",
    "solve_eigensystem",
    "ZernikeExpansion",
    "RadialGpsf",
    "EigenvalueTable",
    "surface_harmonic_count",
    "radial_eval",
    "weighted_radial_eval",
    "x_dphi_expansion",
    "gamma_first",
    "gamma_ratio",
    "eigenvalue_chain",
    "assemble_radial_gpsfs",
    "compute_radial_gpsfs",
    "full_eigenfunction_eval_2d3d",
    "OracleConfig",
    "apply_M",
    "gamma_by_quadrature",
    "check_L_identity",
    "check_integral_residual",
]
