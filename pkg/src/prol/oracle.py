"""Independent verification of computed eigenfunctions and eigenvalues.

Nothing here reuses the spectral solve path. The kernel integral operator
is applied by Gauss-Legendre quadrature with Bessel values from scipy,
eigenvalues are recovered by direct integration, and the tridiagonal
representation of the differential operator is checked against finite
differences.

The finite-difference check divides by the square of a 1e-6 step, which
amplifies evaluation rounding by twelve orders of magnitude, so the basis
functions are evaluated in extended precision there. Near the origin the
Jacobi degree recurrence loses relative accuracy; a power series in x^2
(which has no cancellation while n*x is small) takes over on that side.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFunctionError
from .gpsf_assembly import EigenvalueTable, RadialGpsf, weighted_radial_eval
from .special_functions import bessel_j, gauss_legendre_01, zernike_normalized_table
from .spectral_core import EigenSystem, ProblemParams, build_operator

__all__ = [
    "OracleConfig",
    "apply_M",
    "gamma_by_quadrature",
    "check_L_identity",
    "check_integral_residual",
]

_LD = np.longdouble

_DEFAULT_GRID_SIZE = 50


def _series_is_stable(n: int, a: float, x: float) -> bool:
    """Whether the x^2 power series has monotonically decreasing terms.

    The term ratios of the series decrease with the index, so bounding
    the first one bounds them all; a bound of 2 keeps the cancellation
    within a couple of ulps.
    """
    return n * (n + a + 1.0) * x * x <= 2.0 * (a + 1.0)


@dataclass(frozen=True)
class OracleConfig:
    """Quadrature size, finite-difference step, and probe grid.

    quadrature_size of None resolves to 60 + ceil(1.5 c), which keeps at
    least three nodes per oscillation of the kernel; grid of None resolves
    to 50 equispaced interior points of (0, 1).
    """

    quadrature_size: int | None = None
    fd_step: float = 1e-6
    grid: np.ndarray | None = None

    def __post_init__(self):
        if self.quadrature_size is not None and self.quadrature_size < 2:
            raise ValueError(f"quadrature size must be at least 2, got {self.quadrature_size}")
        if not 0.0 < self.fd_step < 1e-3:
            raise ValueError(f"fd_step must lie in (0, 1e-3), got {self.fd_step}")
        if self.grid is not None:
            grid = np.asarray(self.grid, dtype=float)
            if grid.size == 0 or np.any(grid <= 0.0) or np.any(grid >= 1.0):
                raise ValueError("grid points must lie strictly inside (0, 1)")
            object.__setattr__(self, "grid", grid)
            self.grid.setflags(write=False)

    def resolve_quadrature_size(self, c: float) -> int:
        if self.quadrature_size is not None:
            return self.quadrature_size
        return 60 + math.ceil(1.5 * c)

    def resolve_grid(self) -> np.ndarray:
        if self.grid is not None:
            return self.grid
        return np.arange(1, _DEFAULT_GRID_SIZE + 1) / (_DEFAULT_GRID_SIZE + 1.0)


@functools.lru_cache(maxsize=16)
def _cached_rule(m: int):
    return gauss_legendre_01(m)


def _kernel_matrix(params: ProblemParams, y: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Kernel values J_s(c y r) sqrt(c y r) on the grid-by-node product."""
    z = params.c * np.multiply.outer(y, nodes)
    return bessel_j(params.half_order, z) * np.sqrt(z)


def apply_M(params: ProblemParams, f, y: float, config: OracleConfig | None = None) -> float:
    """Kernel integral operator applied to f, evaluated at y in [0, 1].

    f must accept an ndarray of points in (0, 1). The integrand vanishes
    at the origin, and Gauss-Legendre nodes are interior, so no special
    handling is needed at the endpoints.
    """
    cfg = config or OracleConfig()
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"evaluation point must lie in [0, 1], got {y}")
    rule = _cached_rule(cfg.resolve_quadrature_size(params.c))
    kern = _kernel_matrix(params, np.asarray(y, dtype=float), rule.nodes)
    return float(np.dot(rule.weights, kern * np.asarray(f(rule.nodes), dtype=float)))


def gamma_by_quadrature(
    params: ProblemParams, g: RadialGpsf, config: OracleConfig | None = None
) -> float:
    """Kernel eigenvalue recovered by direct integration.

    Probes at the grid point where the weighted eigenfunction is largest,
    which keeps the ratio well conditioned away from zeros.
    """
    cfg = config or OracleConfig()
    grid = cfg.resolve_grid()
    phi = weighted_radial_eval(g, grid)
    peak = int(np.argmax(np.abs(phi)))
    if abs(phi[peak]) < 1e-200:
        raise DegenerateFunctionError("weighted eigenfunction is numerically zero on the grid")
    applied = apply_M(params, lambda r: weighted_radial_eval(g, r), float(grid[peak]), cfg)
    return applied / float(phi[peak])


def _jacobi_shifted_highprec(n: int, a, u, use_series: bool):
    """P_n of parameters (a, 0) at 1 - 2u, in extended precision."""
    one = _LD(1.0)
    if n == 0:
        return one
    if use_series:
        pref = one
        for k in range(1, n + 1):
            pref = pref * (a + k) / k
        term = one
        total = one
        for j in range(n):
            term = term * (-(n - j)) * (n + a + 1 + j) * u / ((a + 1 + j) * (j + 1))
            total = total + term
        return pref * total
    t = 1 - 2 * u
    p_prev = one
    p_cur = (a + 1) + (a + 2) * (t - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a
        a1 = 2 * k * (k + a) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * t + a * a)
        a3 = 2 * (k + a - 1) * (k - 1) * c
        p_prev, p_cur = p_cur, (a2 * p_cur - a3 * p_prev) / a1
    return p_cur


def _weighted_zernike_highprec(p: int, N: int, n: int, x, use_series: bool):
    """Weighted radial Zernike value at the extended-precision scalar x."""
    s = _LD(N) + _LD(p) / 2
    sign = -1.0 if n % 2 else 1.0
    pref = sign * np.sqrt(2 * (2 * n + s + 1))
    return x ** (N + (_LD(p) + 1) / 2) * pref * _jacobi_shifted_highprec(n, s, x * x, use_series)


def check_L_identity(
    params: ProblemParams,
    n: int,
    x_samples,
    config: OracleConfig | None = None,
) -> float:
    """Max residual of the differential operator against its tridiagonal
    representation.

    Applies the operator to the n-th weighted basis function by central
    finite differences and compares with the three-term combination of
    neighboring basis functions. Samples must stay at least 1e-3 away
    from both endpoints; the operator has a singular coefficient at the
    origin.
    """
    cfg = config or OracleConfig()
    samples = np.atleast_1d(np.asarray(x_samples, dtype=float))
    if np.any(samples < 1e-3) or np.any(samples > 1.0 - 1e-3):
        raise ValueError("samples must lie in [1e-3, 1 - 1e-3]")
    if n < 0:
        raise ValueError("basis index must be non-negative")

    op = build_operator(params, n + 2)
    s_float = params.half_order
    s = _LD(params.N) + _LD(params.p) / 2
    c2 = _LD(params.c) ** 2
    step = _LD(cfg.fd_step)
    quarter = _LD(0.25)

    worst = 0.0
    for x0 in samples:
        x = _LD(x0)
        series = _series_is_stable(n, s_float, x0)

        def T(degree: int, point):
            return _weighted_zernike_highprec(
                params.p, params.N, degree, point, _series_is_stable(degree, s_float, x0)
            )

        f0 = _weighted_zernike_highprec(params.p, params.N, n, x, series)
        fp = _weighted_zernike_highprec(params.p, params.N, n, x + step, series)
        fm = _weighted_zernike_highprec(params.p, params.N, n, x - step, series)
        d1 = (fp - fm) / (2 * step)
        d2 = (fp - 2 * f0 + fm) / (step * step)
        lhs = (1 - x * x) * d2 - 2 * x * d1 + ((quarter - s * s) / (x * x) - c2 * x * x) * f0

        rhs = _LD(op.diag[n]) * f0 + _LD(op.offdiag[n]) * T(n + 1, x)
        if n >= 1:
            rhs = rhs + _LD(op.offdiag[n - 1]) * T(n - 1, x)
        worst = max(worst, abs(float(lhs - rhs)))
    return worst


def check_integral_residual(
    params: ProblemParams,
    table: EigenvalueTable,
    system: EigenSystem,
    config: OracleConfig | None = None,
) -> np.ndarray:
    """Per-index max residual of the kernel eigenvalue equation.

    For each retained index n, reports the largest deviation over the
    probe grid between the operator applied to the weighted eigenfunction
    and the chain eigenvalue times the function. Eigenfunctions are unit
    norm, so these are absolute operator-equation residuals.
    """
    if table.params != params or system.operator.params != params:
        raise ValueError("table, system, and params must describe the same problem")
    n_count = len(table)
    if n_count > system.n_pairs:
        raise ValueError("table is longer than the eigensystem")

    cfg = config or OracleConfig()
    rule = _cached_rule(cfg.resolve_quadrature_size(params.c))
    grid = cfg.resolve_grid()
    K = system.operator.size
    half_weight = (params.p + 1) / 2.0

    basis_nodes = zernike_normalized_table(params.p, params.N, K, rule.nodes)
    basis_grid = zernike_normalized_table(params.p, params.N, K, grid)
    coeffs = system.vectors[:n_count]
    phi_nodes = (coeffs @ basis_nodes) * rule.nodes**half_weight
    phi_grid = (coeffs @ basis_grid) * grid**half_weight

    kern = _kernel_matrix(params, grid, rule.nodes)
    applied = phi_nodes @ (kern * rule.weights).T
    residual = np.abs(applied - table.gamma[:, None] * phi_grid)
    return residual.max(axis=1)
