"""Radial eigenfunction assembly and the associated eigenvalue chain.

An eigenvector of the tridiagonal operator is the coefficient vector of one
radial eigenfunction in the (weighted) radial Zernike basis. This module
evaluates those expansions, expands x times the radial derivative in the
same basis, and walks the eigenvalue chain: the weighted kernel eigenvalue
of the ground function comes from a closed form in the coefficients, the
ratio of consecutive eigenvalues from two dot products, and the remaining
eigenvalue families from fixed algebraic conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence, Union

import numpy as np
from scipy.special import gammaln, lpmv

from .errors import (
    DegenerateExpansionError,
    DegenerateRatioError,
    UnsupportedDimensionError,
)
from .special_functions import zernike_normalized_table
from .spectral_core import EigenSystem, ProblemParams, solve_eigensystem

__all__ = [
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
]

# magnitude below which chain denominators are treated as vanishing
_DEGENERATE_FLOOR = 1e-280

# chain values this far below the ground eigenvalue are flagged untrusted
_CHAIN_PRECISION_RATIO = 1e-12


@dataclass(frozen=True)
class ZernikeExpansion:
    """Coefficients over the radial Zernike family with fixed (p, N)."""

    p: int
    N: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("expansion coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        self.coeffs.setflags(write=False)

    def __len__(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class RadialGpsf:
    """One radial eigenpair with its full eigenvalue chain entry."""

    params: ProblemParams
    n: int
    expansion: ZernikeExpansion
    chi: float
    gamma: float
    beta: float
    nu_magnitude: float
    phase_order: int


class EigenvalueRow(NamedTuple):
    n: int
    chi: float
    gamma: float
    beta: float
    nu_magnitude: float
    energy_deficit: float
    below_chain_precision: bool


@dataclass(frozen=True)
class EigenvalueTable:
    """Per-index eigenvalue families for one (p, c, N) problem."""

    params: ProblemParams
    chi: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    nu_magnitude: np.ndarray = field(repr=False)
    energy_deficit: np.ndarray = field(repr=False)
    below_chain_precision: np.ndarray = field(repr=False)

    @property
    def phase_order(self) -> int:
        """Power of the unit imaginary carried by the Fourier eigenvalues."""
        return self.params.N % 4

    @property
    def alpha_magnitude(self) -> np.ndarray:
        return (2.0 * math.pi) ** (1.0 + self.params.p / 2.0) * np.abs(self.beta)

    def __len__(self) -> int:
        return len(self.gamma)

    def rows(self) -> Iterator[EigenvalueRow]:
        for n in range(len(self)):
            yield EigenvalueRow(
                n=n,
                chi=float(self.chi[n]),
                gamma=float(self.gamma[n]),
                beta=float(self.beta[n]),
                nu_magnitude=float(self.nu_magnitude[n]),
                energy_deficit=float(self.energy_deficit[n]),
                below_chain_precision=bool(self.below_chain_precision[n]),
            )


def surface_harmonic_count(N: int, p: int) -> int:
    """Number of orthonormal surface harmonics of degree N on the
    (p+1)-sphere."""
    if N < 0 or p < 0:
        raise ValueError("surface_harmonic_count arguments must be non-negative")
    if N == 0 and p == 0:
        return 1
    num = (2 * N + p) * math.factorial(N + p - 1)
    den = math.factorial(p) * math.factorial(N)
    count, rem = divmod(num, den)
    if rem:
        raise AssertionError(f"harmonic count is not integral for N={N}, p={p}")
    return count


def _expansion_of(g: Union[RadialGpsf, ZernikeExpansion]) -> ZernikeExpansion:
    return g.expansion if isinstance(g, RadialGpsf) else g


def radial_eval(g: Union[RadialGpsf, ZernikeExpansion], x):
    """Radial eigenfunction value at x in [0, 1].

    Sums the Zernike expansion through a single Jacobi recurrence sweep
    rather than evaluating each basis polynomial independently.
    """
    exp = _expansion_of(g)
    x_arr = np.asarray(x, dtype=float)
    table = zernike_normalized_table(exp.p, exp.N, len(exp), x_arr)
    out = np.tensordot(exp.coeffs, table, axes=(0, 0))
    return float(out) if np.ndim(out) == 0 else out


def weighted_radial_eval(g: Union[RadialGpsf, ZernikeExpansion], x):
    """Weighted radial eigenfunction x**((p+1)/2) times the radial value."""
    exp = _expansion_of(g)
    x_arr = np.asarray(x, dtype=float)
    out = x_arr ** ((exp.p + 1) / 2.0) * radial_eval(exp, x_arr)
    return float(out) if np.ndim(out) == 0 else out


def x_dphi_expansion(g: Union[RadialGpsf, ZernikeExpansion]) -> ZernikeExpansion:
    """Expansion of x * d/dx of the radial function over the same basis.

    For a single basis polynomial of degree index k, x times its derivative
    is (2k + N) times itself plus an auxiliary Jacobi term of lower degree;
    the auxiliary term telescopes down the basis, so the whole expansion is
    accumulated in one backward pass with a running carry. The output
    coefficient of index m receives contributions only from inputs with
    k >= m.
    """
    exp = _expansion_of(g)
    h = exp.coeffs
    s = exp.N + exp.p / 2.0
    K = len(h)
    out = (2.0 * np.arange(K) + exp.N) * h
    carry = 0.0
    for m in range(K - 2, -1, -1):
        k = m + 1
        carry += h[k] * 2.0 * (k + s) * math.sqrt(2.0 * (2.0 * k + s + 1.0))
        out[m] += carry * math.sqrt((2.0 * m + s + 1.0) / 2.0) / (m + s + 1.0)
        carry *= (m + s) / (m + s + 1.0)
    return ZernikeExpansion(p=exp.p, N=exp.N, coeffs=out)


def gamma_first(params: ProblemParams, h0: ZernikeExpansion) -> float:
    """Weighted-kernel eigenvalue of the ground radial eigenfunction.

    Evaluates the closed form relating the eigenvalue to the expansion
    coefficients. The denominator terms carry gamma-function ratios that
    grow factorially while the coefficients decay faster, so every
    magnitude is handled in log space and the alternating-parity sum is
    accumulated in descending order of term size. The sign convention
    makes all denominator terms of the ground vector positive, which is
    what keeps this formula well conditioned.

    Raises
    ------
    DegenerateExpansionError
        If the denominator sum is numerically zero.
    """
    h = h0.coeffs
    if h[0] <= 0.0:
        raise ValueError("ground expansion must carry a positive leading coefficient")
    s = params.half_order
    N, p = params.N, params.p
    log_num = -s * math.log(2.0) + (s + 0.5) * math.log(params.c) + math.log(h[0])

    k = np.arange(len(h), dtype=float)
    nonzero = h != 0.0
    log_terms = np.full(len(h), -np.inf)
    log_terms[nonzero] = (
        0.5 * np.log(4.0 * k[nonzero] + 2.0 * N + p + 2.0)
        + gammaln(k[nonzero] + s + 1.0)
        - gammaln(k[nonzero] + 1.0)
        + np.log(np.abs(h[nonzero]))
    )
    signs = np.where(k.astype(int) % 2 == 0, 1.0, -1.0) * np.sign(h)

    peak = float(np.max(log_terms))
    if not np.isfinite(peak):
        raise DegenerateExpansionError("all denominator terms vanish")
    total = 0.0
    for i in np.argsort(-log_terms):
        if log_terms[i] == -np.inf:
            break
        total += signs[i] * math.exp(log_terms[i] - peak)
    if total == 0.0 or peak + math.log(abs(total)) < math.log(_DEGENERATE_FLOOR):
        raise DegenerateExpansionError("denominator sum is numerically zero")

    log_den = 0.5 * math.log(2.0 * N + p + 2.0) + peak + math.log(abs(total))
    return math.copysign(math.exp(log_num - log_den), total)


def gamma_ratio(
    hn: ZernikeExpansion,
    hn_tilde: ZernikeExpansion,
    hnp1: ZernikeExpansion,
    hnp1_tilde: ZernikeExpansion,
) -> float:
    """Ratio of consecutive kernel eigenvalues from four expansions.

    hn_tilde and hnp1_tilde are the x d/dx expansions of the functions
    whose coefficients are hn and hnp1. Swapping the two pairs returns
    the reciprocal.
    """
    num = float(hn_tilde.coeffs @ hnp1.coeffs)
    den = float(hnp1_tilde.coeffs @ hn.coeffs)
    if abs(den) < _DEGENERATE_FLOOR:
        raise DegenerateRatioError(f"ratio denominator {den!r} is numerically zero")
    return num / den


def eigenvalue_chain(params: ProblemParams, system: EigenSystem, n_max: int) -> EigenvalueTable:
    """Full eigenvalue table for indices 0..n_max.

    The ground eigenvalue comes from gamma_first; each subsequent one is
    the previous times the two-dot-product ratio. The remaining families
    follow by fixed powers of c and 2 pi. Rows whose magnitude falls below
    1e-12 of the ground value are flagged as below chain precision since
    the multiplicative recursion offers no error control there.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if system.n_pairs < n_max + 1:
        raise ValueError(
            f"system holds {system.n_pairs} pairs but n_max={n_max} needs {n_max + 1}"
        )
    p, N, c = params.p, params.N, params.c
    expansions = [
        ZernikeExpansion(p=p, N=N, coeffs=system.vectors[n]) for n in range(n_max + 1)
    ]
    tilded = [x_dphi_expansion(e) for e in expansions]

    gamma = np.empty(n_max + 1)
    gamma[0] = gamma_first(params, expansions[0])
    for n in range(n_max):
        try:
            ratio = gamma_ratio(expansions[n], tilded[n], expansions[n + 1], tilded[n + 1])
        except DegenerateRatioError as exc:
            raise DegenerateRatioError(f"chain step n={n} -> {n + 1} failed: {exc}") from exc
        gamma[n + 1] = gamma[n] * ratio

    beta = gamma * c ** (-(p + 1) / 2.0)
    nu_magnitude = math.sqrt(c) * np.abs(gamma)
    return EigenvalueTable(
        params=params,
        chi=system.chi[: n_max + 1].copy(),
        gamma=gamma,
        beta=beta,
        nu_magnitude=nu_magnitude,
        energy_deficit=1.0 - nu_magnitude**2,
        below_chain_precision=np.abs(gamma) < _CHAIN_PRECISION_RATIO * abs(gamma[0]),
    )


def assemble_radial_gpsfs(
    params: ProblemParams, system: EigenSystem, table: EigenvalueTable
) -> list[RadialGpsf]:
    """Bundle eigenvectors and table rows into RadialGpsf values."""
    if len(table) > system.n_pairs:
        raise ValueError("table is longer than the eigensystem")
    return [
        RadialGpsf(
            params=params,
            n=n,
            expansion=ZernikeExpansion(p=params.p, N=params.N, coeffs=system.vectors[n]),
            chi=float(table.chi[n]),
            gamma=float(table.gamma[n]),
            beta=float(table.beta[n]),
            nu_magnitude=float(table.nu_magnitude[n]),
            phase_order=table.phase_order,
        )
        for n in range(len(table))
    ]


def compute_radial_gpsfs(
    params: ProblemParams, n_max: int, tol: float = 1e-14
) -> tuple[EigenSystem, EigenvalueTable, list[RadialGpsf]]:
    """End-to-end pipeline: eigensystem, eigenvalue table, assembled
    functions."""
    system = solve_eigensystem(params, n_max, tol)
    table = eigenvalue_chain(params, system, n_max)
    return system, table, assemble_radial_gpsfs(params, system, table)


def _real_spherical_harmonic(N: int, mu: int, theta: float, phi: float) -> float:
    """Real orthonormal spherical harmonic of degree N and order mu."""
    a = abs(mu)
    norm = math.sqrt(
        (2.0 * N + 1.0)
        / (4.0 * math.pi)
        * math.exp(gammaln(N - a + 1.0) - gammaln(N + a + 1.0))
    )
    leg = float(lpmv(a, N, math.cos(theta)))
    if mu == 0:
        return norm * leg
    azimuth = math.cos(mu * phi) if mu > 0 else math.sin(a * phi)
    return math.sqrt(2.0) * norm * leg * azimuth


def full_eigenfunction_eval_2d3d(g: RadialGpsf, m: int, point: Sequence[float]):
    """Value of the full eigenfunction at a point of the unit ball.

    The angular factor is an orthonormal surface harmonic: in dimension 2
    the normalized complex exponential of frequency N (m = 1) or its
    conjugate (m = 2), in dimension 3 a real orthonormal spherical
    harmonic with m running over 1..2N+1. Returns a complex value in
    dimension 2 and a float in dimension 3.
    """
    params = g.params
    dim = params.dimension
    if dim not in (2, 3):
        raise UnsupportedDimensionError(
            f"full evaluation supports dimensions 2 and 3, got {dim}"
        )
    pt = np.asarray(point, dtype=float)
    if pt.shape != (dim,):
        raise ValueError(f"point must have {dim} components, got shape {pt.shape}")
    count = surface_harmonic_count(params.N, params.p)
    if not 1 <= m <= count:
        raise ValueError(f"m must lie in 1..{count} for N={params.N}, got {m}")
    r = float(np.linalg.norm(pt))
    if r > 1.0 + 1e-12:
        raise ValueError(f"point must lie in the unit ball, got radius {r}")
    r = min(r, 1.0)
    N = params.N

    if r == 0.0:
        if N > 0:
            return 0j if dim == 2 else 0.0
        radial = radial_eval(g, 0.0)
        if dim == 2:
            return complex(radial / math.sqrt(2.0 * math.pi))
        return radial / math.sqrt(4.0 * math.pi)

    radial = radial_eval(g, r)
    if dim == 2:
        theta = math.atan2(pt[1], pt[0])
        freq = N if m == 1 else -N
        return radial * np.exp(1j * freq * theta) / math.sqrt(2.0 * math.pi)

    theta = math.acos(max(-1.0, min(1.0, pt[2] / r)))
    phi = math.atan2(pt[1], pt[0])
    mu = m - 1 - N
    return radial * _real_spherical_harmonic(N, mu, theta, phi)
