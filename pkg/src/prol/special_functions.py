"""Jacobi and radial Zernike polynomials, log-gamma, Bessel J, and
Gauss-Legendre rules on [0, 1].

Everything here is a pure function of its arguments. Jacobi polynomials are
evaluated by the standard three-term recurrence in the degree, which is
stable for the parameter ranges used by the rest of the package. Values of
Bessel functions of the first kind are only consumed by the verification
oracle and are delegated to scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv as _scipy_jv

__all__ = [
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
]

# x**N switches to exp(N log x) past this to avoid spurious overflow paths
_POW_LOG_THRESHOLD = 300.0


@dataclass(frozen=True)
class JacobiParams:
    """Degree and exponent pair (alpha, beta) of a Jacobi polynomial."""

    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"degree must be non-negative, got n={self.n}")
        if self.alpha <= -1.0:
            raise ValueError(f"alpha must exceed -1, got {self.alpha}")
        if self.beta <= -1.0:
            raise ValueError(f"beta must exceed -1, got {self.beta}")


@dataclass(frozen=True)
class ZernikeIndex:
    """Index (p, N, n) of a radial Zernike polynomial; p is dimension - 2."""

    p: int
    N: int
    n: int

    def __post_init__(self):
        if self.p < 0 or self.N < 0 or self.n < 0:
            raise ValueError(f"indices must be non-negative, got {self}")


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a quadrature rule on [0, 1].

    Immutable after construction; safe to share between threads.
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of integrand values sampled at the nodes."""
        return float(np.dot(self.weights, values))


def _jacobi_recurrence(n, alpha, beta, x):
    """Three-term recurrence for P_n^(alpha,beta), scalar or array x."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p_cur = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c = 2.0 * k + alpha + beta
        a1 = 2.0 * k * (k + alpha + beta) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta)
        a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p_prev, p_cur = p_cur, (a2 * p_cur - a3 * p_prev) / a1
    return p_cur


def jacobi_eval(params: JacobiParams, x):
    """Evaluate the Jacobi polynomial P_n^(alpha,beta) at x."""
    out = _jacobi_recurrence(params.n, params.alpha, params.beta, x)
    return float(out) if out.ndim == 0 else out


def jacobi_derivative(params: JacobiParams, x):
    """First derivative of P_n^(alpha,beta) at x.

    Uses the identity d/dx P_n^(a,b) = (n+a+b+1)/2 * P_{n-1}^(a+1,b+1);
    the degree-0 polynomial has derivative zero.
    """
    if params.n == 0:
        return 0.0 if np.isscalar(x) else np.zeros_like(np.asarray(x, dtype=float))
    factor = 0.5 * (params.n + params.alpha + params.beta + 1.0)
    inner = JacobiParams(params.n - 1, params.alpha + 1.0, params.beta + 1.0)
    return factor * jacobi_eval(inner, x)


def jacobi_table(n_max: int, alpha: float, beta: float, x) -> np.ndarray:
    """All Jacobi values P_0..P_n_max at x in one recurrence sweep.

    Returns an array of shape (n_max + 1,) + shape(x).
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape, dtype=float)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n_max + 1):
        c = 2.0 * k + alpha + beta
        a1 = 2.0 * k * (k + alpha + beta) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta)
        a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        table[k] = (a2 * table[k - 1] - a3 * table[k - 2]) / a1
    return table


def _power(x, exponent: float) -> np.ndarray:
    """x**exponent for x >= 0, with a log-space path for extreme exponents."""
    x = np.asarray(x, dtype=float)
    if exponent == 0.0:
        return np.ones_like(x)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    out = np.zeros_like(xv)
    pos = xv > 0.0
    xp = xv[pos]
    if xp.size:
        mag = exponent * np.abs(np.log(xp))
        out[pos] = np.where(
            mag > _POW_LOG_THRESHOLD,
            np.exp(exponent * np.log(xp)),
            xp**exponent,
        )
    return out[0] if scalar else out


def _check_unit_interval(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("argument must lie in [0, 1]")
    return x


def zernike_normalized_eval(idx: ZernikeIndex, x):
    """Normalized radial Zernike polynomial at x in [0, 1].

    The family with fixed (p, N) is orthonormal on [0, 1] against the
    weight x**(p+1).
    """
    x = _check_unit_interval(x)
    s = idx.N + idx.p / 2.0
    sign = -1.0 if idx.n % 2 else 1.0
    pref = sign * math.sqrt(2.0 * (2.0 * idx.n + s + 1.0))
    poly = _jacobi_recurrence(idx.n, s, 0.0, 1.0 - 2.0 * x * x)
    out = pref * _power(x, float(idx.N)) * poly
    return float(out) if np.ndim(out) == 0 else out


def zernike_normalized_table(p: int, N: int, n_count: int, x) -> np.ndarray:
    """Values of the first n_count normalized radial Zernike polynomials.

    Shares one Jacobi sweep across all degrees; shape (n_count,) + shape(x).
    """
    if n_count < 1:
        raise ValueError("n_count must be positive")
    x = _check_unit_interval(x)
    s = N + p / 2.0
    polys = jacobi_table(n_count - 1, s, 0.0, 1.0 - 2.0 * x * x)
    n = np.arange(n_count, dtype=float)
    pref = np.where(n.astype(int) % 2 == 0, 1.0, -1.0) * np.sqrt(2.0 * (2.0 * n + s + 1.0))
    xn = _power(x, float(N))
    return pref.reshape((-1,) + (1,) * x.ndim) * polys * xn


def zernike_weighted_eval(idx: ZernikeIndex, x):
    """Weighted radial Zernike polynomial x**((p+1)/2) * R(x).

    This family is orthonormal on [0, 1] with unit weight. The value at
    x = 0 is the limit 0 (the weight exponent is always positive).
    """
    x = _check_unit_interval(x)
    weight = _power(x, (idx.p + 1) / 2.0)
    out = weight * zernike_normalized_eval(idx, x)
    return float(out) if np.ndim(out) == 0 else out


def log_gamma(z: float) -> float:
    """Natural log of the gamma function for z > 0."""
    if z <= 0.0:
        raise ValueError(f"log_gamma requires z > 0, got {z}")
    return math.lgamma(z)


def bessel_j(order: float, x):
    """Bessel function of the first kind of real non-negative order.

    Only consumed by the quadrature oracle; accuracy there needs roughly
    1e-12 absolute over the kernel's argument range.
    """
    if order < 0.0:
        raise ValueError(f"order must be non-negative, got {order}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("argument must be non-negative")
    out = _scipy_jv(order, x_arr)
    return float(out) if x_arr.ndim == 0 else out


def _legendre_with_derivative(m: int, x: np.ndarray):
    """Value and derivative of the degree-m Legendre polynomial."""
    p_prev = np.ones_like(x)
    p_cur = x.copy()
    for k in range(2, m + 1):
        p_prev, p_cur = p_cur, ((2.0 * k - 1.0) * x * p_cur - (k - 1.0) * p_prev) / k
    dp = m * (x * p_cur - p_prev) / (x * x - 1.0)
    return p_cur, dp


def gauss_legendre_01(m: int) -> QuadratureRule:
    """m-point Gauss-Legendre rule mapped to [0, 1].

    Nodes are found by Newton iteration on the Legendre recurrence,
    converged to 1e-15; the rule integrates polynomials of degree
    up to 2m - 1 exactly.
    """
    if m < 1:
        raise ValueError(f"rule size must be positive, got {m}")
    if m == 1:
        return QuadratureRule(nodes=np.array([0.5]), weights=np.array([1.0]))
    k = np.arange(m, dtype=float)
    x = np.cos(math.pi * (k + 0.75) / (m + 0.5))
    dp = np.ones_like(x)
    for _ in range(100):
        p, dp = _legendre_with_derivative(m, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise RuntimeError(f"Legendre Newton iteration failed to converge for m={m}")
    _, dp = _legendre_with_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return QuadratureRule(nodes=(1.0 + x[order]) / 2.0, weights=w[order] / 2.0)
