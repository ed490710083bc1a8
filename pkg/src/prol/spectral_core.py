"""Tridiagonal form of the commuting differential operator and its
eigendecomposition.

For fixed (p, c, N) the second-order differential operator that commutes
with the band-limited kernel integral operator is symmetric tridiagonal in
the basis of weighted radial Zernike polynomials. Its eigenvectors are the
expansion coefficients of the weighted radial eigenfunctions, so everything
downstream reduces to an ordinary symmetric tridiagonal eigenproblem plus a
truncation choice.

Eigenvalues come from bisection (LAPACK stebz) and eigenvectors from
inverse iteration (stein), then every retained vector is polished with
inverse-power steps using its Ritz shift. The polish matters: downstream
formulas read individual small coefficients (the leading coefficient in
particular) and need them to relative, not just absolute, accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from .errors import EigensolverError, TruncationError

__all__ = [
    "ProblemParams",
    "TridiagonalOperator",
    "EigenSystem",
    "kappa",
    "build_operator",
    "choose_truncation",
    "eigendecompose",
    "solve_eigensystem",
]

# smallest magnitude trusted when picking the sign reference coefficient
_SIGN_FLOOR = 1e-290

_MAX_DOUBLINGS = 6


@dataclass(frozen=True)
class ProblemParams:
    """The triple (p, c, N) fixing one radial eigenproblem.

    p is dimension minus two, c the positive bandlimit, N the angular
    order.
    """

    p: int
    c: float
    N: int

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"p must be non-negative (dimension >= 2), got {self.p}")
        if not self.c > 0.0:
            raise ValueError(f"bandlimit c must be positive, got {self.c}")
        if self.N < 0:
            raise ValueError(f"angular order N must be non-negative, got {self.N}")

    @classmethod
    def from_dimension(cls, dimension: int, c: float, N: int) -> "ProblemParams":
        if dimension < 2:
            raise ValueError(f"dimension must be at least 2, got {dimension}")
        return cls(p=dimension - 2, c=c, N=N)

    @property
    def dimension(self) -> int:
        return self.p + 2

    @property
    def half_order(self) -> float:
        """The combined order N + p/2 appearing throughout the formulas."""
        return self.N + self.p / 2.0


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix of the differential operator.

    Stores the diagonal and the single off-diagonal; symmetry is therefore
    structural. Off-diagonal entries are strictly negative.
    """

    params: ProblemParams
    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=float))
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must have one entry fewer than diag")
        self.diag.setflags(write=False)
        self.offdiag.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.diag)

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-vector product."""
        out = self.diag * vec
        out[:-1] += self.offdiag * vec[1:]
        out[1:] += self.offdiag * vec[:-1]
        return out


@dataclass(frozen=True)
class EigenSystem:
    """Retained eigenpairs, sorted by ascending eigenvalue magnitude.

    vectors[n] is the unit-norm coefficient vector of the n-th radial
    eigenfunction in the weighted Zernike basis; its leading nonzero
    coefficient is positive for even n and negative for odd n.
    """

    operator: TridiagonalOperator
    chi: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "chi", np.asarray(self.chi, dtype=float))
        object.__setattr__(self, "vectors", np.asarray(self.vectors, dtype=float))
        self.chi.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def n_pairs(self) -> int:
        return len(self.chi)

    def residuals(self) -> np.ndarray:
        """Two-norm of (B h - chi h) for each retained pair."""
        return np.array(
            [
                np.linalg.norm(self.operator.apply(self.vectors[n]) - self.chi[n] * self.vectors[n])
                for n in range(self.n_pairs)
            ]
        )


def kappa(p: int, N: int, n: int) -> float:
    """Diagonal coefficient (2n+N+p/2+1/2)(2n+N+p/2+3/2)."""
    if p < 0 or N < 0 or n < 0:
        raise ValueError("kappa arguments must be non-negative")
    t = 2.0 * n + N + p / 2.0
    return (t + 0.5) * (t + 1.5)


def build_operator(params: ProblemParams, K: int) -> TridiagonalOperator:
    """Assemble the leading K x K block of the tridiagonal operator.

    The diagonal is -(c^2 q_n + kappa_n) where q_n is the diagonal matrix
    element of multiplication by x^2 in the weighted Zernike basis. The
    generic formula for q_n is 0/0 at n = N = p = 0; the continuous limit
    there is 1/2, which is also what direct expansion of the operator
    applied to the lowest basis function gives, so that limit is used.
    """
    if K < 2:
        raise ValueError(f"truncation size must be at least 2, got {K}")
    s = params.half_order
    c2 = params.c * params.c
    n = np.arange(K, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = ((2.0 * n + s + 1.0) * s + 2.0 * (n + 1.0) * n) / ((2.0 * n + s) * (2.0 * n + s + 2.0))
    q[0] = (s + 1.0) / (s + 2.0)
    diag = -(c2 * q + (2.0 * n + s + 0.5) * (2.0 * n + s + 1.5))
    m = np.arange(1, K, dtype=float)
    t = 2.0 * m + s
    offdiag = -(c2 * m * (m + s)) / (np.sqrt(1.0 - 2.0 / (t + 1.0)) * t * (t + 1.0))
    return TridiagonalOperator(params=params, diag=diag, offdiag=offdiag)


def _initial_truncation(params: ProblemParams, n_max: int) -> int:
    return max(2 * n_max + 32, math.ceil(params.c) + n_max + 32)


def _refine_pair(op: TridiagonalOperator, chi: float, vec: np.ndarray, norm_inf: float):
    """One inverse-power step at the Ritz shift, then a Rayleigh update.

    An exactly singular shift is retried once with a relative perturbation
    of 1e-13; a second failure aborts.
    """
    K = op.size
    ab = np.zeros((3, K))
    ab[0, 1:] = op.offdiag
    ab[2, :-1] = op.offdiag
    for attempt, shift in enumerate((chi, chi + 1e-13 * norm_inf)):
        ab[1, :] = op.diag - shift
        try:
            new = solve_banded((1, 1), ab, vec)
        except LinAlgError:
            continue
        if not np.all(np.isfinite(new)):
            continue
        new = new / np.linalg.norm(new)
        return float(new @ op.apply(new)), new
    raise EigensolverError(
        f"inverse-power refinement failed twice at chi={chi!r} for {op.params}"
    )


def _apply_sign_convention(vectors: np.ndarray) -> None:
    # Reference coefficient is h[0] unless it sits below the underflow
    # floor, in which case the first trustworthy coefficient stands in,
    # corrected by the parity of its index.
    for n in range(vectors.shape[0]):
        h = vectors[n]
        above = np.nonzero(np.abs(h) > _SIGN_FLOOR)[0]
        j = int(above[0]) if above.size else int(np.argmax(np.abs(h)))
        ref = h[j] * (-1.0 if j % 2 else 1.0)
        want_negative = bool(n % 2)
        if (ref < 0.0) != want_negative:
            vectors[n] = -h


def eigendecompose(op: TridiagonalOperator, n_keep: int) -> EigenSystem:
    """Compute the n_keep eigenpairs of smallest eigenvalue magnitude.

    Parameters
    ----------
    op : TridiagonalOperator
        Operator block to decompose.
    n_keep : int
        Number of eigenpairs to retain, at most op.size.

    Returns
    -------
    EigenSystem
        Pairs sorted by ascending |chi|, each refined by inverse-power
        iteration and carrying the deterministic sign convention.

    Notes
    -----
    The set of smallest-|chi| eigenvalues is a contiguous block of the
    value-sorted spectrum, so inverse iteration only runs on that block.
    Nearly coincident retained eigenvalues are reported through a warning
    rather than silently accepted.
    """
    if n_keep < 1:
        raise ValueError("n_keep must be positive")
    if n_keep > op.size:
        raise ValueError(f"n_keep={n_keep} exceeds operator size {op.size}")
    norm_inf = op.norm_inf()
    values = eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True)
    by_magnitude = np.lexsort((values, np.abs(values)))
    block = np.sort(by_magnitude[:n_keep])
    lo, hi = int(block[0]), int(block[-1])
    _, raw_vectors = eigh_tridiagonal(op.diag, op.offdiag, select="i", select_range=(lo, hi))

    refined = []
    for i in range(hi - lo + 1):
        chi, vec = values[lo + i], raw_vectors[:, i]
        for _ in range(2):
            chi, vec = _refine_pair(op, chi, vec, norm_inf)
        refined.append((chi, vec))

    chis = np.array([r[0] for r in refined])
    vecs = np.array([r[1] for r in refined])
    order = np.lexsort((chis, np.abs(chis)))[:n_keep]
    chis, vecs = chis[order], vecs[order].copy()

    signed = np.sort(chis)
    gaps = np.diff(signed)
    if gaps.size and gaps.min() <= 1e-8 * norm_inf:
        warnings.warn(
            f"retained eigenvalues nearly coincide for {op.params}: "
            f"min gap {gaps.min():.3e} vs scale {norm_inf:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )

    _apply_sign_convention(vecs)
    return EigenSystem(operator=op, chi=chis, vectors=vecs)


def _tail_magnitude(system: EigenSystem) -> float:
    return float(np.max(np.abs(system.vectors[:, -2:])))


def _solve_with_tail_control(params: ProblemParams, n_max: int, tol: float):
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if not 0.0 < tol <= 1.0:
        raise ValueError(f"tail tolerance must lie in (0, 1], got {tol}")
    K = _initial_truncation(params, n_max)
    tails = []
    for _ in range(_MAX_DOUBLINGS + 1):
        system = eigendecompose(build_operator(params, K), n_max + 1)
        tail = _tail_magnitude(system)
        if tail <= tol:
            return K, system
        tails.append((K, tail))
        K *= 2
    raise TruncationError(
        f"expansion tails did not fall below {tol:.1e} for {params} "
        f"after {_MAX_DOUBLINGS} doublings: " + ", ".join(f"K={k}: {t:.2e}" for k, t in tails)
    )


def choose_truncation(params: ProblemParams, n_max: int, tol: float) -> int:
    """Smallest tried truncation size whose retained eigenvectors have
    converged tails.

    Starts from max(2 n_max + 32, ceil(c) + n_max + 32) and doubles until
    the last two coefficients of every retained eigenvector are at most
    tol in magnitude (eigenvectors are unit norm).
    """
    K, _ = _solve_with_tail_control(params, n_max, tol)
    return K


def solve_eigensystem(params: ProblemParams, n_max: int, tol: float = 1e-14) -> EigenSystem:
    """Decompose at an automatically chosen truncation.

    Same tail-controlled doubling as choose_truncation but returns the
    final system instead of recomputing it.
    """
    _, system = _solve_with_tail_control(params, n_max, tol)
    return system
