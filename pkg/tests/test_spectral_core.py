import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from prol import (
    ProblemParams,
    build_operator,
    choose_truncation,
    eigendecompose,
    kappa,
    solve_eigensystem,
)

C_FIGURE = 20.0 * math.pi


class TestProblemParams:
    def test_from_dimension(self):
        params = ProblemParams.from_dimension(3, 5.0, 2)
        assert params.p == 1 and params.dimension == 3

    @pytest.mark.parametrize("p,c,N", [(-1, 1.0, 0), (0, 0.0, 0), (0, -2.0, 0), (0, 1.0, -1)])
    def test_validation(self, p, c, N):
        with pytest.raises(ValueError):
            ProblemParams(p, c, N)

    def test_dimension_lower_bound(self):
        with pytest.raises(ValueError):
            ProblemParams.from_dimension(1, 1.0, 0)


class TestKappa:
    @pytest.mark.parametrize(
        "p,N,n,expected",
        [(0, 0, 0, 0.75), (1, 0, 0, 2.0), (0, 1, 1, 15.75)],
    )
    def test_values(self, p, N, n, expected):
        assert_allclose(kappa(p, N, n), expected, rtol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            kappa(-1, 0, 0)


class TestBuildOperator:
    def test_small_bandlimit_diagonal_is_minus_kappa(self):
        params = ProblemParams(2, 1e-9, 3)
        op = build_operator(params, 6)
        for n in range(6):
            assert_allclose(op.diag[n], -kappa(2, 3, n), rtol=1e-12)

    def test_first_offdiagonal_value(self):
        op = build_operator(ProblemParams(1, 1.0, 0), 4)
        expected = -1.5 / (math.sqrt(3.0 / 7.0) * 2.5 * 3.5)
        assert_allclose(op.offdiag[0], expected, rtol=1e-14)

    def test_corner_entry_continuous_limit(self):
        # at p = N = n = 0 the generic diagonal formula is 0/0; the entry
        # follows the continuous limit -kappa - c^2/2 so that the
        # differential operator identity holds (see the oracle tests)
        op = build_operator(ProblemParams(0, 1.0, 0), 4)
        assert_allclose(op.diag[0], -0.75 - 0.5, rtol=1e-14)

    def test_offdiagonal_strictly_negative(self):
        op = build_operator(ProblemParams(1, 7.0, 2), 30)
        assert np.all(op.offdiag < 0.0)

    def test_size_validation(self):
        with pytest.raises(ValueError):
            build_operator(ProblemParams(0, 1.0, 0), 1)

    def test_norm_and_apply(self):
        op = build_operator(ProblemParams(1, 3.0, 1), 8)
        vec = np.arange(1.0, 9.0)
        dense = np.diag(op.diag) + np.diag(op.offdiag, 1) + np.diag(op.offdiag, -1)
        assert_allclose(op.apply(vec), dense @ vec, rtol=1e-14)
        assert_allclose(op.norm_inf(), np.abs(dense).sum(axis=1).max(), rtol=1e-14)


class TestChooseTruncation:
    def test_small_problem(self):
        assert choose_truncation(ProblemParams(1, 1.0, 0), 0, 1e-14) == 33

    def test_figure_scale(self):
        K = choose_truncation(ProblemParams(1, C_FIGURE, 0), 40, 1e-14)
        assert K >= 112

    def test_tolerance_one_returns_initial_guess(self):
        params = ProblemParams(1, 5.0, 0)
        assert choose_truncation(params, 3, 1.0) == max(2 * 3 + 32, math.ceil(5.0) + 3 + 32)

    def test_tail_actually_converged(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        assert np.max(np.abs(system.vectors[:, -2:])) <= 1e-14


class TestEigendecompose:
    def test_small_bandlimit_limit(self):
        # eigenvectors collapse to coordinate vectors; the sign rule keys
        # off the leading coefficient, whose perturbation carries the sign
        # of the peak, so odd vectors come out negated
        params = ProblemParams(1, 1e-6, 0)
        system = eigendecompose(build_operator(params, 40), 6)
        for n in range(6):
            assert abs(system.chi[n] + kappa(1, 0, n)) <= 1e-9
            unit = np.zeros(40)
            unit[n] = 1.0 if n % 2 == 0 else -1.0
            assert np.max(np.abs(system.vectors[n] - unit)) <= 1e-9

    def test_residual_bound_figure_scale(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        bound = 1e-12 * system.operator.norm_inf()
        assert float(system.residuals().max()) <= bound

    def test_unit_norms(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        norms = np.linalg.norm(system.vectors, axis=1)
        assert np.max(np.abs(norms - 1.0)) <= 1e-14

    def test_sign_convention(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        lead = system.vectors[:, 0]
        assert system.vectors[1][0] < 0.0
        for n in range(system.n_pairs):
            assert (lead[n] > 0.0) == (n % 2 == 0)

    def test_sorted_by_magnitude(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        mags = np.abs(system.chi)
        assert np.all(np.diff(mags) > 0.0)

    def test_pairwise_orthogonality(self, solver_cache):
        system = solver_cache.system(1, C_FIGURE, 0, 40)
        gram = system.vectors @ system.vectors.T
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) <= 1e-10

    def test_n_keep_validation(self):
        op = build_operator(ProblemParams(0, 1.0, 0), 8)
        with pytest.raises(ValueError):
            eigendecompose(op, 9)
        with pytest.raises(ValueError):
            eigendecompose(op, 0)

    def test_bandlimit_continuity(self):
        c = 9.0
        chi_a = solve_eigensystem(ProblemParams(1, c, 0), 0).chi[0]
        chi_b = solve_eigensystem(ProblemParams(1, c * (1.0 + 1e-8), 0), 0).chi[0]
        assert abs(chi_a - chi_b) <= 1e-5 * (1.0 + abs(chi_a))
