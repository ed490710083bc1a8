"""Shared fixtures: cached eigensystem solves keyed by problem."""

import numpy as np
import pytest

from prol import ProblemParams, eigenvalue_chain, solve_eigensystem


class SolverCache:
    """Session cache of solved eigensystems, grown on demand."""

    def __init__(self):
        self._systems = {}

    def system(self, p, c, N, n_max):
        key = (p, float(c), N)
        cached = self._systems.get(key)
        if cached is None or cached.n_pairs < n_max + 1:
            cached = solve_eigensystem(ProblemParams(p, c, N), n_max)
            self._systems[key] = cached
        return cached

    def chain(self, p, c, N, n_max):
        system = self.system(p, c, N, n_max)
        return system, eigenvalue_chain(ProblemParams(p, c, N), system, n_max)


@pytest.fixture(scope="session")
def solver_cache():
    return SolverCache()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
