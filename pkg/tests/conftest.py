"""Shared fixtures; the expensive solves are session-scoped and reused."""

import numpy as np
import pytest

from choquard import (
    ProblemParams,
    RadialProfile,
    assemble_kernel,
    make_grid,
    solve_groundstate,
)


@pytest.fixture(scope="session")
def phys_params():
    return ProblemParams(dim=3, alpha=2.0, p=2.0)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(12.0, 240, 3, "uniform")


@pytest.fixture(scope="session")
def small_kernel(small_grid, phys_params):
    # kernel entries depend on (N, alpha, grid) only; shared across p
    return assemble_kernel(small_grid, phys_params)


@pytest.fixture(scope="session")
def small_result(phys_params, small_grid, small_kernel):
    return solve_groundstate(phys_params, small_grid, small_kernel)


@pytest.fixture(scope="session")
def acc_grid():
    return make_grid(30.0, 3000, 3, "uniform")


@pytest.fixture(scope="session")
def acc_kernel(acc_grid, phys_params):
    return assemble_kernel(acc_grid, phys_params)


@pytest.fixture(scope="session")
def acc_result(phys_params, acc_grid, acc_kernel):
    return solve_groundstate(phys_params, acc_grid, acc_kernel)


@pytest.fixture(scope="session")
def super_params():
    return ProblemParams(dim=3, alpha=2.0, p=2.5)


@pytest.fixture(scope="session")
def super_result(super_params, acc_grid, acc_kernel):
    return solve_groundstate(super_params, acc_grid, acc_kernel)


@pytest.fixture(scope="session")
def sub_params():
    return ProblemParams(dim=3, alpha=2.0, p=1.8)


@pytest.fixture(scope="session")
def sub_grid():
    return make_grid(240.0, 3000, 3, "graded")


@pytest.fixture(scope="session")
def sub_kernel(sub_grid, sub_params):
    return assemble_kernel(sub_grid, sub_params)


@pytest.fixture(scope="session")
def sub_result(sub_params, sub_grid, sub_kernel):
    return solve_groundstate(sub_params, sub_grid, sub_kernel)


def random_positive_profile(grid, rng):
    """Random smooth positive bump: mixture of gaussians of varied widths."""
    r = grid.nodes
    v = np.zeros_like(r)
    for _ in range(3):
        amp = rng.uniform(0.2, 2.0)
        width = rng.uniform(0.5, 2.5)
        v += amp * np.exp(-((r / width) ** 2))
    return RadialProfile(grid, v, positive=True)
