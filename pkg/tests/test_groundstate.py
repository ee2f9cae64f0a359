"""Fixed-point groundstate solver and the verification report."""

import numpy as np
import pytest

from choquard import (
    NonexistenceError,
    ProblemParams,
    SolverConfig,
    assemble_kernel,
    make_grid,
    solve_groundstate,
    verify_groundstate,
)
from choquard.errors import InvalidArgumentError
from choquard.groundstate import init_profile, pde_residual_norm, require_admissible


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SolverConfig(tol_residual=0.0)
    with pytest.raises(InvalidArgumentError):
        SolverConfig(max_iter=0)
    with pytest.raises(InvalidArgumentError):
        SolverConfig(damping=1.5)


def test_nonexistence_gate():
    grid = make_grid(12.0, 240, 3, "uniform")
    for p in (5.0, 5.0 / 3.0, 8.0):
        params = ProblemParams(3, 2.0, p)
        with pytest.raises(NonexistenceError):
            require_admissible(params)
        kernel = assemble_kernel(grid, params)
        with pytest.raises(NonexistenceError):
            solve_groundstate(params, grid, kernel)


def test_converges_physical_case(small_result):
    assert small_result.converged
    assert small_result.iterations < 100
    assert small_result.profile.positive
    assert small_result.profile.monotone


def test_quotient_monotone_descent(small_result):
    s = np.asarray(small_result.s_history)
    assert np.all(np.diff(s) <= 1e-12 * s[:-1])


def test_verification_certifies(small_result, small_kernel, phys_params):
    report = verify_groundstate(small_result, small_kernel, phys_params)
    assert report.certified, report.checks


def test_custom_threshold_can_fail(small_result, small_kernel, phys_params):
    report = verify_groundstate(
        small_result, small_kernel, phys_params, thresholds={"pde_residual": 1e-12}
    )
    assert not report.certified
    assert not report.checks["pde_residual"]


def test_init_agreement(phys_params, small_grid, small_kernel, small_result):
    alt = solve_groundstate(
        phys_params, small_grid, small_kernel, SolverConfig(init="exponential")
    )
    s_a = small_result.values.s_quotient
    s_b = alt.values.s_quotient
    assert abs(s_a - s_b) / s_a < 1e-6


def test_init_from_file(tmp_path, phys_params, small_grid, small_kernel, small_result):
    from choquard import save_profile_csv

    path = tmp_path / "warm.csv"
    save_profile_csv(path, small_result.profile)
    warm = solve_groundstate(
        phys_params,
        small_grid,
        small_kernel,
        SolverConfig(init="file", init_path=str(path)),
    )
    assert warm.converged
    assert warm.iterations <= small_result.iterations


def test_init_profile_guards(small_grid):
    with pytest.raises(InvalidArgumentError):
        init_profile("plane-wave", small_grid)


def test_pde_residual_small(small_result, small_kernel, phys_params):
    assert pde_residual_norm(small_result.profile, small_kernel, phys_params) < 1e-2


def test_pde_residual_refines_second_order(phys_params):
    res = {}
    for n in (750, 1500):
        grid = make_grid(30.0, n, 3, "uniform")
        kernel = assemble_kernel(grid, phys_params)
        result = solve_groundstate(phys_params, grid, kernel)
        res[n] = pde_residual_norm(result.profile, kernel, phys_params)
    assert res[750] / res[1500] > 3.0


def test_solver_other_alpha():
    # a non-Newtonian kernel exercise: alpha = 1.5
    params = ProblemParams(3, 1.5, 2.0)
    grid = make_grid(12.0, 240, 3, "uniform")
    kernel = assemble_kernel(grid, params)
    result = solve_groundstate(params, grid, kernel)
    assert result.converged
    report = verify_groundstate(result, kernel, params)
    assert report.checks["nehari"]
    assert report.checks["integral_identity"]
