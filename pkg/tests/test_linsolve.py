"""Radial boundary-value solver: manufactured solutions and the power-law check."""

import numpy as np
import pytest

from choquard import InvalidArgumentError, RadialBVP, make_grid, power_rhs_check, solve_bvp
from choquard.linsolve import operator_apply


def manufactured_error(n):
    """Max error of the solve for the manufactured solution v = exp(-r^2)."""
    grid = make_grid(8.0, n, 3, "uniform")
    r = grid.nodes
    v_exact = np.exp(-r * r)
    # -v'' - (2/r) v' + v with v = exp(-r^2)
    rhs = (6.0 - 4.0 * r * r) * v_exact + v_exact
    bvp = RadialBVP(grid=grid, potential=1.0, rhs=rhs, outer_value=float(v_exact[-1]))
    v = solve_bvp(bvp).values
    return float(np.max(np.abs(v - v_exact)))


def test_manufactured_solution():
    assert manufactured_error(400) < 1.5e-3


def test_second_order_convergence():
    e1 = manufactured_error(200)
    e2 = manufactured_error(400)
    assert e1 / e2 > 3.0  # second order: factor 4


def test_maximum_principle():
    # nonnegative rhs with zero boundary data gives a nonnegative solution
    grid = make_grid(10.0, 300, 3, "uniform")
    rng = np.random.default_rng(3)
    rhs = rng.uniform(0.0, 1.0, grid.n)
    v = solve_bvp(RadialBVP(grid=grid, potential=1.0, rhs=rhs)).values
    assert np.all(v >= 0.0)


def test_operator_is_discrete_inverse():
    grid = make_grid(10.0, 300, 3, "uniform")
    rng = np.random.default_rng(5)
    rhs = rng.uniform(0.0, 1.0, grid.n)
    bvp = RadialBVP(grid=grid, potential=1.0, rhs=rhs)
    v = solve_bvp(bvp).values
    back = operator_apply(bvp, v)
    # interior rows reproduce the rhs exactly (same stencil)
    assert np.max(np.abs(back[:-1] - rhs[:-1])) < 1e-10


def test_inner_dirichlet_condition():
    grid = make_grid(10.0, 300, 3, "uniform")
    v = solve_bvp(
        RadialBVP(grid=grid, potential=1.0, rhs=0.0, inner_value=2.0, outer_value=0.0)
    ).values
    assert v[0] == 2.0
    assert v[-1] == 0.0
    assert np.all(np.diff(v) <= 1e-12)


def test_coercivity_guard():
    grid = make_grid(10.0, 300, 3, "uniform")
    with pytest.raises(InvalidArgumentError):
        RadialBVP(grid=grid, potential=0.0, rhs=1.0)


def test_power_rhs_plateau():
    grid = make_grid(40.0, 2000, 3, "uniform")
    for lam, beta in [(1.0, 2.0), (4.0, 3.0)]:
        rep = power_rhs_check(lam, beta, grid)
        assert rep.deviation < 0.02


def test_power_rhs_halves_under_domain_doubling():
    d1 = power_rhs_check(1.0, 2.0, make_grid(40.0, 2000, 3, "uniform")).deviation
    d2 = power_rhs_check(1.0, 2.0, make_grid(80.0, 4000, 3, "uniform")).deviation
    assert d2 < d1 / 2.0


def test_power_rhs_guards():
    grid = make_grid(40.0, 2000, 3, "uniform")
    with pytest.raises(InvalidArgumentError):
        power_rhs_check(-1.0, 2.0, grid)
    with pytest.raises(InvalidArgumentError):
        power_rhs_check(1.0, 2.0, make_grid(10.0, 500, 3, "uniform"))
