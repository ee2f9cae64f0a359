"""Groundstate computation by a solve-and-rescale fixed-point iteration.

Each sweep solves the linear problem -Delta v + v = (I_alpha * u^p) u^(p-1),
mixes it with the previous iterate and rescales onto the Nehari constraint.
Every step is a preconditioned descent step for the quotient S on the
constraint set, so S is monitored and must not increase.

The stopping residual is evaluated in the solver's own cell-measure
quadrature, which is exactly compatible with the discrete operator: at the
discrete fixed point it vanishes to machine precision.  Reported residuals
use the public quadrature operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInputError,
    InputError,
    InvalidArgumentError,
    NonexistenceError,
    StagnationError,
)
from .functionals import (
    evaluate,
    FunctionalValues,
    integral_identity_residual,
    nehari_project,
    nehari_residual,
    pohozaev_residual,
)
from .grid import (
    ProblemParams,
    RadialGrid,
    RadialProfile,
    integrate,
    load_profile_csv,
)
from .linsolve import RadialBVP, solve_bvp
from .riesz import KernelMatrix, farfield_deviation, riesz_convolve


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 500
    tol_residual: float = 1e-8
    damping: float = 1.0
    init: str = "gaussian"  # gaussian | exponential | file
    init_path: str | None = None

    def __post_init__(self):
        if self.tol_residual <= 0.0:
            raise InvalidArgumentError("tol_residual must be positive")
        if self.max_iter < 1:
            raise InvalidArgumentError("max_iter must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise InvalidArgumentError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class GroundstateResult:
    profile: RadialProfile
    values: FunctionalValues
    s_history: tuple
    iterations: int
    converged: bool


def init_profile(kind: str, grid: RadialGrid, path: str | None = None) -> RadialProfile:
    """Starting profile: gaussian e^(-r^2), exponential e^(-r), or a CSV file."""
    if kind == "gaussian":
        return RadialProfile(grid, np.exp(-grid.nodes**2), positive=True, monotone=True)
    if kind == "exponential":
        return RadialProfile(grid, np.exp(-grid.nodes), positive=True, monotone=True)
    if kind == "file":
        if path is None:
            raise InputError("init kind 'file' needs a path")
        loaded = load_profile_csv(path, grid.dim)
        if loaded.grid.n != grid.n or not np.allclose(loaded.grid.nodes, grid.nodes):
            values = np.interp(grid.nodes, loaded.grid.nodes, loaded.values)
        else:
            values = loaded.values
        return RadialProfile(grid, values)
    raise InvalidArgumentError(f"unknown init kind {kind!r}")


def require_admissible(params: ProblemParams) -> None:
    """Raise NonexistenceError outside the strict existence range of 1/p."""
    if not params.admissible:
        lo = (params.dim - 2.0) / (params.dim + params.alpha)
        hi = params.dim / (params.dim + params.alpha)
        raise NonexistenceError(
            f"no nontrivial solution exists: 1/p = {1.0 / params.p:.6g} lies outside "
            f"({lo:.6g}, {hi:.6g}), where the only solution is u = 0"
        )


def _cell_kmd(
    values: np.ndarray, grid: RadialGrid, kernel: KernelMatrix, p: float
) -> tuple[float, float, float]:
    """K, M, D in the solver's cell-measure quadrature (operator-compatible)."""
    omega = grid.sphere_area
    dv = np.diff(values)
    K = omega * float(np.dot(grid.stiffness_coeffs, dv * dv))
    m = grid.cell_measures
    M = omega * float(np.dot(m, values * values))
    g = np.abs(values) ** p
    conv = kernel.apply(g)
    D = omega * float(np.dot(m, conv * g))
    return K, M, D


def solve_groundstate(
    params: ProblemParams,
    grid: RadialGrid,
    kernel: KernelMatrix,
    config: SolverConfig | None = None,
) -> GroundstateResult:
    """Iterate to the positive radial minimizer of S on the Nehari constraint.

    Raises NonexistenceError outside the admissible range (the only solution
    there is u = 0) and StagnationError if S keeps increasing even at the
    smallest damping.
    """
    if config is None:
        config = SolverConfig()
    require_admissible(params)
    p = params.p
    theta = config.damping
    min_theta = config.damping / 16.0

    u = init_profile(config.init, grid, config.init_path).values
    u = np.maximum(u, 0.0)
    u = _cell_project(u, grid, kernel, p)
    s_prev = _cell_s(u, grid, kernel, params)
    s_history = [s_prev]
    converged = False
    iterations = 0

    for _ in range(config.max_iter):
        iterations += 1
        g = kernel.apply(u**p)
        f = g * u ** (p - 1.0)
        v = solve_bvp(RadialBVP(grid=grid, potential=1.0, rhs=f)).values
        # the scalar residuals below are quadratic in the distance to the
        # fixed point; this relative mismatch is linear in it and prevents
        # stopping with a grid-independent pointwise error
        m = grid.cell_measures
        delta_fp = np.sqrt(
            float(np.dot(m, (v - u) ** 2)) / float(np.dot(m, u * u))
        )
        cand = (1.0 - theta) * u + theta * v
        K, M, D = _cell_kmd(cand, grid, kernel, p)
        res_fp = abs((K + M - D) / (K + M + D))
        t = ((K + M) / D) ** (1.0 / (2.0 * p - 2.0))
        u_new = t * cand
        s_new = (t * t * (K + M)) / (t ** (2.0 * p) * D) ** (1.0 / p)
        if s_new > s_prev * (1.0 + 1e-12):
            theta /= 2.0
            if theta < min_theta:
                raise StagnationError(
                    f"quotient increased ({s_prev!r} -> {s_new!r}) even at damping "
                    f"{theta * 2.0}; try a smaller initial damping"
                )
            continue
        u = u_new
        ds = abs(s_new - s_prev) / abs(s_new)
        s_prev = s_new
        s_history.append(s_new)
        if (
            res_fp < config.tol_residual
            and ds < config.tol_residual
            and delta_fp < config.tol_residual
        ):
            converged = True
            break

    profile = RadialProfile(
        grid,
        u,
        # the boundary node is pinned to zero by the truncation, not the PDE
        positive=bool(np.all(u[:-1] > 0.0)),
        monotone=bool(np.all(np.diff(u) <= 1e-10 * np.max(u))),
    )
    # final rescale in the public quadrature so the reported residual vanishes
    _, profile = nehari_project(profile, kernel, params)
    values = evaluate(profile, kernel, params)
    return GroundstateResult(
        profile=profile,
        values=values,
        s_history=tuple(s_history),
        iterations=iterations,
        converged=converged,
    )


def _cell_project(values, grid, kernel, p):
    K, M, D = _cell_kmd(values, grid, kernel, p)
    if D <= 0.0:
        raise DegenerateInputError("initial profile has vanishing nonlocal term")
    return ((K + M) / D) ** (1.0 / (2.0 * p - 2.0)) * values


def _cell_s(values, grid, kernel, params):
    K, M, D = _cell_kmd(values, grid, kernel, params.p)
    return (K + M) / D ** (1.0 / params.p)


@dataclass(frozen=True)
class VerificationReport:
    """Residuals of every closed-form identity the groundstate must satisfy."""

    nehari_residual: float
    pohozaev_residual: float
    integral_identity_residual: float
    min_value: float
    max_upward_jump: float
    farfield_max_deviation: float
    pde_residual: float
    thresholds: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return all(self.checks.values())


DEFAULT_THRESHOLDS = {
    "nehari": 1e-8,
    "pohozaev": 1e-3,
    "integral_identity": 1e-3,
    "monotone_jump": 1e-10,  # relative to max value
    "farfield": 1e-2,
    "pde_residual": 1e-2,
}


def verify_groundstate(
    result: GroundstateResult,
    kernel: KernelMatrix,
    params: ProblemParams,
    thresholds: dict | None = None,
    tail_window: tuple[float, float] = (0.5, 0.8),
) -> VerificationReport:
    """Check every identity, sign and decay property of a computed profile."""
    profile = result.profile
    if profile.is_zero():
        raise DegenerateInputError("cannot verify the zero profile")
    thr = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        thr.update(thresholds)
    grid = profile.grid
    u = profile.values

    res_nehari = abs(nehari_residual(profile, kernel, params))
    res_poho = abs(pohozaev_residual(profile, kernel, params))
    res_ident = abs(integral_identity_residual(profile, kernel, params))
    # u[-1] is the truncation boundary value, pinned to zero by construction
    min_value = float(np.min(u[:-1]))
    jumps = np.diff(u)
    max_jump = float(max(np.max(jumps), 0.0))

    conv = riesz_convolve(kernel, profile, params.p)
    total = integrate(grid, profile, params.p)
    ratio = conv.values * grid.nodes ** (params.dim - params.alpha) / (
        params.riesz_constant * total
    )
    lo, hi = tail_window[0] * grid.r_max, tail_window[1] * grid.r_max
    win = (grid.nodes >= lo) & (grid.nodes <= hi)
    farfield_dev = float(np.max(np.abs(ratio[win] - 1.0)))

    pde_res = pde_residual_norm(profile, kernel, params)

    checks = {
        "nehari": res_nehari <= thr["nehari"],
        "pohozaev": res_poho <= thr["pohozaev"],
        "integral_identity": res_ident <= thr["integral_identity"],
        "positivity": min_value > 0.0,
        "monotonicity": max_jump <= thr["monotone_jump"] * float(np.max(u)),
        "farfield": farfield_dev <= thr["farfield"],
        "pde_residual": pde_res <= thr["pde_residual"],
        "converged": result.converged,
    }
    return VerificationReport(
        nehari_residual=res_nehari,
        pohozaev_residual=res_poho,
        integral_identity_residual=res_ident,
        min_value=min_value,
        max_upward_jump=max_jump,
        farfield_max_deviation=farfield_dev,
        pde_residual=pde_res,
        thresholds=thr,
        checks=checks,
    )


def pde_residual_norm(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> float:
    """Relative weighted-L2 norm of -Delta u + u - (I_alpha * u^p) u^(p-1).

    The Laplacian uses the classical centered stencil, which is independent of
    the conservative stencil the solver is built on, so the norm measures a
    genuine discretization residual.
    """
    grid = profile.grid
    r = grid.nodes
    u = profile.values
    p = params.p
    g = kernel.apply(np.abs(u) ** p)
    rhs = g * np.abs(u) ** (p - 1.0) * np.sign(u)
    h_l = r[1:-1] - r[:-2]
    h_r = r[2:] - r[1:-1]
    # second-order difference on a (possibly nonuniform) grid
    upp = 2.0 * (h_l * u[2:] - (h_l + h_r) * u[1:-1] + h_r * u[:-2]) / (
        h_l * h_r * (h_l + h_r)
    )
    up = (u[2:] - u[:-2]) / (h_l + h_r)
    lap = upp + (params.dim - 1.0) / r[1:-1] * up
    res = -lap + u[1:-1] - rhs[1:-1]
    w = grid.weights[1:-1]
    scale = np.sqrt(float(np.dot(w, (np.abs(rhs[1:-1]) + np.abs(u[1:-1])) ** 2)))
    return float(np.sqrt(np.dot(w, res * res)) / scale)


def farfield_rate_check(
    profile: RadialProfile,
    kernel: KernelMatrix,
    params: ProblemParams,
    tail_window: tuple[float, float] = (0.5, 0.8),
) -> dict:
    """Fit one constant to the far-field defect envelope over the tail window.

    Returns the fitted constant and the worst envelope ratio; the defect obeys
    the proved rate when the worst ratio stays within a modest factor of the
    fitted (median) constant.
    """
    from .riesz import farfield_envelope

    grid = profile.grid
    conv = riesz_convolve(kernel, profile, params.p)
    total = integrate(grid, profile, params.p)
    dev = farfield_deviation(conv, total, params).values
    env = farfield_envelope(grid.nodes, params)
    lo, hi = tail_window[0] * grid.r_max, tail_window[1] * grid.r_max
    win = (grid.nodes >= lo) & (grid.nodes <= hi)
    ratios = dev[win] / env[win]
    fitted = float(np.median(ratios))
    worst = float(np.max(ratios))
    return {"fitted_constant": fitted, "worst_ratio": worst, "window": (lo, hi)}
