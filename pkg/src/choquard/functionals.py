"""Variational functionals, Nehari projection and identity residuals.

With K = int |grad u|^2, M = int |u|^2 and D = int (I_alpha * |u|^p) |u|^p the
four functionals are

    E  = (K + M)/2 - D/(2p)            (free energy)
    E0 = K/2 - D/(2p)                  (energy without the mass term)
    S  = (K + M) / D^(1/p)             (quotient minimized by groundstates)
    W  = K^(N/2 - (N+a)/(2p)) M^((N+a)/(2p) - (N-2)/2) / D^(1/p)

W is invariant under both rescaling u -> l u and dilation u -> u(t .).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateInputError, RegimeError
from .grid import ProblemParams, RadialProfile, grad_norm_sq, integrate
from .riesz import KernelMatrix, riesz_convolve


@dataclass(frozen=True)
class FunctionalValues:
    kinetic: float
    mass: float
    nonlocal_energy: float
    energy: float
    energy0: float
    s_quotient: float
    w_quotient: float


def nonlocal_term(profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams) -> float:
    """D = int (I_alpha * |u|^p) |u|^p via the grid quadrature."""
    grid = profile.grid
    conv = riesz_convolve(kernel, profile, params.p)
    return grid.sphere_area * float(
        np.dot(grid.weights, conv.values * np.abs(profile.values) ** params.p)
    )


def evaluate(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> FunctionalValues:
    """All functional values of a nonzero profile."""
    if profile.is_zero():
        raise DegenerateInputError("functionals are undefined for the zero profile")
    grid = profile.grid
    K = grad_norm_sq(grid, profile)
    M = integrate(grid, profile, 2.0)
    D = nonlocal_term(profile, kernel, params)
    if D <= 0.0:
        raise DegenerateInputError("nonlocal term vanished; degenerate profile")
    return _values_from_kmd(K, M, D, params)


def _values_from_kmd(K: float, M: float, D: float, params: ProblemParams) -> FunctionalValues:
    n, a, p = params.dim, params.alpha, params.p
    E = (K + M) / 2.0 - D / (2.0 * p)
    E0 = K / 2.0 - D / (2.0 * p)
    S = (K + M) / D ** (1.0 / p)
    W = K ** (n / 2.0 - (n + a) / (2.0 * p)) * M ** ((n + a) / (2.0 * p) - (n - 2.0) / 2.0) / D ** (
        1.0 / p
    )
    return FunctionalValues(
        kinetic=K, mass=M, nonlocal_energy=D, energy=E, energy0=E0, s_quotient=S, w_quotient=W
    )


def nehari_project(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> tuple[float, RadialProfile]:
    """Scale t u onto the constraint K + M = D; t = ((K+M)/D)^(1/(2p-2))."""
    vals = evaluate(profile, kernel, params)
    t = ((vals.kinetic + vals.mass) / vals.nonlocal_energy) ** (1.0 / (2.0 * params.p - 2.0))
    return t, profile.with_values(t * profile.values)


def nehari_residual(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> float:
    """(K + M - D) / (K + M + D); zero profiles return 0."""
    if profile.is_zero():
        return 0.0
    v = evaluate(profile, kernel, params)
    K, M, D = v.kinetic, v.mass, v.nonlocal_energy
    return (K + M - D) / (K + M + D)


def pohozaev_residual(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> float:
    """((N-2)/2 K + N/2 M - (N+a)/(2p) D) / (K + M + D); zero profiles return 0."""
    if profile.is_zero():
        return 0.0
    v = evaluate(profile, kernel, params)
    K, M, D = v.kinetic, v.mass, v.nonlocal_energy
    n, a, p = params.dim, params.alpha, params.p
    val = (n - 2.0) / 2.0 * K + n / 2.0 * M - (n + a) / (2.0 * p) * D
    return val / (K + M + D)


def integral_identity_residual(
    profile: RadialProfile, kernel: KernelMatrix, params: ProblemParams
) -> float:
    """(M - ((a+2)/(p-1) - (N-2)) E) / M for (near-)groundstates."""
    if profile.is_zero():
        raise DegenerateInputError("identity is indeterminate for the zero profile")
    v = evaluate(profile, kernel, params)
    coeff = (params.alpha + 2.0) / (params.p - 1.0) - (params.dim - 2.0)
    return (v.mass - coeff * v.energy) / v.mass


def mass_energy_coefficient(params: ProblemParams) -> float:
    """Predicted ratio M / E = (alpha+2)/(p-1) - (N-2) for groundstates."""
    return (params.alpha + 2.0) / (params.p - 1.0) - (params.dim - 2.0)


@dataclass(frozen=True)
class ScanReport:
    """Numeric optimum of a scaling family against its closed form."""

    which: str
    t_star: float
    numeric_value: float
    closed_form_value: float | None
    relative_gap: float | None
    regime: str = "standard"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _golden_log_opt(f, sign: float) -> tuple[float, float]:
    """Optimize f over t in [1e-3, 1e3] (golden section in log t)."""
    res = minimize_scalar(
        lambda x: sign * f(np.exp(x)),
        bracket=None,
        bounds=(np.log(1e-3), np.log(1e3)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    t = float(np.exp(res.x))
    return t, sign * float(res.fun)


def dilation_scan(
    profile: RadialProfile,
    kernel: KernelMatrix,
    params: ProblemParams,
    which: str,
    extremum: str = "auto",
) -> ScanReport:
    """Scan a one-parameter scaling family and compare with its closed form.

    which = "E-ray":          max_t E(t u)       vs (1/2 - 1/(2p)) S(u)^(p/(p-1))
    which = "S-dilate":       min_t S(u_t)       vs the W-based closed form
    which = "E0-mass-dilate": extremum of E0(t^(N/2) u_t), regime-dependent

    The scans use the exact scaling algebra on (K, M, D); no resampling.
    """
    vals = evaluate(profile, kernel, params)
    K, M, D = vals.kinetic, vals.mass, vals.nonlocal_energy
    n, a, p = params.dim, params.alpha, params.p

    if which == "E-ray":
        f = lambda t: (t * t * (K + M)) / 2.0 - t ** (2.0 * p) * D / (2.0 * p)
        t_star, numeric = _golden_log_opt(f, -1.0)
        closed = (0.5 - 0.5 / p) * vals.s_quotient ** (p / (p - 1.0))
        return ScanReport("E-ray", t_star, numeric, closed, _gap(numeric, closed))

    if which == "S-dilate":
        ea = 2.0 - n + (n + a) / p  # exponent of t on K after dividing by D^(1/p) scaling
        eb = (n + a) / p - n
        f = lambda t: K * t**ea + M * t**eb
        t_star, numeric = _golden_log_opt(lambda t: f(t) / D ** (1.0 / p), 1.0)
        pref = 2.0 / ((n + a) / p - (n - 2.0))
        ratio = (1.0 / p - (n - 2.0) / (n + a)) / (n / (n + a) - 1.0 / p)
        closed = pref * ratio ** (n / 2.0 - (n + a) / (2.0 * p)) * vals.w_quotient
        return ScanReport("S-dilate", t_star, numeric, closed, _gap(numeric, closed))

    if which == "E0-mass-dilate":
        e = n * (p - 1.0) - a  # exponent of t on the nonlocal term
        f = lambda t: K * t * t / 2.0 - D * t**e / (2.0 * p)
        w_over_m = vals.w_quotient / M ** ((n + a) / (2.0 * p) - (n - 2.0) / 2.0)
        if abs(e - 2.0) < 1e-12:
            if extremum in ("min", "max"):
                raise RegimeError(
                    "1/p = N/(N+alpha+2): E0 of the mass-preserving dilation scales "
                    "exactly as t^2; no interior extremum exists"
                )
            # scale-invariance law: E0(t^(N/2) u_t) = t^2 E0(u)
            drift = max(
                abs(f(t) / (t * t) - vals.energy0) for t in (0.5, 1.0, 2.0, 10.0)
            )
            return ScanReport(
                "E0-mass-dilate",
                1.0,
                vals.energy0,
                vals.energy0,
                drift / max(abs(vals.energy0), 1e-300),
                regime="scale-invariant",
            )
        if e < 2.0:
            if extremum == "max":
                raise RegimeError(
                    "1/p > N/(N+alpha+2): E0 along mass-preserving dilations has a "
                    "minimum, not a maximum (sup is +infinity)"
                )
            t_star, numeric = _golden_log_opt(f, 1.0)
            closed = -(
                (1.0 / e - 0.5)
                * (2.0 * p / e) ** (2.0 / (e - 2.0))
                * w_over_m ** (2.0 * p / (e - 2.0))
            )
            return ScanReport(
                "E0-mass-dilate", t_star, numeric, closed, _gap(numeric, closed), regime="minimum"
            )
        # e > 2: inf over t is -infinity; the family still has a maximum
        if extremum == "min":
            raise RegimeError(
                "1/p < N/(N+alpha+2): inf_t E0(t^(N/2) u_t) = -infinity; "
                "no minimum exists in this regime"
            )
        t_star, numeric = _golden_log_opt(f, -1.0)
        closed = (
            (0.5 - 1.0 / e)
            * (2.0 * p / e) ** (2.0 / (e - 2.0))
            * w_over_m ** (2.0 * p / (e - 2.0))
        )
        return ScanReport(
            "E0-mass-dilate", t_star, numeric, closed, _gap(numeric, closed), regime="divergent"
        )

    raise RegimeError(f"unknown scan family {which!r}")


def _gap(numeric: float, closed: float) -> float:
    scale = max(abs(numeric), abs(closed), 1e-300)
    return abs(numeric - closed) / scale
