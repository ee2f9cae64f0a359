"""Decay-law extraction: the three tail regimes of the groundstate.

For p > 2 the linear operator dominates and u ~ C r^(-(N-1)/2) e^(-r).
For p = 2 the nonlocal term contributes an effective potential
1 - nu^(N-a)/r^(N-a) and the decay carries the Agmon correction
exp(-int_nu^r sqrt(1 - nu^(N-a)/s^(N-a)) ds), with
nu^(N-a) = c int u^2 = c (a+4-N) E.
For p < 2 the decay is polynomial: u^(2-p) r^(N-a) -> c int u^p.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidArgumentError, RegimeError, UnreliableTailError
from .grid import ProblemParams, RadialProfile, integrate


@dataclass(frozen=True)
class DecayReport:
    regime: str  # superlinear | linear | sublinear
    nu: float | None
    plateau: float
    drift: float
    window: tuple[float, float]
    predicted_limit: float | str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def classify_regime(p: float) -> str:
    if p > 2.0 + 1e-12:
        return "superlinear"
    if p < 2.0 - 1e-12:
        return "sublinear"
    return "linear"


def nu_parameter(params: ProblemParams, M: float, E: float | None = None, source: str = "mass") -> float:
    """Length scale nu with nu^(N-a) = c M, or c (a+4-N) E in the energy form."""
    if classify_regime(params.p) != "linear":
        raise RegimeError("nu is defined only in the linear regime p = 2")
    n, a = params.dim, params.alpha
    c = params.riesz_constant
    if source == "mass":
        base = c * M
    elif source == "energy":
        if a <= n - 4.0:
            raise RegimeError("energy form of nu needs alpha > N - 4")
        if E is None:
            raise InvalidArgumentError("energy form of nu needs the energy value")
        base = c * (a + 4.0 - n) * E
    else:
        raise InvalidArgumentError(f"unknown nu source {source!r}")
    if base == 0.0:
        return 0.0
    return base ** (1.0 / (n - a))


def agmon_integral(nu: float, params: ProblemParams, r: float) -> float:
    """int_nu^r sqrt(1 - nu^(N-a)/s^(N-a)) ds via the s = nu + sigma^2 substitution.

    The substitution removes the square-root zero at s = nu so the adaptive
    rule reaches 1e-10 relative accuracy.
    """
    if nu <= 0.0:
        raise InvalidArgumentError("nu must be positive")
    if r < nu:
        raise InvalidArgumentError(f"need r >= nu, got r = {r} < nu = {nu}")
    if r == nu:
        return 0.0
    k = params.dim - params.alpha

    def integrand(sigma):
        s = nu + sigma * sigma
        return 2.0 * sigma * np.sqrt(max(1.0 - (nu / s) ** k, 0.0))

    val, _ = quad(integrand, 0.0, np.sqrt(r - nu), epsrel=1e-10, epsabs=0.0, limit=200)
    return val


def decay_transform(
    profile: RadialProfile, params: ProblemParams, mask: np.ndarray, nu: float | None
) -> np.ndarray:
    """Transformed tail values whose limit the theory pins down."""
    r = profile.grid.nodes[mask]
    u = profile.values[mask]
    n = params.dim
    regime = classify_regime(params.p)
    if regime == "superlinear":
        return u * r ** ((n - 1.0) / 2.0) * np.exp(r)
    if regime == "linear":
        ag = np.array([agmon_integral(nu, params, ri) for ri in r])
        return u * r ** ((n - 1.0) / 2.0) * np.exp(ag)
    return u ** (2.0 - params.p) * r ** (n - params.alpha)


def decay_limit(
    profile: RadialProfile,
    params: ProblemParams,
    window: tuple[float, float] = (0.5, 0.8),
    max_drift: float = 0.25,
) -> DecayReport:
    """Extract the tail plateau of the regime-specific transform.

    The plateau is the median over the window; the drift (peak-to-peak spread
    relative to the plateau) is the honest error bar.  Excessive drift means
    the window has not reached the asymptotic regime and a larger r_max is
    needed.
    """
    grid = profile.grid
    regime = classify_regime(params.p)
    lo, hi = window[0] * grid.r_max, window[1] * grid.r_max
    mask = (grid.nodes >= lo) & (grid.nodes <= hi)
    if not np.any(mask):
        raise UnreliableTailError("tail window contains no grid nodes")
    if np.any(profile.values[mask] <= 0.0):
        raise UnreliableTailError(
            "profile not strictly positive over the tail window; raise r_max"
        )
    nu = None
    predicted: float | str = "finite-positive"
    if regime == "linear":
        M = integrate(grid, profile, 2.0)
        nu = nu_parameter(params, M)
        if nu >= lo:
            raise UnreliableTailError(
                f"tail window starts inside the Agmon radius nu = {nu:.3g}; raise r_max"
            )
    elif regime == "sublinear":
        predicted = params.riesz_constant * integrate(grid, profile, params.p)
    vals = decay_transform(profile, params, mask, nu)
    plateau = float(np.median(vals))
    drift = float((np.max(vals) - np.min(vals)) / abs(plateau))
    if drift > max_drift:
        raise UnreliableTailError(
            f"plateau drift {drift:.1%} over [{lo:.3g}, {hi:.3g}] exceeds "
            f"{max_drift:.0%}; raise r_max"
        )
    return DecayReport(
        regime=regime,
        nu=nu,
        plateau=plateau,
        drift=drift,
        window=(lo, hi),
        predicted_limit=predicted,
    )


def log_derivative(profile: RadialProfile) -> np.ndarray:
    """-d(ln u)/dr by centered differences (one-sided at the ends)."""
    r = profile.grid.nodes
    u = profile.values
    with np.errstate(divide="ignore", invalid="ignore"):
        # the truncation boundary value is zero; its entry comes out non-finite
        return -np.gradient(np.log(u), r)


def fit_tail_power(
    profile: RadialProfile,
    window: tuple[float, float] = (0.5, 0.8),
) -> float:
    """Least-squares exponent q of u(r) e^r ~ C r^(-q) over the tail window."""
    grid = profile.grid
    lo, hi = window[0] * grid.r_max, window[1] * grid.r_max
    mask = (grid.nodes >= lo) & (grid.nodes <= hi) & (profile.values > 0.0)
    r = grid.nodes[mask]
    y = np.log(profile.values[mask]) + r
    slope, _ = np.polyfit(np.log(r), y, 1)
    return float(-slope)


def decay_trace(
    profile: RadialProfile, params: ProblemParams, window: tuple[float, float] = (0.5, 0.8)
) -> tuple[np.ndarray, np.ndarray]:
    """(r, transformed value) pairs over the window, for external plotting."""
    grid = profile.grid
    lo, hi = window[0] * grid.r_max, window[1] * grid.r_max
    mask = (grid.nodes >= lo) & (grid.nodes <= hi) & (profile.values > 0.0)
    nu = None
    if classify_regime(params.p) == "linear":
        nu = nu_parameter(params, integrate(grid, profile, 2.0))
    return grid.nodes[mask], decay_transform(profile, params, mask, nu)
