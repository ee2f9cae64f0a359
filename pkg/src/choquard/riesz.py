"""Radial reduction of the Riesz convolution g -> I_alpha * g.

The convolution against the kernel c |x|^(alpha-N) reduces for radial g to a
one-dimensional integral against the sphere-averaged kernel

    A(r, s) = omega_{N-2} int_0^pi (r^2 + s^2 - 2 r s cos t)^((alpha-N)/2) sin^(N-2) t dt,

so that (I_alpha * g)(r) = c int_0^inf A(r, s) g(s) s^(N-1) ds.  For N = 3 the
angular integral has a closed form; for N = 1 the two-point kernel applies.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.integrate import quad

from .errors import InvalidArgumentError
from .grid import ProblemParams, RadialGrid, RadialProfile, sphere_area


def riesz_constant(dim: int, alpha: float) -> float:
    """Normalization constant of the kernel c |x|^(alpha-N)."""
    if not 0.0 < alpha < dim:
        raise InvalidArgumentError(f"alpha must lie in (0, {dim}), got {alpha}")
    return gamma((dim - alpha) / 2.0) / (gamma(alpha / 2.0) * pi ** (dim / 2.0) * 2.0**alpha)


def _angular_n3(r, s, alpha):
    """Closed-form sphere average for N = 3 (omega_1 = 2 pi)."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if alpha == 1.0:
        return 2.0 * pi * np.log(((r + s) / np.abs(r - s)) ** 2) / (2.0 * r * s)
    return (
        2.0
        * pi
        * ((r + s) ** (alpha - 1.0) - np.abs(r - s) ** (alpha - 1.0))
        / (r * s * (alpha - 1.0))
    )


def _angular_quad(r: float, s: float, dim: int, alpha: float) -> float:
    """Adaptive theta-quadrature of the sphere average for general N >= 2.

    For alpha <= 1 the substitution theta = phi^2 tames the endpoint behavior
    near theta = 0.
    """
    omega = 2.0 if dim == 2 else sphere_area(dim - 1)
    ex = (alpha - dim) / 2.0

    def integrand(t):
        return (r * r + s * s - 2.0 * r * s * np.cos(t)) ** ex * np.sin(t) ** (dim - 2)

    if alpha <= 1.0:
        val, _ = quad(
            lambda phi: 2.0 * phi * integrand(phi * phi),
            0.0,
            np.sqrt(pi),
            limit=200,
        )
    else:
        val, _ = quad(integrand, 0.0, pi, limit=200)
    return omega * val


def angular_kernel(r: float, s: float, params: ProblemParams) -> float:
    """Sphere-averaged kernel A(r, s); symmetric in (r, s)."""
    if r <= 0.0 or s <= 0.0:
        raise InvalidArgumentError("radii must be positive")
    dim, alpha = params.dim, params.alpha
    if dim == 1:
        return abs(r - s) ** (alpha - 1.0) + (r + s) ** (alpha - 1.0)
    if dim == 3:
        return float(_angular_n3(r, s, alpha))
    return _angular_quad(r, s, dim, alpha)


@dataclass(frozen=True)
class KernelMatrix:
    """Dense radial reduction of g -> I_alpha * g on a fixed grid."""

    entries: np.ndarray
    params: ProblemParams
    grid: RadialGrid

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.entries @ np.asarray(values, dtype=float)


def _diagonal_cell(r: float, lo: float, hi: float, params: ProblemParams) -> float:
    """Integral of A(r, s) s^(N-1) over the cell containing s = r.

    The integrand is weakly singular at s = r for alpha <= 1; the adaptive
    rule is told about the interior singular point.
    """
    dim = params.dim

    def f(s):
        return angular_kernel(r, s, params) * s ** (dim - 1)

    val, _ = quad(f, lo, hi, points=[r], limit=200)
    return val


def assemble_kernel(grid: RadialGrid, params: ProblemParams) -> KernelMatrix:
    """Assemble K with K @ g sampling I_alpha * g on the grid nodes.

    Off-diagonal entries pair the sphere-averaged kernel with the grid
    quadrature weights; the diagonal cell is integrated adaptively with g
    treated as locally constant.
    """
    nodes = grid.nodes
    n = nodes.size
    dim, alpha = params.dim, params.alpha
    c = params.riesz_constant
    if dim == 3:
        A = _angular_n3(nodes[:, None], nodes[None, :], alpha)
        np.fill_diagonal(A, 0.0)
    elif dim == 1:
        r, s = nodes[:, None], nodes[None, :]
        A = np.abs(r - s) ** (alpha - 1.0) + (r + s) ** (alpha - 1.0)
        np.fill_diagonal(A, 0.0)
    else:
        A = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i != j:
                    A[i, j] = angular_kernel(nodes[i], nodes[j], params)
    K = c * A * grid.weights[None, :]
    cell_len = grid.weights / nodes ** (dim - 1)
    for i in range(n):
        lo = max(nodes[i] - cell_len[i] / 2.0, nodes[i] / 2.0 if i == 0 else 0.0)
        hi = nodes[i] + cell_len[i] / 2.0
        K[i, i] = c * _diagonal_cell(nodes[i], lo, hi, params)
    return KernelMatrix(entries=K, params=params, grid=grid)


def riesz_convolve(kernel: KernelMatrix, profile: RadialProfile, p: float) -> RadialProfile:
    """Samples of I_alpha * |u|^p on the grid."""
    g = np.abs(profile.values) ** p
    return RadialProfile(kernel.grid, kernel.apply(g))


def farfield_deviation(
    conv: RadialProfile, total_mass: float, params: ProblemParams
) -> RadialProfile:
    """Rescaled far-field defect d(r) = |conv(r) - c r^(alpha-N) M| r^(N-alpha).

    For groundstates the defect is bounded by
    C (1/(1+r) + 1/(1+r^(N(p-1)))).
    """
    r = conv.grid.nodes
    c = params.riesz_constant
    d = np.abs(conv.values - c * r ** (params.alpha - params.dim) * total_mass)
    return RadialProfile(conv.grid, d * r ** (params.dim - params.alpha))


def farfield_envelope(r: np.ndarray, params: ProblemParams) -> np.ndarray:
    """Shape of the guaranteed decay rate of the far-field defect."""
    return 1.0 / (1.0 + r) + 1.0 / (1.0 + r ** (params.dim * (params.p - 1.0)))


_MAGIC = b"CHQKRN01"


def kernel_cache_key(grid: RadialGrid, params: ProblemParams) -> str:
    """Hash key identifying a kernel by (N, alpha, grid nodes)."""
    h = hashlib.sha256()
    h.update(struct.pack("<id", params.dim, params.alpha))
    h.update(grid.nodes.tobytes())
    return h.hexdigest()[:16]


def save_kernel(path, kernel: KernelMatrix) -> None:
    """Binary cache: 32-byte header (magic, n, N, alpha) + row-major float64."""
    n = kernel.grid.n
    header = _MAGIC + struct.pack("<iid", n, kernel.params.dim, kernel.params.alpha)
    header += b"\x00" * (32 - len(header))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(kernel.entries.astype("<f8").tobytes(order="C"))


def load_kernel(path, grid: RadialGrid, params: ProblemParams) -> KernelMatrix:
    with open(path, "rb") as fh:
        header = fh.read(32)
        if header[:8] != _MAGIC:
            raise InvalidArgumentError(f"{path}: not a kernel cache file")
        n, dim, alpha = struct.unpack("<iid", header[8:24])
        if n != grid.n or dim != params.dim or abs(alpha - params.alpha) > 1e-14:
            raise InvalidArgumentError(f"{path}: cache does not match (n, N, alpha)")
        data = np.frombuffer(fh.read(8 * n * n), dtype="<f8").reshape(n, n)
    return KernelMatrix(entries=data.copy(), params=params, grid=grid)
