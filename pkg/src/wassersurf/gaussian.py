"""Diagonal-covariance Gaussian surfaces in sqrt-covariance coordinates.

A two-parameter family of zero-mean Gaussians with diagonal covariances
Sigma(s,t) is stored through gamma_i = sqrt(Sigma_ii).  The linear
velocity coefficients A_s, A_t of the covariance path solve the diagonal
Lyapunov relations d_s Sigma = 2 A_s Sigma (and likewise in t), which
gives A directly from finite differences of Sigma.  The first-order
optimality system of the area functional couples those velocities to
symmetric multiplier matrices; its residual is evaluated here entrywise
on the diagonal.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSurfaceError, PositivityError
from .grid import SurfaceField

J_FLOOR = 1e-12


@dataclass(eq=False)
class DiagonalCovSurface:
    """Surface field holding gamma_i(s,t) = sqrt(Sigma_ii(s,t)) > 0."""

    field: SurfaceField

    def __post_init__(self):
        low = float(self.field.values.min())
        if low <= 0.0:
            raise PositivityError(
                f"sqrt-covariance entries must be strictly positive, minimum is {low:.6g}"
            )

    @property
    def n(self) -> int:
        return self.field.dim


def sqrt_coords(sigma: SurfaceField) -> DiagonalCovSurface:
    """Entrywise square root of a grid of positive covariance diagonals."""
    if float(sigma.values.min()) <= 0.0:
        raise PositivityError("covariance diagonals must be strictly positive")
    return DiagonalCovSurface(SurfaceField(sigma.grid, np.sqrt(sigma.values)))


def covariance_field(surf: DiagonalCovSurface) -> SurfaceField:
    """Inverse of ``sqrt_coords``: squares the coordinates entrywise."""
    return SurfaceField(surf.field.grid, np.square(surf.field.values))


def gaussian_geodesic_diag(sig0, sig1, tau: float) -> np.ndarray:
    """Covariance diagonal along the optimal-transport path between Gaussians.

    For diagonal covariances the path interpolates the square roots
    linearly: ((1 - tau) sqrt(sig0) + tau sqrt(sig1))^2, matching the
    per-coordinate quantile interpolation of 1-D Gaussian families.
    """
    sig0 = np.asarray(sig0, dtype=float)
    sig1 = np.asarray(sig1, dtype=float)
    if np.any(sig0 <= 0.0) or np.any(sig1 <= 0.0):
        raise PositivityError("covariance diagonals must be strictly positive")
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if tau == 0.0:
        return sig0.copy()
    if tau == 1.0:
        return sig1.copy()
    return ((1.0 - tau) * np.sqrt(sig0) + tau * np.sqrt(sig1)) ** 2


def _fd_axis(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second-order first derivative on a uniform grid axis.

    Central differences inside, one-sided three-point stencils at the two
    ends; both are exact on quadratics, so identities built from them
    cancel cleanly wherever the data is polynomial of degree <= 2.
    """
    if values.shape[axis] < 3:
        raise ValueError("need at least 3 nodes along the differentiation axis")
    v = np.moveaxis(values, axis, 0)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(d, 0, axis)


def lyapunov_velocity(surf: DiagonalCovSurface, direction: str) -> np.ndarray:
    """Velocity coefficients A_ii = d Sigma_ii / (2 Sigma_ii) on every node.

    ``direction`` selects the parameter ('s' or 't'); the derivative of
    Sigma uses central differences inside and one-sided second-order
    stencils on the edges.
    """
    grid = surf.field.grid
    if direction == "s":
        axis, h = 0, grid.hs
    elif direction == "t":
        axis, h = 1, grid.ht
    else:
        raise ValueError(f"direction must be 's' or 't', got {direction!r}")
    sigma = np.square(surf.field.values)
    return _fd_axis(sigma, h, axis) / (2.0 * sigma)


@dataclass(eq=False)
class CriticalFields:
    """Velocity coefficients and multipliers of the optimality system.

    All matrices are diagonal, stored as n-vectors per node; ``j`` is the
    pointwise area density of the two velocity fields.
    """

    a_s: np.ndarray
    a_t: np.ndarray
    s_s: np.ndarray
    s_t: np.ndarray
    j: np.ndarray


def _velocity_terms(surf: DiagonalCovSurface, j_floor: float):
    sigma = np.square(surf.field.values)
    a_s = lyapunov_velocity(surf, "s")
    a_t = lyapunov_velocity(surf, "t")
    qs = np.einsum("ijk,ijk->ij", sigma, a_s * a_s)
    qt = np.einsum("ijk,ijk->ij", sigma, a_t * a_t)
    p = np.einsum("ijk,ijk->ij", sigma, a_s * a_t)
    j = np.sqrt(np.maximum(qs * qt - p * p, 0.0))
    if np.any(j < j_floor):
        i, k = np.unravel_index(int(np.argmin(j)), j.shape)
        raise DegenerateSurfaceError(
            f"area density J = {j[i, k]:.3e} below floor {j_floor:.1e} at node ({i}, {k}): "
            "the s- and t-velocities are (near-)parallel"
        )
    return sigma, a_s, a_t, qs, qt, p, j


def critical_fields(surf: DiagonalCovSurface, j_floor: float = J_FLOOR) -> CriticalFields:
    """Solve the multiplier equations pointwise for S_s, S_t.

    S_s = (A_s * qt - A_t * p) / (2 J) entrywise, with qt, qs the velocity
    energies and p their cross term; S_t symmetrically.
    """
    _, a_s, a_t, qs, qt, p, j = _velocity_terms(surf, j_floor)
    twoj = 2.0 * j[..., None]
    s_s = (a_s * qt[..., None] - a_t * p[..., None]) / twoj
    s_t = (a_t * qs[..., None] - a_s * p[..., None]) / twoj
    return CriticalFields(a_s=a_s, a_t=a_t, s_s=s_s, s_t=s_t, j=j)


@dataclass(frozen=True)
class CriticalResidualReport:
    """Residual of the optimality system over an interior window."""

    values: np.ndarray
    max_norm: float
    border: int


def critical_point_residual(
    surf: DiagonalCovSurface, border: int = 1, j_floor: float = J_FLOOR
) -> CriticalResidualReport:
    """Entrywise residual of the first-order optimality system.

    Evaluates d_s S_s + d_t S_t plus the quadratic velocity term on every
    node at least ``border`` nodes away from the edges (multiplier
    derivatives need interior stencils).  For a family sampled from an
    exact critical point the max-norm decreases as O(h^2) under grid
    refinement.  A node where J falls below ``j_floor`` raises
    DegenerateSurfaceError with its location.
    """
    grid = surf.field.grid
    ns, nt = grid.ns, grid.nt
    if border < 1:
        raise ValueError("border must be at least 1")
    if ns - 2 * border < 1 or nt - 2 * border < 1:
        raise ValueError(f"grid {ns}x{nt} too small for border {border}")
    _, a_s, a_t, qs, qt, p, j = _velocity_terms(surf, j_floor)
    twoj = 2.0 * j[..., None]
    s_s = (a_s * qt[..., None] - a_t * p[..., None]) / twoj
    s_t = (a_t * qs[..., None] - a_s * p[..., None]) / twoj
    div = _fd_axis(s_s, grid.hs, 0) + _fd_axis(s_t, grid.ht, 1)
    quad = (a_s * a_s * qt[..., None] + a_t * a_t * qs[..., None]
            - 2.0 * a_s * a_t * p[..., None]) / twoj
    full = div + quad
    window = (slice(border, ns - border), slice(border, nt - border))
    values = np.zeros_like(full)
    values[window] = full[window]
    max_norm = float(np.max(np.abs(full[window])))
    return CriticalResidualReport(values=values, max_norm=max_norm, border=border)
