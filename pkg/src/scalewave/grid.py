"""Radially symmetric spatial mesh with quadrature and a discrete Laplacian.

Functions on R^n are reduced to profiles on r in [0, r_max].  Integrals
carry the surface measure omega_{n-1} r^(n-1) dr with trapezoidal weights
(robust at r = 0 where the measure vanishes), and the Laplacian acts as
u_rr + (n-1)/r u_r with the even-extension regularization n*u_rr(0) at the
origin.  The outer boundary is a homogeneous Dirichlet cut-off: callers
size r_max so nothing reaches it within the time horizon (finite speed of
propagation).  Grids are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma


@dataclass(frozen=True, eq=False)
class RadialGrid:
    n: int
    r_max: float
    dr: float
    r: np.ndarray
    quad_weights: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.r.size


def surface_measure(n: int) -> float:
    """Area of the unit sphere in R^n: 2*pi^(n/2)/Gamma(n/2)."""
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


def make_radial_grid(n: int, r_max: float, dr: float) -> RadialGrid:
    """Uniform radial mesh on [0, r_max] with trapezoidal quadrature weights.

    The requested spacing is snapped minimally so that the last node sits
    exactly on r_max.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    if not r_max > 0.0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if not 0.0 < dr < r_max:
        raise ValueError(f"need 0 < dr < r_max, got dr={dr}, r_max={r_max}")
    num = int(round(r_max / dr)) + 1
    spacing = r_max / (num - 1)
    r = spacing * np.arange(num)
    weights = surface_measure(int(n)) * r ** (n - 1) * spacing
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return RadialGrid(n=int(n), r_max=float(r_max), dr=float(spacing), r=r, quad_weights=weights)


def integrate(grid: RadialGrid, values) -> float:
    """Quadrature approximation of the integral of a radial profile over R^n."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.r.shape:
        raise ValueError(f"expected {grid.r.size} nodal values, got shape {values.shape}")
    return float(grid.quad_weights @ values)


def laplacian_apply(grid: RadialGrid, u) -> np.ndarray:
    """Second-order discrete radial Laplacian u_rr + (n-1)/r u_r.

    At r = 0 the even extension u(-dr) = u(dr) gives the regularized value
    n*u_rr(0); at r = r_max the exterior ghost value is 0 (Dirichlet
    cut-off).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != grid.r.shape:
        raise ValueError(f"expected {grid.r.size} nodal values, got shape {u.shape}")
    n, dr, r = grid.n, grid.dr, grid.r
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dr**2
    if n > 1:
        out[1:-1] += (n - 1) * (u[2:] - u[:-2]) / (2.0 * dr * r[1:-1])
    out[0] = 2.0 * n * (u[1] - u[0]) / dr**2
    out[-1] = (-2.0 * u[-1] + u[-2]) / dr**2
    if n > 1:
        out[-1] += (n - 1) * (-u[-2]) / (2.0 * dr * r[-1])
    return out


def radial_derivative(grid: RadialGrid, u) -> np.ndarray:
    """Centered radial derivative; 0 at the origin (even symmetry), ghost 0 outside."""
    u = np.asarray(u, dtype=float)
    if u.shape != grid.r.shape:
        raise ValueError(f"expected {grid.r.size} nodal values, got shape {u.shape}")
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - u[:-2]) / (2.0 * grid.dr)
    out[0] = 0.0
    out[-1] = -u[-2] / (2.0 * grid.dr)
    return out
