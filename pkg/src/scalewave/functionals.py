"""Norms, energies, and the averaged comparison functional.

The spatial weight is exp(sigma*W) with W(t,x) = mu1*|x|^2/(2*(1+t)^2), so
a weighted L2 norm is the plain L2 norm of exp(sigma*W)*f.  Weighted
integrands are evaluated only where the profile is numerically nonzero; if
the weight exponent exceeds the overflow budget on that active set a
WeightOverflowError is raised instead of silently saturating, since the
weighted theory is only meaningful while the discrete integrals are finite
and resolved.

The comparison frame rescales the solution by (1+t)^((mu1-1)/2 -
sqrt(delta)/2); in that frame the mass term drops out and the spatial
integral of the rescaled solution obeys the blow-up comparison inequality
implemented in the odi module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError, WeightOverflowError
from .grid import RadialGrid, integrate
from .model import ModelParams, coefficients, discriminant, weight_exponent

# Nodes with |f| at or below this floor are treated as exact zeros: the
# weight is never evaluated there, so far-field nodes cannot overflow.
ACTIVE_FLOOR = 1e-300

# Largest admissible weight exponent on the active set.
EXPONENT_BUDGET = 600.0


@dataclass(frozen=True)
class NormSample:
    """One time slice of recorded norms/energies; values keyed by name."""

    t: float
    values: dict


def _guarded_weight(exponents: np.ndarray, mask: np.ndarray, what: str) -> np.ndarray:
    if np.any(exponents[mask] > EXPONENT_BUDGET):
        raise WeightOverflowError(
            f"weight overflow in {what}: exponent exceeds {EXPONENT_BUDGET:.0f} "
            "on the support; shrink the data support or r_max"
        )
    out = np.zeros_like(exponents)
    out[mask] = np.exp(exponents[mask])
    return out


def weighted_l2(grid: RadialGrid, values, params: ModelParams, sigma: float, t: float) -> float:
    """L2 norm of exp(sigma*W(t,.))*f by radial quadrature."""
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    values = np.asarray(values, dtype=float)
    mask = np.abs(values) > ACTIVE_FLOOR
    expo = 2.0 * sigma * weight_exponent(params, t, grid.r**2)
    weight = _guarded_weight(expo, mask, "weighted_l2")
    return math.sqrt(max(integrate(grid, weight * values**2), 0.0))


def weighted_lq(grid: RadialGrid, values, params: ModelParams, sigma: float, t: float, q: float) -> float:
    """Lq norm of exp(sigma*W(t,.))*f; q = 2 coincides with weighted_l2."""
    if q < 1.0:
        raise ValueError(f"q must be >= 1, got {q}")
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    values = np.asarray(values, dtype=float)
    mask = np.abs(values) > ACTIVE_FLOOR
    expo = q * sigma * weight_exponent(params, t, grid.r**2)
    weight = _guarded_weight(expo, mask, "weighted_lq")
    return integrate(grid, weight * np.abs(values) ** q) ** (1.0 / q)


def weighted_energy(grid: RadialGrid, u, u_t, u_r, params: ModelParams, t: float) -> float:
    """(1/2) * integral of exp(2W) * (u_t^2 + |grad u|^2 + m^2(t) u^2).

    ``u_t`` is expected from the centered two-level difference of the wave
    state, ``u_r`` from the centered radial difference.
    """
    u = np.asarray(u, dtype=float)
    u_t = np.asarray(u_t, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    _, m_sq = coefficients(params, t)
    density = u_t**2 + u_r**2 + m_sq * u**2
    mask = density > ACTIVE_FLOOR
    expo = 2.0 * weight_exponent(params, t, grid.r**2)
    weight = _guarded_weight(expo, mask, "weighted_energy")
    return 0.5 * integrate(grid, weight * density)


def weighted_gradient_norm(grid: RadialGrid, u_r, u_t, params: ModelParams, t: float) -> float:
    """L2 norm of exp(W)*(grad u, u_t) as a joint space-time gradient pair."""
    u_r = np.asarray(u_r, dtype=float)
    u_t = np.asarray(u_t, dtype=float)
    density = u_r**2 + u_t**2
    mask = density > ACTIVE_FLOOR
    expo = 2.0 * weight_exponent(params, t, grid.r**2)
    weight = _guarded_weight(expo, mask, "weighted_gradient_norm")
    return math.sqrt(max(integrate(grid, weight * density), 0.0))


def comparison_frame_factor(params: ModelParams, t: float) -> float:
    """(1+t)^((mu1-1)/2 - sqrt(delta)/2); requires a nonnegative discriminant."""
    d = discriminant(params)
    if d < 0.0:
        raise RegimeError(f"comparison frame needs delta >= 0, got {d}")
    return (1.0 + t) ** (0.5 * (params.mu1 - 1.0) - 0.5 * math.sqrt(d))


def to_comparison_frame(values, t: float, params: ModelParams) -> np.ndarray:
    """Rescale solution values into the frame where the mass term drops out."""
    return comparison_frame_factor(params, t) * np.asarray(values, dtype=float)


def spatial_integral(grid: RadialGrid, values) -> float:
    """Signed integral over R^n of a (compactly supported) radial profile."""
    return integrate(grid, values)
