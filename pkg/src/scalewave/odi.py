"""Blow-up comparison toolkit for second-order differential inequalities.

The inequality

    F'' + k0/(1+t) F' >= k1 (1+t)^alpha |F|^p,   k0, k1 > 0, alpha >= -2, p > 1,

with F(0) > 0 and F'(0) > 0 forces finite-time blow-up.  The driver is an
explicit comparison function G solving

    G' = nu (1+t)^(alpha+1) G^((p+1)/2),   G(0) = F(0),

for a margin parameter nu chosen small enough that (i) G's own differential
expression stays strictly below the inequality's right-hand side and (ii)
G'(0) < F'(0).  Separation of variables yields G in closed form together
with its life span; F dominates G on the common domain, so the life span is
an explicit upper bound mechanism for F's own blow-up time.

The equality version of the inequality is the extremal comparison case and
is integrated here by a classical fixed-step fourth-order method; any
genuine solution of the inequality dominates it, so checks against the
integrated trajectory are conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .verify import CheckReport

BLOWUP_CUTOFF = 1e12


@dataclass(frozen=True)
class OdiProblem:
    """Coefficients and initial data of the comparison inequality.

    ``k1 == 0`` is tolerated so the degenerate linear equation can be
    integrated; the comparison construction itself (``select_nu`` and
    friends) requires k1 > 0.
    """

    k0: float
    k1: float
    alpha: float
    p: float
    f0: float
    df0: float

    def __post_init__(self) -> None:
        if not self.k0 > 0.0:
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if self.k1 < 0.0:
            raise ValueError(f"k1 must be nonnegative, got {self.k1}")
        if self.alpha < -2.0:
            raise ValueError(f"alpha must be >= -2, got {self.alpha}")
        if not self.p > 1.0:
            raise ValueError(f"p must be > 1, got {self.p}")
        if not self.f0 > 0.0:
            raise ValueError(f"f0 must be positive, got {self.f0}")
        if not self.df0 > 0.0:
            raise ValueError(f"df0 must be positive, got {self.df0}")


def select_nu(problem: OdiProblem) -> float:
    """0.9 times the largest margin parameter that makes G a genuine subsolution.

    G must satisfy G'' + k0/(1+t) G' <= k1 (1+t)^alpha G^p on [0, life span).
    Dividing through, the requirement is

        nu*(alpha+1+k0)*G(t)^(-(p-1)/2) + nu^2*(p+1)/2*(1+t)^(alpha+2) <= k1,

    and eliminating (1+t)^(alpha+2) through the closed form of G makes the
    left side linear in G^(-(p-1)/2) in (0, f0^(-(p-1)/2)], so it peaks at
    an endpoint.  Both endpoints give a quadratic constraint in nu with the
    same leading coefficient (p+1)/2 and linear coefficient

        max(alpha+1+k0, (p+1)*(alpha+2)/(p-1)) * f0^(-(p-1)/2);

    at alpha = -2 the second argument vanishes and this reduces to the
    plain damping-side constraint.  nu is 0.9 times the smaller of the
    positive quadratic root (one always exists for k1 > 0) and the slope
    bound df0*f0^(-(p+1)/2) enforcing G'(0) < F'(0); the 0.9 margin trades
    a slightly weaker life-span bound for strictness.
    """
    if problem.k1 <= 0.0:
        raise ValueError("margin selection needs a positive source coefficient k1")
    inv_beta_f0 = problem.f0 ** (-0.5 * (problem.p - 1.0))
    a = 0.5 * (problem.p + 1.0)
    b_damping = (problem.alpha + 1.0 + problem.k0) * inv_beta_f0
    b_growth = (problem.p + 1.0) * (problem.alpha + 2.0) / (problem.p - 1.0) * inv_beta_f0
    b = max(b_damping, b_growth)
    nu_quadratic = (-b + math.sqrt(b * b + 4.0 * a * problem.k1)) / (2.0 * a)
    nu_slope = problem.df0 * problem.f0 ** (-0.5 * (problem.p + 1.0))
    nu = 0.9 * min(nu_quadratic, nu_slope)
    assert nu * (a * nu + b_damping) < problem.k1
    assert nu * problem.f0 ** (0.5 * (problem.p + 1.0)) < problem.df0
    return nu


def life_span(problem: OdiProblem, nu: float) -> float:
    """Blow-up time of the comparison function for the given margin parameter.

    From d/dt G^(-(p-1)/2) = -nu*(p-1)/2 * (1+t)^(alpha+1): the inverse
    power reaches zero at

        T0 = (2*(alpha+2)/((p-1)*nu) * f0^(-(p-1)/2) + 1)^(1/(alpha+2)) - 1

    for alpha > -2, and exp(2/((p-1)*nu) * f0^(-(p-1)/2)) - 1 at alpha = -2;
    the two branches are continuous at alpha = -2.
    """
    if not nu > 0.0:
        raise ValueError(f"nu must be positive, got {nu}")
    g0 = problem.f0 ** (-0.5 * (problem.p - 1.0))
    if problem.alpha == -2.0:
        return math.exp(2.0 / ((problem.p - 1.0) * nu) * g0) - 1.0
    shift = problem.alpha + 2.0
    return (2.0 * shift / ((problem.p - 1.0) * nu) * g0 + 1.0) ** (1.0 / shift) - 1.0


def comparison_function(problem: OdiProblem, nu: float, t):
    """Closed-form comparison function on [0, life_span); increasing, unbounded.

    Separation of variables gives, with beta = (p-1)/2,

        G(t)^(-beta) = f0^(-beta) - nu*beta/(alpha+2) * ((1+t)^(alpha+2) - 1)

    for alpha > -2 and the log(1+t) limit at alpha = -2.  Raises
    ValueError("life span exceeded") at or beyond the life span.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ValueError("comparison function is defined for t >= 0")
    beta = 0.5 * (problem.p - 1.0)
    g0 = problem.f0 ** (-beta)
    if problem.alpha == -2.0:
        h = g0 - nu * beta * np.log1p(t_arr)
    else:
        shift = problem.alpha + 2.0
        h = g0 - nu * beta / shift * ((1.0 + t_arr) ** shift - 1.0)
    if np.any(h <= 0.0):
        raise ValueError("life span exceeded: comparison function has blown up")
    out = h ** (-1.0 / beta)
    return float(out) if np.ndim(t) == 0 else out


def _acceleration(problem: OdiProblem, t: float, f: float, df: float) -> float:
    try:
        source = problem.k1 * (1.0 + t) ** problem.alpha * abs(f) ** problem.p
    except OverflowError:
        # a stage value already left the float range: the step is blowing up
        source = math.inf
    return -problem.k0 / (1.0 + t) * df + source


def integrate_odi(problem: OdiProblem, dt: float, t_max: float | None = None,
                  cutoff: float = BLOWUP_CUTOFF, max_steps: int = 20_000_000):
    """Integrate the equality version F'' = -k0/(1+t) F' + k1 (1+t)^alpha |F|^p.

    Classical fixed-step RK4 from (f0, df0); stops once F exceeds the
    cutoff (numerical blow-up), t passes t_max (default 10x the life
    span for the selected margin parameter), or max_steps is hit.
    Returns (t, f, df, blowup_time) with blowup_time None if the cutoff
    was never reached.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max is None:
        t_max = 10.0 * life_span(problem, select_nu(problem))
    ts = [0.0]
    fs = [problem.f0]
    dfs = [problem.df0]
    t, f, df = 0.0, problem.f0, problem.df0
    blowup_time = None
    steps = 0
    while t < t_max and steps < max_steps:
        steps += 1
        k1f = df
        k1d = _acceleration(problem, t, f, df)
        k2f = df + 0.5 * dt * k1d
        k2d = _acceleration(problem, t + 0.5 * dt, f + 0.5 * dt * k1f, k2f)
        k3f = df + 0.5 * dt * k2d
        k3d = _acceleration(problem, t + 0.5 * dt, f + 0.5 * dt * k2f, k3f)
        k4f = df + dt * k3d
        k4d = _acceleration(problem, t + dt, f + dt * k3f, k4f)
        f = f + dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        df = df + dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        t = t + dt
        if not (math.isfinite(f) and math.isfinite(df)) or f > cutoff:
            blowup_time = t
            break
        ts.append(t)
        fs.append(f)
        dfs.append(df)
    return np.array(ts), np.array(fs), np.array(dfs), blowup_time


@dataclass
class OdiSolution:
    """Selected margin parameter, life span, and the integrated trajectory."""

    problem: OdiProblem
    nu: float
    life_span: float
    t: np.ndarray
    f: np.ndarray
    df: np.ndarray
    blowup_time: float | None

    def comparison_at(self, t):
        return comparison_function(self.problem, self.nu, t)


def solve(problem: OdiProblem, dt: float | None = None) -> OdiSolution:
    """Select the margin parameter, build the comparison data, integrate the trajectory.

    The default step resolves both the damping layer near t = 0 (absolute
    cap 1e-3) and the approach to the life span.
    """
    nu = select_nu(problem)
    t0 = life_span(problem, nu)
    if dt is None:
        dt = min(1e-3, t0 / 1e5)
    t, f, df, blowup_time = integrate_odi(problem, dt, t_max=10.0 * t0)
    return OdiSolution(problem=problem, nu=nu, life_span=t0, t=t, f=f, df=df,
                       blowup_time=blowup_time)


def comparison_check(problem: OdiProblem, dt: float | None = None,
                     rel_slack: float = 1e-6) -> CheckReport:
    """Assert F(t) >= G(t)*(1 - rel_slack) for all samples before min(blow-up, life span)."""
    sol = solve(problem, dt)
    limit = sol.life_span if sol.blowup_time is None else min(sol.blowup_time, sol.life_span)
    mask = sol.t < limit * (1.0 - 1e-12)
    g = comparison_function(problem, sol.nu, sol.t[mask])
    f = sol.f[mask]
    deficit = np.max((g - f) / np.maximum(g, 1e-300))
    notes = [
        f"nu={sol.nu:.12g}",
        f"life_span={sol.life_span:.12g}",
        "trajectory blow-up at "
        + (f"{sol.blowup_time:.12g}" if sol.blowup_time is not None else "none (horizon reached)"),
    ]
    return CheckReport(
        check_id="odi-comparison-dominance",
        n_cases=int(mask.sum()),
        worst=float(deficit),
        tolerance=rel_slack,
        passed=bool(deficit <= rel_slack),
        notes=notes,
    )
