"""Leapfrog time integration of the damped/massive semilinear wave equation.

Scheme: three-level leapfrog in time, the discrete radial Laplacian in
space, and a semi-implicit average for the damping term,

    (u+ - 2u + u-)/dt^2 + b(t)(u+ - u-)/(2 dt) + m^2(t) u
        = Lap_h u + [nonlinear] |u|^p,

solved explicitly for u+ through the scalar division by (1 + b dt/2).  The
damping and mass coefficients are evaluated at the middle level of the
stencil, which keeps the scheme second-order consistent, and the implicit
averaging of the damping keeps it stable even where b(t) = mu1/(1+t) is
large near the initial time.  The nonlinearity is the pure power |u|^p
evaluated pointwise at the current level; no inner iteration is needed.

Runs start at an arbitrary initial time s >= 0 (the clock simply starts at
t = s) and stop at T_max, on divergence, or when the sup-norm blow-up
detector fires.  One run is strictly sequential; distinct runs share no
mutable state and may execute in parallel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .functionals import (
    NormSample,
    spatial_integral,
    to_comparison_frame,
    weighted_energy,
    weighted_gradient_norm,
    weighted_l2,
)
from .grid import RadialGrid, integrate, laplacian_apply, radial_derivative
from .model import ModelParams, coefficients, discriminant

OUTCOME_COMPLETED = "completed"
OUTCOME_BLOWUP = "blowup"
OUTCOME_DIVERGED = "diverged"

#: Names of the recorded per-sample quantities, in canonical CSV order.
SAMPLE_KEYS = ("sup", "l2", "grad_l2", "ut_l2", "wl2", "wgrad_l2", "wenergy", "F")


class SupportViolationWarning(UserWarning):
    """Initial data carry non-negligible mass outside the safe radius."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one time integration needs besides the grid and the data."""

    params: ModelParams
    s: float = 0.0
    t_max: float = 10.0
    nonlinear: bool = True
    cfl_safety: float = 0.9
    # default far above any bounded-regime amplitude, far below overflow
    blowup_threshold: float = 1e8
    record_every: int = 10

    def __post_init__(self) -> None:
        if self.s < 0.0:
            raise ValueError(f"initial time must be >= 0, got {self.s}")
        if not self.t_max > self.s:
            raise ValueError(f"t_max must exceed the initial time, got {self.t_max} <= {self.s}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.blowup_threshold > 0.0:
            raise ValueError(f"blowup_threshold must be positive, got {self.blowup_threshold}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass(frozen=True, eq=False)
class WaveState:
    """Two consecutive solution levels: u_prev at t - dt, u_curr at t."""

    t: float
    dt: float
    u_prev: np.ndarray
    u_curr: np.ndarray
    step_index: int
    diverged: bool = False


@dataclass
class RunReport:
    """Time series of recorded norms plus the run outcome."""

    config: RunConfig
    samples: list
    outcome: str
    blowup_time: float | None = None

    def series(self, key: str) -> tuple[np.ndarray, np.ndarray]:
        """Return (times, values) arrays for one recorded quantity."""
        t = np.array([s.t for s in self.samples])
        v = np.array([s.values[key] for s in self.samples])
        return t, v


def cfl_dt(grid: RadialGrid, cfl_safety: float) -> float:
    """Stable time step cfl_safety * dr (the wave speed is 1)."""
    if not 0.0 < cfl_safety <= 1.0:
        raise ValueError(f"cfl_safety must lie in (0, 1], got {cfl_safety}")
    return cfl_safety * grid.dr


def num_steps(grid: RadialGrid, config: RunConfig) -> int:
    """Number of steps so that an integer count of steps lands exactly on t_max."""
    cap = cfl_dt(grid, config.cfl_safety)
    return max(1, math.ceil((config.t_max - config.s) / cap - 1e-9))


def effective_dt(grid: RadialGrid, config: RunConfig) -> float:
    """Largest dt <= cfl_dt that divides the horizon exactly."""
    return (config.t_max - config.s) / num_steps(grid, config)


def _sample_profile(profile, r: np.ndarray) -> np.ndarray:
    values = np.asarray(profile(r), dtype=float)
    if values.shape == ():
        values = np.full(r.shape, float(values))
    return values.copy()


def init_state(grid: RadialGrid, u0, u1, config: RunConfig) -> WaveState:
    """Sample the data at time s and take the second-order Taylor first step.

    ``u0`` and ``u1`` are radial profiles (callables of r).  The first level
    is u0 + dt*u1 + (dt^2/2)*(Lap u0 - b(s) u1 - m^2(s) u0 + [nl] |u0|^p).
    Data must be supported inside r_max - (t_max - s) so the Dirichlet
    cut-off never influences the solution; a violation only warns, since the
    caller may knowingly accept a graded tail.
    """
    params = config.params
    u0v = _sample_profile(u0, grid.r)
    u1v = _sample_profile(u1, grid.r)

    safe_radius = grid.r_max - (config.t_max - config.s)
    data_mass = np.abs(u0v) + np.abs(u1v)
    total = integrate(grid, data_mass)
    if total > 0.0:
        outside = np.where(grid.r > safe_radius, data_mass, 0.0)
        if integrate(grid, outside) > 1e-12 * total:
            warnings.warn(
                f"initial data carry mass beyond the safe radius {safe_radius:.3g}; "
                "the outer cut-off may contaminate the run",
                SupportViolationWarning,
                stacklevel=2,
            )

    dt = effective_dt(grid, config)
    b, m_sq = coefficients(params, config.s)
    accel = laplacian_apply(grid, u0v) - b * u1v - m_sq * u0v
    if config.nonlinear:
        accel = accel + np.abs(u0v) ** params.p
    u_first = u0v + dt * u1v + 0.5 * dt * dt * accel
    u_first[-1] = 0.0
    return WaveState(t=config.s + dt, dt=dt, u_prev=u0v, u_curr=u_first, step_index=1)


def step(state: WaveState, grid: RadialGrid, config: RunConfig) -> WaveState:
    """Advance one leapfrog step; non-finite results flag the state as diverged."""
    params = config.params
    b, m_sq = coefficients(params, state.t)
    h = 0.5 * b * state.dt
    # overflow here means the run is diverging; it is flagged below, not raised
    with np.errstate(over="ignore", invalid="ignore"):
        forcing = laplacian_apply(grid, state.u_curr) - m_sq * state.u_curr
        if config.nonlinear:
            forcing = forcing + np.abs(state.u_curr) ** params.p
        u_next = (
            2.0 * state.u_curr
            - state.u_prev
            + h * state.u_prev
            + state.dt**2 * forcing
        ) / (1.0 + h)
    u_next[-1] = 0.0
    diverged = not bool(np.isfinite(u_next).all())
    return WaveState(
        t=state.t + state.dt,
        dt=state.dt,
        u_prev=state.u_curr,
        u_curr=u_next,
        step_index=state.step_index + 1,
        diverged=diverged,
    )


def detect_blowup(state: WaveState, threshold: float) -> float | None:
    """Current time if the sup-norm exceeds the threshold or is non-finite."""
    sup = float(np.max(np.abs(state.u_curr)))
    if not math.isfinite(sup) or sup > threshold:
        return state.t
    return None


def _record(grid: RadialGrid, params: ModelParams, t: float, u: np.ndarray,
            u_t: np.ndarray, frame_ok: bool) -> NormSample:
    u_r = radial_derivative(grid, u)
    values = {
        "sup": float(np.max(np.abs(u))),
        "l2": math.sqrt(max(integrate(grid, u * u), 0.0)),
        "grad_l2": math.sqrt(max(integrate(grid, u_r * u_r), 0.0)),
        "ut_l2": math.sqrt(max(integrate(grid, u_t * u_t), 0.0)),
        "wl2": weighted_l2(grid, u, params, 1.0, t),
        "wgrad_l2": weighted_gradient_norm(grid, u_r, u_t, params, t),
        "wenergy": weighted_energy(grid, u, u_t, u_r, params, t),
        "F": spatial_integral(grid, to_comparison_frame(u, t, params)) if frame_ok else math.nan,
    }
    return NormSample(t=t, values=values)


def run(grid: RadialGrid, u0, u1, config: RunConfig) -> RunReport:
    """Integrate from s to t_max, recording norm samples along the way.

    Samples are taken every ``record_every`` steps (plus the initial and
    final levels) with the time derivative from the centered two-level
    difference.  The comparison-frame integral F is recorded as NaN when
    the discriminant is negative and the frame does not exist.
    """
    params = config.params
    state = init_state(grid, u0, u1, config)
    dt = state.dt
    steps = num_steps(grid, config)
    frame_ok = discriminant(params) >= 0.0

    samples = [_record(grid, params, config.s, state.u_prev, _sample_profile(u1, grid.r), frame_ok)]
    outcome = OUTCOME_COMPLETED
    blowup_time = None

    while True:
        final = state.step_index >= steps
        nxt = step(state, grid, config)
        if state.step_index % config.record_every == 0 or final:
            if nxt.diverged:
                u_t = (state.u_curr - state.u_prev) / dt
            else:
                u_t = (nxt.u_curr - state.u_prev) / (2.0 * dt)
            samples.append(_record(grid, params, state.t, state.u_curr, u_t, frame_ok))
        if final:
            break
        if nxt.diverged:
            outcome = OUTCOME_DIVERGED
            break
        fired = detect_blowup(nxt, config.blowup_threshold)
        if fired is not None:
            outcome = OUTCOME_BLOWUP
            blowup_time = fired
            break
        state = nxt

    return RunReport(config=config, samples=samples, outcome=outcome, blowup_time=blowup_time)
