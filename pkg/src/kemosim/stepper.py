"""Explicit time integration of the coupled system with an adaptive stability
restriction, positivity guards and heuristic blow-up detection.

The update is Heun's method in strong-stability-preserving form: the new
state is the average of the old state and two chained forward-Euler stages,
so any positivity the Euler step preserves under the CFL bound survives the
full update.  Mass of u is conserved to rounding because the flux divergence
integrates to zero exactly.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PositivityLost
from .field import (
    ScalarField,
    State,
    chemotactic_flux_divergence,
    laplacian_neumann,
    max_face_drift_speed,
)
from .motility import eval_gamma

__all__ = ["StepControl", "RunStatus", "RunOutcome", "rhs", "stable_dt",
           "euler_step", "step", "run"]

#: relative tolerance below which negative u values count as rounding noise
_NEG_U_RTOL = 1e-12

#: consecutive sup-norm samples consulted by the blow-up heuristic
_GROWTH_WINDOW = 100


@dataclass(frozen=True)
class StepControl:
    """Stability, positivity and blow-up thresholds for a run."""

    cfl_safety: float = 0.4
    dt_min: float = 1e-12
    dt_max: float = 0.25
    u_blowup_threshold: float = 1e8
    v_floor: float = 1e-12
    max_halvings: int = 20

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise DomainError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if not 0 < self.dt_min < self.dt_max:
            raise DomainError(
                f"need 0 < dt_min < dt_max, got ({self.dt_min}, {self.dt_max})")
        if self.u_blowup_threshold <= 0 or self.v_floor <= 0:
            raise DomainError("thresholds must be positive")
        if self.max_halvings < 1:
            raise DomainError("max_halvings must be >= 1")


class RunStatus(enum.Enum):
    COMPLETED = "Completed"
    BLOWUP_SUSPECTED = "BlowUpSuspected"
    DT_UNDERFLOW = "DtUnderflow"
    POSITIVITY_LOST = "PositivityLost"


@dataclass
class RunOutcome:
    status: RunStatus
    final_state: State
    steps_taken: int


def rhs(state, fam, params):
    """Right-hand sides (du/dt, dv/dt) of the coupled system."""
    du = chemotactic_flux_divergence(state, fam)
    dv_vals = (params.d * laplacian_neumann(state.v).values
               + state.u.values - state.v.values)
    return du, ScalarField(state.grid, dv_vals)


def _dt_unclamped(state, fam, params, ctrl):
    h = min(state.grid.spacing)
    gamma_max = float(np.max(np.asarray(eval_gamma(fam, state.v.values))))
    diffusive = h * h / (2.0 * state.grid.n_dim * max(gamma_max, params.d))
    speed = max_face_drift_speed(state, fam)
    advective = h / speed if speed > 0 else math.inf
    return ctrl.cfl_safety * min(diffusive, advective, ctrl.dt_max)


def stable_dt(state, fam, params, ctrl):
    """Adaptive step size: safety factor times the tightest of the diffusive
    CFL bound h^2/(2*n_dim*max(gamma_max, d)), the drift bound
    h/max|phi(v) grad v|, and dt_max; clamped below by dt_min."""
    return max(_dt_unclamped(state, fam, params, ctrl), ctrl.dt_min)


def euler_step(state, fam, params, dt):
    """One forward-Euler stage (building block of the Heun update)."""
    du, dv = rhs(state, fam, params)
    return State(
        ScalarField(state.grid, state.u.values + dt * du.values),
        ScalarField(state.grid, state.v.values + dt * dv.values),
        state.t + dt,
    )


def step(state, fam, params, ctrl, dt_limit=None):
    """Advance one Heun step with positivity retries.

    The step size comes from stable_dt (optionally capped by ``dt_limit``,
    used to land exactly on a horizon).  If the updated u dips below
    -1e-12*||u||_inf the step is retried with half the dt, up to
    ``ctrl.max_halvings`` times; smaller negatives are clamped to 0.
    Raises PositivityLost when retries are exhausted or v falls below
    ``ctrl.v_floor``.
    """
    dt = stable_dt(state, fam, params, ctrl)
    if dt_limit is not None:
        dt = min(dt, dt_limit)
    for _ in range(ctrl.max_halvings + 1):
        stage1 = euler_step(state, fam, params, dt)
        if float(np.min(stage1.v.values)) <= 0.0:
            dt *= 0.5
            continue
        stage2 = euler_step(stage1, fam, params, dt)
        new_u = 0.5 * (state.u.values + stage2.u.values)
        new_v = 0.5 * (state.v.values + stage2.v.values)

        u_min = float(np.min(new_u))
        tol = _NEG_U_RTOL * float(np.max(np.abs(new_u)))
        if u_min < -tol:
            dt *= 0.5
            continue
        if u_min < 0.0:
            new_u = np.maximum(new_u, 0.0)
        if float(np.min(new_v)) < ctrl.v_floor:
            raise PositivityLost(
                f"min v = {float(np.min(new_v)):.3e} below floor {ctrl.v_floor:.3e}")
        return State(ScalarField(state.grid, new_u),
                     ScalarField(state.grid, new_v), state.t + dt)
    raise PositivityLost(
        f"u stayed negative after {ctrl.max_halvings} dt halvings")


def _monotone_growth(history):
    if len(history) < _GROWTH_WINDOW:
        return False
    vals = list(history)
    return all(b >= a for a, b in zip(vals, vals[1:])) and vals[-1] > vals[0]


def run(initial, fam, params, ctrl, horizon, monitor_hook=None,
        sample_every=None):
    """Advance ``initial`` until ``horizon`` or a failure status.

    ``monitor_hook(state)`` is invoked on the initial state, then each time
    the run crosses a multiple of ``sample_every``, and on the final state
    (with ``sample_every=None`` only on the initial and final states).

    Blow-up is suspected, never certified: the status flips when
    ||u||_inf exceeds the configured threshold, or when the stability bound
    collapses below dt_min while ||u||_inf has grown monotonically over the
    last 100 steps.  A collapse without that growth is reported as
    DtUnderflow.
    """
    if not horizon > initial.t:
        raise DomainError(f"horizon {horizon} must exceed initial t {initial.t}")
    if sample_every is not None and sample_every <= 0:
        raise DomainError(f"sample_every must be positive, got {sample_every}")

    state = initial
    steps = 0
    sup_hist = deque(maxlen=_GROWTH_WINDOW)
    sup_u = float(np.max(np.abs(state.u.values)))
    sup_hist.append(sup_u)

    last_sampled_t = None

    def _sample(s):
        nonlocal last_sampled_t
        if monitor_hook is not None and s.t != last_sampled_t:
            monitor_hook(s)
            last_sampled_t = s.t

    _sample(state)
    next_sample = (state.t + sample_every) if sample_every else None

    if sup_u > ctrl.u_blowup_threshold:
        return RunOutcome(RunStatus.BLOWUP_SUSPECTED, state, steps)

    while state.t < horizon * (1.0 - 1e-14):
        raw_dt = _dt_unclamped(state, fam, params, ctrl)
        if raw_dt < ctrl.dt_min:
            status = (RunStatus.BLOWUP_SUSPECTED if _monotone_growth(sup_hist)
                      else RunStatus.DT_UNDERFLOW)
            _sample(state)
            return RunOutcome(status, state, steps)
        try:
            state = step(state, fam, params, ctrl, dt_limit=horizon - state.t)
        except PositivityLost:
            return RunOutcome(RunStatus.POSITIVITY_LOST, state, steps)
        steps += 1

        sup_u = float(np.max(np.abs(state.u.values)))
        sup_hist.append(sup_u)
        if sup_u > ctrl.u_blowup_threshold:
            _sample(state)
            return RunOutcome(RunStatus.BLOWUP_SUSPECTED, state, steps)

        if next_sample is not None:
            while state.t >= next_sample * (1.0 - 1e-14):
                _sample(state)
                next_sample += sample_every

    _sample(state)
    return RunOutcome(RunStatus.COMPLETED, state, steps)
