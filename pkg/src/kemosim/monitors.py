"""Time-series monitoring: conserved quantities, norms, the weighted
functional, and discrete residuals of the two evolution relations it obeys.

Residuals compare a two-point finite-difference time derivative (at the
sampling cadence, not per step) against the trapezoid average of the
right-hand side on the two sampled states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .field import integrate, lp_norm, max_face_gradient
from .motility import eval_gamma, eval_phi

__all__ = ["MonitorConfig", "MonitorRecord", "Monitor", "weighted_functional",
           "inequality_residual", "evolution_identity_residual", "sample",
           "trend_bounded", "growth_trend"]


@dataclass(frozen=True)
class MonitorConfig:
    """What to track: weighted-functional exponents (p, q), the L^p list,
    and the (p_tilde, q_tilde) pair for the evolution-identity residual."""

    p: float
    q: float
    lp_list: tuple = (1.0, 2.0, 4.0)
    identity_p: float = 2.0
    identity_q: float = 1.0

    def __post_init__(self):
        if not 1.0 <= self.identity_p <= 4.0:
            raise DomainError("identity_p restricted to [1, 4]")
        if not -2.0 <= self.identity_q <= 2.0:
            raise DomainError("identity_q restricted to [-2, 2]")


@dataclass
class MonitorRecord:
    """One time sample of every tracked quantity.

    Residual fields are NaN on the first sample of a run (they need a
    predecessor).
    """

    t: float
    mass_u: float
    int_v: float
    min_v: float
    min_gamma: float
    sup_u: float
    sup_grad_v: float
    lp_u: tuple
    W: float
    ineq_residual: float = float("nan")
    identity_residual: float = float("nan")


def weighted_functional(state, p, q):
    """Integral of u**p * v**(-q); requires v > 0 cellwise."""
    v = state.v.values
    if np.any(v <= 0):
        raise DomainError("weighted functional needs v > 0 cellwise")
    vals = state.u.values ** p * v ** (-q)
    return float(np.sum(vals)) * state.grid.cell_volume


def inequality_residual(prev, state, p, q):
    """Residual of d/dt W <= q*W - q*Int(u**(p+1) v**(-q-1)).

    ``prev`` supplies (t, W) of the previous sample.  The residual is the
    forward-difference derivative minus the right-hand side evaluated on the
    newer state; nonpositive up to discretization error when the structural
    hypotheses hold.
    """
    dt = state.t - prev.t
    if dt <= 0:
        raise DomainError(f"need increasing sample times, got dt={dt}")
    w_now = weighted_functional(state, p, q)
    sink = weighted_functional(state, p + 1.0, q + 1.0)
    return (w_now - prev.W) / dt - (q * w_now - q * sink)


def _centered_gradients(vals, spacing):
    """Centered difference per axis with mirror ghosts (Neumann-consistent)."""
    grads = []
    for ax, h in enumerate(spacing):
        padded = np.pad(vals, [(1, 1) if k == ax else (0, 0)
                               for k in range(vals.ndim)], mode="edge")
        ls = [slice(None)] * vals.ndim
        rs = [slice(None)] * vals.ndim
        ls[ax] = slice(None, -2)
        rs[ax] = slice(2, None)
        grads.append((padded[tuple(rs)] - padded[tuple(ls)]) / (2.0 * h))
    return grads


def _identity_rhs(state, p_t, q_t, fam, params):
    """Quadrature of the four right-hand-side integrals of the evolution
    identity for Int(u**p_t * v**q_t)."""
    grid = state.grid
    u = state.u.values
    v = state.v.values
    gu = _centered_gradients(u, grid.spacing)
    gv = _centered_gradients(v, grid.spacing)
    grad_u_sq = sum(g * g for g in gu)
    grad_v_sq = sum(g * g for g in gv)
    grad_uv = sum(a * b for a, b in zip(gu, gv))

    gam = np.asarray(eval_gamma(fam, v))
    pbar = v * np.asarray(eval_phi(fam, v))
    d = params.d

    total = np.zeros_like(u)
    if p_t * (p_t - 1.0) != 0.0:
        total += -p_t * (p_t - 1.0) * u ** (p_t - 2.0) * v**q_t * gam * grad_u_sq
    coef2 = p_t * q_t * pbar - d * q_t * (q_t - 1.0)
    if q_t != 0.0:
        total += u**p_t * v ** (q_t - 2.0) * coef2 * grad_v_sq
    # cross term carries v**(q_t - 1): the I1/I2 expansion fixes the exponent
    coef3 = (p_t - 1.0) * pbar - q_t * gam - d * q_t
    total += p_t * u ** (p_t - 1.0) * v ** (q_t - 1.0) * coef3 * grad_uv
    if q_t != 0.0:
        total += q_t * u**p_t * v ** (q_t - 1.0) * (u - v)
    return float(np.sum(total)) * grid.cell_volume


def evolution_identity_residual(state1, state2, p_t, q_t, fam, params):
    """Residual of the exact evolution identity for Int(u**p_t * v**q_t).

    Finite-difference time derivative between two sampled states minus the
    trapezoid average of the right-hand-side quadrature; converges to 0
    under simultaneous (h, dt) refinement on smooth runs.
    """
    if np.any(state1.v.values <= 0) or np.any(state2.v.values <= 0):
        raise DomainError("identity residual needs v > 0 cellwise")
    dt = state2.t - state1.t
    if dt <= 0:
        raise DomainError(f"need increasing sample times, got dt={dt}")

    def functional(s):
        return float(np.sum(s.u.values ** p_t * s.v.values ** q_t)) \
            * s.grid.cell_volume

    dIdt = (functional(state2) - functional(state1)) / dt
    rhs_avg = 0.5 * (_identity_rhs(state1, p_t, q_t, fam, params)
                     + _identity_rhs(state2, p_t, q_t, fam, params))
    return dIdt - rhs_avg


def sample(state, config, fam, params, prev_state=None, prev_record=None):
    """Assemble a MonitorRecord for one state.

    Residual fields are filled when the previous sample (record and state)
    is supplied.
    """
    v = state.v.values
    gam = np.asarray(eval_gamma(fam, v))
    rec = MonitorRecord(
        t=state.t,
        mass_u=integrate(state.u),
        int_v=integrate(state.v),
        min_v=float(np.min(v)),
        min_gamma=float(np.min(gam)),
        sup_u=float(np.max(np.abs(state.u.values))),
        sup_grad_v=max_face_gradient(state.v),
        lp_u=tuple(lp_norm(state.u, p) for p in config.lp_list),
        W=weighted_functional(state, config.p, config.q),
    )
    if prev_record is not None:
        rec.ineq_residual = inequality_residual(prev_record, state,
                                                config.p, config.q)
    if prev_state is not None:
        rec.identity_residual = evolution_identity_residual(
            prev_state, state, config.identity_p, config.identity_q,
            fam, params)
    return rec


class Monitor:
    """Stateful sampling hook for stepper.run: collects MonitorRecords."""

    def __init__(self, fam, params, config):
        self.fam = fam
        self.params = params
        self.config = config
        self.records = []
        self._prev_state = None

    def __call__(self, state):
        prev_record = self.records[-1] if self.records else None
        rec = sample(state, self.config, self.fam, self.params,
                     prev_state=self._prev_state, prev_record=prev_record)
        self.records.append(rec)
        self._prev_state = state
        return rec

    def series(self, name):
        """Column of a record field across all samples."""
        return np.asarray([getattr(r, name) for r in self.records])


def trend_bounded(values, head_frac=0.1, factor=2.0):
    """Windowed no-growth check: the series max never exceeds ``factor``
    times the max over its leading ``head_frac`` fraction."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise DomainError("empty series")
    head = vals[: max(1, int(round(head_frac * vals.size)))]
    return bool(np.max(vals) <= factor * np.max(head))


def growth_trend(values, frac=0.1, factor=2.0):
    """Classify a series as 'growing' (tail-window max exceeds ``factor``
    times the head-window max) or 'bounded'."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise DomainError("empty series")
    n = max(1, int(round(frac * vals.size)))
    return "growing" if np.max(vals[-n:]) > factor * np.max(vals[:n]) else "bounded"
