"""Structural audits: positivity/nonnegativity checks, the infimum of the
condition ratio F over a v-range, closed-form thresholds for algebraic
families, and selection of a uniform exponent pair (p, q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .motility import (
    QInterval,
    eval_F,
    eval_gamma,
    eval_phi,
    structural_coefficients,
)

__all__ = ["AuditReport", "ExponentChoice", "audit", "algebraic_threshold",
           "choose_exponents"]

#: number of dyadic refinement passes around running minima in sign scans
REFINEMENT_LEVELS = 2

#: absolute log-v tolerance of the golden-section refinement
_GOLDEN_TOL = 1e-12


@dataclass(frozen=True)
class AuditReport:
    """Outcome of auditing a motility pair over [v_min, v_max].

    ``h1_ok``: gamma > 0 at every sampled point.
    ``h2_ok``: phi >= 0 at every sampled point.
    ``inf_F``: estimated infimum of the condition ratio (may be +inf when the
    condition is vacuous everywhere).
    ``inf_F_location``: v at which the estimate was attained; when
    ``tail_limited`` the minimum sits at the scan's upper end and the true
    infimum may only be approached as v grows.
    ``h3_margin``: inf_F - n_dim/2; ``h3_ok`` iff it is > 0.
    """

    h1_ok: bool
    h2_ok: bool
    inf_F: float
    inf_F_location: float
    tail_limited: bool
    h3_ok: bool
    h3_margin: float
    scan_range: tuple
    refinement_levels: int

    def as_dict(self):
        return {
            "h1_ok": self.h1_ok,
            "h2_ok": self.h2_ok,
            "inf_F": self.inf_F,
            "inf_F_location": self.inf_F_location,
            "tail_limited": self.tail_limited,
            "h3_ok": self.h3_ok,
            "h3_margin": self.h3_margin,
            "scan_range": list(self.scan_range),
            "refinement_levels": self.refinement_levels,
        }


@dataclass(frozen=True)
class ExponentChoice:
    """A uniform (p, q) for the weighted functional, valid over a v-range.

    When ``feasible``, q lies in the intersection over all scanned v of the
    per-v admissible intervals, so the growth quadratic is negative at every
    scanned point.
    """

    p: float
    q: float
    feasible: bool
    interval_used: QInterval


def _golden_min(f, a, b, tol=_GOLDEN_TOL, max_iter=200):
    """Golden-section minimum of f on [a, b] using comparisons only.

    Tolerates +inf values of f (no parabolic fits).  Returns (x, f(x)).
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _refine_min_samples(values_fn, grid, levels):
    """Dyadic refinement around the running minimum of values_fn on grid.

    Inserts geometric midpoints of the intervals adjacent to the current
    minimizer, re-evaluates, and repeats.  Returns the final (grid, values).
    """
    g = np.asarray(grid, dtype=float)
    vals = values_fn(g)
    for _ in range(levels):
        i = int(np.argmin(vals))
        new_pts = []
        if i > 0:
            new_pts.append(math.sqrt(g[i - 1] * g[i]))
        if i < len(g) - 1:
            new_pts.append(math.sqrt(g[i] * g[i + 1]))
        if not new_pts:
            break
        g = np.sort(np.concatenate([g, new_pts]))
        vals = values_fn(g)
    return g, vals


def audit(fam, params, v_min, v_max, grid_points=1024):
    """Audit the structural hypotheses for a family over [v_min, v_max].

    Sign checks for gamma and phi run on a log-spaced grid with
    ``REFINEMENT_LEVELS`` dyadic refinements around the running minimum; the
    infimum of F is the grid minimum sharpened by a golden-section search in
    log-v around the grid minimizer.  A NegativeMotility error propagates if
    gamma <= 0 anywhere sampled.
    """
    if not (0 < v_min < v_max):
        raise DomainError(f"need 0 < v_min < v_max, got ({v_min}, {v_max})")
    if grid_points < 64:
        raise DomainError(f"grid_points must be >= 64, got {grid_points}")

    vgrid = np.geomspace(v_min, v_max, int(grid_points))

    # H1/H2 sign sampling (eval_gamma raises NegativeMotility on gamma <= 0)
    _, gvals = _refine_min_samples(lambda g: eval_gamma(fam, g), vgrid,
                                   REFINEMENT_LEVELS)
    h1_ok = bool(np.all(gvals > 0))
    _, pvals = _refine_min_samples(lambda g: np.asarray(eval_phi(fam, g)),
                                   vgrid, REFINEMENT_LEVELS)
    h2_ok = bool(np.all(pvals >= 0))

    Fv = np.asarray(eval_F(fam, params, vgrid))
    i_min = int(np.argmin(Fv))
    best_v, best_F = float(vgrid[i_min]), float(Fv[i_min])

    if math.isfinite(best_F):
        lo = vgrid[max(i_min - 1, 0)]
        hi = vgrid[min(i_min + 1, len(vgrid) - 1)]
        if hi > lo:
            s, Fs = _golden_min(
                lambda t: float(eval_F(fam, params, math.exp(t))),
                math.log(lo), math.log(hi))
            if Fs < best_F:
                best_v, best_F = math.exp(s), Fs

    tail_limited = i_min == len(vgrid) - 1
    margin = best_F - 0.5 * params.n_dim
    return AuditReport(
        h1_ok=h1_ok,
        h2_ok=h2_ok,
        inf_F=best_F,
        inf_F_location=best_v,
        tail_limited=tail_limited,
        h3_ok=bool(best_F > 0.5 * params.n_dim),
        h3_margin=margin,
        scan_range=(float(v_min), float(v_max)),
        refinement_levels=REFINEMENT_LEVELS,
    )


def algebraic_threshold(sigma, lam, alpha, d, eta, n_dim):
    """Closed-form inf F for the algebraic family gamma = sigma / v**lam,
    phi = (alpha-1)*gamma', restricted to v >= eta.

    With mu = lam*(1-alpha):
      mu > 1 :  inf F = d / (mu * ((mu-1)*sigma/eta**lam + d))   (min at v = eta)
      mu <= 1:  inf F = 1 / mu                                   (tail limit)

    Returns (inf_F_closed, bounded_claim) where the claim is inf_F > n_dim/2.
    """
    if not (sigma > 0 and lam > 0 and d > 0 and eta > 0):
        raise DomainError("sigma, lam, d, eta must all be positive")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if n_dim not in (1, 2, 3, 4):
        raise DomainError(f"n_dim must be one of 1..4, got {n_dim}")
    mu = lam * (1.0 - alpha)
    if mu > 1.0:
        inf_closed = d / (mu * ((mu - 1.0) * sigma / eta**lam + d))
    else:
        inf_closed = 1.0 / mu
    return inf_closed, bool(inf_closed > 0.5 * n_dim)


def choose_exponents(fam, params, v_min, v_max, grid_points=1024):
    """Pick a uniform exponent pair (p, q) for the weighted functional.

    p sits halfway between n_dim/2 and the audited inf F, capped at
    n_dim/2 + 0.25.  q is the midpoint of the intersection over the scanned
    v-grid of the per-v admissible intervals,
    (sup_v 2C/B, inf_v B/(2A)] ∩ (0, min{n_dim/2, p}).
    Infeasibility (empty intersection, or B <= 0 somewhere) is a result,
    not an error.
    """
    report = audit(fam, params, v_min, v_max, grid_points)
    margin = report.h3_margin
    half_n = 0.5 * params.n_dim
    if margin > 0 and params.n_dim >= 2:
        p = half_n + min(0.25, 0.5 * margin)
    else:
        # rule above presumes a passed audit and N >= 2; keep p usable (> 1)
        p = max(1.0, half_n) + 0.25

    vgrid = np.geomspace(v_min, v_max, int(grid_points))
    g = np.asarray(eval_gamma(fam, vgrid))
    pb = vgrid * np.asarray(fam.phi_values(vgrid))
    A, B, C = structural_coefficients(g, pb, params.d, p)

    cap = min(half_n, p)
    if np.any(B <= 0):
        interval = QInterval(0.0, 0.0, True, "nonpositive-B")
        return ExponentChoice(p=p, q=float("nan"), feasible=False,
                              interval_used=interval)
    lo = float(np.max(2.0 * C / B))
    hi = float(min(np.min(B / (2.0 * A)), cap))
    if lo >= hi or hi <= 0:
        interval = QInterval(lo, hi, True, "void-intersection")
        return ExponentChoice(p=p, q=float("nan"), feasible=False,
                              interval_used=interval)
    interval = QInterval(lo, hi, False)
    return ExponentChoice(p=p, q=interval.midpoint, feasible=True,
                          interval_used=interval)
