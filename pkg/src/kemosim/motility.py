"""Signal-dependent motility pairs and the structural algebra built on them.

A motility pair is a diffusivity ``gamma(v) > 0`` together with a chemotactic
sensitivity ``phi(v) >= 0``.  Everything the boundedness analysis needs is a
pointwise function of ``gamma``, ``phi_bar = v*phi(v)`` and the chemical
diffusion rate ``d``:

* the condition ratio ``F(v) = d*gamma / (phi_bar * (phi_bar + d - gamma)_+)``
  whose infimum is compared against ``N/2``,
* the quadratic coefficients ``A, B, C`` in the exponent variable ``q``,
* four comparison functions ``gamma_1..gamma_4`` equivalent to the sign
  conditions on ``A, B, C``,
* the growth quadratic ``g(p; q, v)`` with the exact identity
  ``4*(p-1)*gamma*g = A*q**2 - B*q + C``,
* the admissible exponent interval ``(2C/B, B/(2A)] ∩ (0, min{N/2, p})``.

All evaluators accept scalars or numpy arrays of ``v`` and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NegativeMotility

__all__ = [
    "ModelParams",
    "MotilityFamily",
    "Constant",
    "Singular",
    "AlgebraicKS",
    "Custom",
    "QInterval",
    "eval_gamma",
    "eval_phi",
    "phi_bar",
    "eval_F",
    "coeff_ABC",
    "gamma_comparators",
    "eval_g",
    "q_interval",
    "condition_ratio",
    "structural_coefficients",
    "comparator_gammas",
    "growth_quadratic",
    "admissible_interval",
]


@dataclass(frozen=True)
class ModelParams:
    """Chemical diffusivity, ambient dimension and domain extents.

    ``n_dim`` enters the thresholds as N/2 and may be 1..4; actual simulation
    grids are restricted to 1 or 2 dimensions elsewhere.
    """

    d: float
    n_dim: int
    lengths: tuple = (1.0,)

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError(f"chemical diffusivity d must be > 0, got {self.d}")
        if self.n_dim not in (1, 2, 3, 4):
            raise DomainError(f"n_dim must be one of 1..4, got {self.n_dim}")
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        if any(L <= 0 for L in self.lengths):
            raise DomainError(f"domain lengths must be positive, got {self.lengths}")


# ---------------------------------------------------------------------------
# motility families


class MotilityFamily:
    """Base class: a (gamma, phi) pair evaluable on v >= 0.

    Subclasses set ``singular_at_zero`` when phi (or gamma) has no finite
    value at v = 0; evaluation there raises DomainError and range scans must
    start at some v_min > 0.
    """

    singular_at_zero = False

    def gamma_values(self, v):
        raise NotImplementedError

    def phi_values(self, v):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(MotilityFamily):
    """gamma == gamma0 > 0, phi == phi0 >= 0 (minimal-model limit)."""

    gamma0: float
    phi0: float = 0.0

    def __post_init__(self):
        if not self.gamma0 > 0:
            raise DomainError(f"gamma0 must be > 0, got {self.gamma0}")
        if self.phi0 < 0:
            raise DomainError(f"phi0 must be >= 0, got {self.phi0}")

    def gamma_values(self, v):
        return np.full_like(np.asarray(v, dtype=float), self.gamma0)

    def phi_values(self, v):
        return np.full_like(np.asarray(v, dtype=float), self.phi0)


@dataclass(frozen=True)
class Singular(MotilityFamily):
    """gamma == 1, phi = chi / v (logarithmic-sensitivity model)."""

    chi: float

    singular_at_zero = True

    def __post_init__(self):
        if not self.chi > 0:
            raise DomainError(f"chi must be > 0, got {self.chi}")

    def gamma_values(self, v):
        return np.ones_like(np.asarray(v, dtype=float))

    def phi_values(self, v):
        return self.chi / np.asarray(v, dtype=float)


@dataclass(frozen=True)
class AlgebraicKS(MotilityFamily):
    """gamma = sigma / v**lam with phi = (alpha - 1) * gamma'.

    With alpha in (0, 1) the proportionality gives
    phi(v) = (1 - alpha) * lam * sigma * v**(-lam - 1) >= 0 automatically.
    """

    sigma: float
    lam: float
    alpha: float

    singular_at_zero = True

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not self.lam > 0:
            raise DomainError(f"lam must be > 0, got {self.lam}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    def gamma_values(self, v):
        return self.sigma * np.asarray(v, dtype=float) ** (-self.lam)

    def phi_values(self, v):
        return (1.0 - self.alpha) * self.lam * self.sigma \
            * np.asarray(v, dtype=float) ** (-self.lam - 1.0)


class Custom(MotilityFamily):
    """User-tabulated gamma and phi, monotone-cubic (PCHIP) interpolated.

    Evaluation outside the tabulated v-range extrapolates with the constant
    endpoint values.  PCHIP does not overshoot the data, so a strictly
    positive gamma table stays strictly positive after interpolation.
    """

    def __init__(self, v_table, gamma_table, phi_table):
        v_table = np.asarray(v_table, dtype=float)
        gamma_table = np.asarray(gamma_table, dtype=float)
        phi_table = np.asarray(phi_table, dtype=float)
        if v_table.ndim != 1 or len(v_table) < 2:
            raise DomainError("Custom family needs at least 2 tabulated v points")
        if np.any(np.diff(v_table) <= 0):
            raise DomainError("Custom v table must be strictly increasing")
        if v_table[0] < 0:
            raise DomainError("Custom v table must be nonnegative")
        if gamma_table.shape != v_table.shape or phi_table.shape != v_table.shape:
            raise DomainError("Custom tables must have matching shapes")
        if np.any(gamma_table <= 0):
            raise NegativeMotility("Custom gamma table contains values <= 0")
        self.v_table = v_table
        self._gamma = PchipInterpolator(v_table, gamma_table, extrapolate=False)
        self._phi = PchipInterpolator(v_table, phi_table, extrapolate=False)

    def _clamp(self, v):
        # constant extrapolation beyond the table
        return np.clip(np.asarray(v, dtype=float), self.v_table[0], self.v_table[-1])

    def gamma_values(self, v):
        g = np.asarray(self._gamma(self._clamp(v)), dtype=float)
        if np.any(g <= 0):
            raise NegativeMotility("interpolated gamma <= 0")
        return g

    def phi_values(self, v):
        return np.asarray(self._phi(self._clamp(v)), dtype=float)


def _as_v(fam, v, positive=False):
    """Validate and coerce a v argument; returns (array, was_scalar)."""
    arr = np.asarray(v, dtype=float)
    scalar = arr.ndim == 0
    if np.any(arr < 0):
        raise DomainError("v must be nonnegative")
    if positive or fam.singular_at_zero:
        if np.any(arr == 0):
            if fam.singular_at_zero:
                raise DomainError(
                    f"{type(fam).__name__} is singular at v=0; evaluate at v > 0")
            raise DomainError("v must be strictly positive here")
    return arr, scalar


def _ret(x, scalar):
    return float(x) if scalar else x


# ---------------------------------------------------------------------------
# pointwise evaluators on families


def eval_gamma(fam, v):
    """Diffusivity gamma(v) > 0; raises NegativeMotility if not positive."""
    arr, scalar = _as_v(fam, v)
    g = fam.gamma_values(arr)
    if np.any(g <= 0):
        raise NegativeMotility(f"gamma(v) <= 0 at v={arr[g <= 0][:3]}")
    return _ret(g, scalar)


def eval_phi(fam, v):
    """Chemotactic sensitivity phi(v)."""
    arr, scalar = _as_v(fam, v)
    return _ret(fam.phi_values(arr), scalar)


def phi_bar(fam, v):
    """The combination v * phi(v) that every structural condition uses."""
    arr, scalar = _as_v(fam, v)
    return _ret(arr * fam.phi_values(arr), scalar)


def condition_ratio(gamma, pbar, d):
    """F = d*gamma / (pbar * (pbar + d - gamma)_+) from raw point values.

    Returns +inf where the positive part (or pbar) vanishes: the infimum
    condition is vacuous at such points.
    """
    gamma = np.asarray(gamma, dtype=float)
    pbar = np.asarray(pbar, dtype=float)
    pos = np.maximum(pbar + d - gamma, 0.0)
    den = pbar * pos
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, d * gamma / np.where(den > 0, den, 1.0), np.inf)
    return out


def eval_F(fam, params, v):
    """Condition ratio F(v) for a family; +inf where vacuous."""
    arr, scalar = _as_v(fam, v, positive=True)
    g = eval_gamma(fam, arr)
    pb = arr * fam.phi_values(arr)
    return _ret(condition_ratio(g, pb, params.d), scalar)


# ---------------------------------------------------------------------------
# structural algebra on raw (gamma, phi_bar) values


def structural_coefficients(gamma, pbar, d, p):
    """Quadratic coefficients (A, B, C) in the exponent q.

    A = 4*gamma*d + p*gamma**2 + p*d**2 - 2*d*p*gamma   (= 4*gamma*d + p*(gamma-d)**2 > 0)
    B = 2*(p-1) * (2*gamma*d + p*pbar*(gamma - d))
    C = p*(p-1)**2 * pbar**2                            (>= 0)
    """
    if not np.all(np.asarray(p) > 1):
        raise DomainError(f"p must be > 1, got {p}")
    gamma = np.asarray(gamma, dtype=float)
    pbar = np.asarray(pbar, dtype=float)
    A = 4.0 * gamma * d + p * gamma**2 + p * d**2 - 2.0 * d * p * gamma
    B = 2.0 * (p - 1.0) * (2.0 * gamma * d + p * pbar * (gamma - d))
    C = p * (p - 1.0) ** 2 * pbar**2
    return A, B, C


def comparator_gammas(pbar, d, p, n_dim):
    """The four comparison functions of phi_bar against which gamma is tested.

    gamma > gamma_1  <=>  B**2 - 4*A*C > 0      (interval endpoints ordered)
    gamma > gamma_2  <=>  B > 0
    gamma > gamma_3  <=>  2*C/B < N/2
    gamma > gamma_4  <=>  2*C/B < p
    """
    pbar = np.asarray(pbar, dtype=float)
    g1 = p * pbar * (d + pbar) / (d + p * pbar)
    g2 = p * pbar * d / (2.0 * d + p * pbar)
    g3 = p * pbar * (2.0 * (p - 1.0) * pbar + d * n_dim) / (n_dim * (2.0 * d + p * pbar))
    g4 = pbar * ((p - 1.0) * pbar + p * d) / (2.0 * d + p * pbar)
    return g1, g2, g3, g4


def growth_quadratic(gamma, pbar, d, p, q):
    """g(p; q, v) = p/(4(p-1)) * ((p-1)*pbar + q*gamma + d*q)**2/gamma
    - d*q*(q+1) - p*q*pbar.

    Satisfies 4*(p-1)*gamma*g == A*q**2 - B*q + C exactly; a negative value is
    what lets the weighted functional's gradient terms be discarded.
    """
    if not np.all(np.asarray(p) > 1):
        raise DomainError(f"p must be > 1, got {p}")
    gamma = np.asarray(gamma, dtype=float)
    pbar = np.asarray(pbar, dtype=float)
    lin = (p - 1.0) * pbar + q * gamma + d * q
    return p / (4.0 * (p - 1.0)) * lin**2 / gamma - d * q * (q + 1.0) - p * q * pbar


@dataclass(frozen=True)
class QInterval:
    """The admissible exponent range (lower, upper] ∩ (0, min{N/2, p}).

    ``empty`` is equivalent to lower >= upper or upper <= 0; ``reason``
    distinguishes a nonpositive B (no admissible q at all) from a void
    intersection.
    """

    lower: float
    upper: float
    empty: bool
    reason: str | None = None

    def contains(self, q):
        return (not self.empty) and self.lower < q <= self.upper

    @property
    def midpoint(self):
        if self.empty:
            raise DomainError("empty interval has no midpoint")
        return 0.5 * (self.lower + self.upper)


def admissible_interval(gamma, pbar, d, p, n_dim):
    """Admissible q interval from raw scalar point values (gamma, pbar)."""
    A, B, C = structural_coefficients(gamma, pbar, d, p)
    cap = min(0.5 * n_dim, p)
    if B <= 0:
        return QInterval(0.0, 0.0, True, "nonpositive-B")
    lo = 2.0 * C / B
    hi = min(B / (2.0 * A), cap)
    if lo >= hi or hi <= 0:
        return QInterval(lo, hi, True, "void-intersection")
    return QInterval(lo, hi, False)


# ---------------------------------------------------------------------------
# family-level wrappers


def coeff_ABC(fam, params, p, v):
    """(A, B, C) for a family at signal level v."""
    arr, scalar = _as_v(fam, v, positive=True)
    g = eval_gamma(fam, arr)
    pb = arr * fam.phi_values(arr)
    A, B, C = structural_coefficients(g, pb, params.d, p)
    return _ret(A, scalar), _ret(B, scalar), _ret(C, scalar)


def gamma_comparators(fam, params, p, v):
    """(gamma_1, gamma_2, gamma_3, gamma_4) for a family at v."""
    if not np.all(np.asarray(p) > 1):
        raise DomainError(f"p must be > 1, got {p}")
    arr, scalar = _as_v(fam, v, positive=True)
    pb = arr * fam.phi_values(arr)
    g1, g2, g3, g4 = comparator_gammas(pb, params.d, p, params.n_dim)
    return _ret(g1, scalar), _ret(g2, scalar), _ret(g3, scalar), _ret(g4, scalar)


def eval_g(fam, params, p, q, v):
    """g(p; q, v) for a family at v."""
    arr, scalar = _as_v(fam, v, positive=True)
    g = eval_gamma(fam, arr)
    pb = arr * fam.phi_values(arr)
    return _ret(growth_quadratic(g, pb, params.d, p, q), scalar)


def q_interval(fam, params, p, v):
    """Admissible q interval for a family at a single signal level v."""
    arr, _ = _as_v(fam, np.asarray(v, dtype=float), positive=True)
    if arr.ndim != 0:
        raise DomainError("q_interval expects a scalar v")
    g = eval_gamma(fam, float(arr))
    pb = float(arr) * float(fam.phi_values(arr))
    return admissible_interval(g, pb, params.d, p, params.n_dim)
