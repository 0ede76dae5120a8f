"""Uniform cell-centered grids with homogeneous Neumann boundaries and the
conservative discrete operators of the coupled system.

Both spatial operators are assembled from face fluxes with zero flux on
boundary faces, so their discrete integrals telescope to zero and cell mass
is conserved exactly.  Boundary handling is the mirror-ghost convention
(ghost value = adjacent interior value), which is the zero-normal-flux
condition for a cell-centered grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDiffusionWarning, DomainError
from .motility import eval_gamma, eval_phi

__all__ = ["Grid", "ScalarField", "State", "laplacian_neumann",
           "chemotactic_flux_divergence", "integrate", "lp_norm",
           "max_face_gradient", "max_face_drift_speed"]


@dataclass(frozen=True)
class Grid:
    """Uniform 1D/2D grid: ``cells`` per axis covering ``lengths`` extents."""

    cells: tuple
    lengths: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        if len(self.cells) not in (1, 2):
            raise DomainError("grids are 1D or 2D only")
        if len(self.cells) != len(self.lengths):
            raise DomainError("cells and lengths must have the same rank")
        if any(n < 4 for n in self.cells):
            raise DomainError(f"need >= 4 cells per axis, got {self.cells}")
        if any(L <= 0 for L in self.lengths):
            raise DomainError(f"lengths must be positive, got {self.lengths}")

    @property
    def n_dim(self):
        return len(self.cells)

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.lengths, self.cells))

    @property
    def cell_volume(self):
        vol = 1.0
        for h in self.spacing:
            vol *= h
        return vol

    @property
    def volume(self):
        vol = 1.0
        for L in self.lengths:
            vol *= L
        return vol

    def centers(self, axis):
        """Cell-center coordinates along one axis."""
        h = self.spacing[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def meshes(self):
        """Cell-center coordinate arrays, broadcast to the grid shape."""
        axes = [self.centers(k) for k in range(self.n_dim)]
        if self.n_dim == 1:
            return (axes[0],)
        return np.meshgrid(*axes, indexing="ij")


@dataclass
class ScalarField:
    """Cell-centered scalar values on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.cells:
            raise DomainError(
                f"values shape {self.values.shape} != grid cells {self.grid.cells}")

    @classmethod
    def full(cls, grid, value):
        return cls(grid, np.full(grid.cells, float(value)))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, np.asarray(fn(*grid.meshes()), dtype=float))

    def copy(self):
        return ScalarField(self.grid, self.values.copy())


@dataclass
class State:
    """Cell density u, signal v and current time on a shared grid."""

    u: ScalarField
    v: ScalarField
    t: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise DomainError("u and v must share one grid")

    @property
    def grid(self):
        return self.u.grid


def _div_from_face_fluxes(flux, axis, h):
    """Divergence contribution of one axis' interior-face fluxes.

    ``flux`` has one fewer entry than cells along ``axis``; boundary faces
    carry zero flux, so the cellwise difference telescopes exactly.
    """
    pad = [(0, 0)] * flux.ndim
    pad[axis] = (1, 1)
    padded = np.pad(flux, pad)  # zero boundary-face flux
    return np.diff(padded, axis=axis) / h


def laplacian_neumann(f):
    """Second-order conservative Laplacian with zero-flux boundaries."""
    vals = f.values
    out = np.zeros_like(vals)
    for ax, h in enumerate(f.grid.spacing):
        flux = np.diff(vals, axis=ax) / h
        out += _div_from_face_fluxes(flux, ax, h)
    return ScalarField(f.grid, out)


def _axis_slices(ndim, axis):
    left = [slice(None)] * ndim
    right = [slice(None)] * ndim
    left[axis] = slice(None, -1)
    right[axis] = slice(1, None)
    return tuple(left), tuple(right)


def chemotactic_flux_divergence(state, fam, gamma_floor=0.0):
    """div(gamma(v) grad u - u phi(v) grad v) on the cells.

    Face diffusivity/sensitivity are arithmetic means of the adjacent cell
    values; the drift term upwinds u on the face velocity phi(v)*grad v.
    Boundary faces carry zero flux, so the output integrates to zero.

    Emits DegenerateDiffusionWarning if any face diffusivity drops below
    ``gamma_floor`` (0 disables the check).
    """
    grid = state.grid
    u = state.u.values
    v = state.v.values
    gam = np.asarray(eval_gamma(fam, v))
    ph = np.asarray(eval_phi(fam, v))

    out = np.zeros_like(u)
    for ax, h in enumerate(grid.spacing):
        ls, rs = _axis_slices(u.ndim, ax)
        g_face = 0.5 * (gam[ls] + gam[rs])
        if gamma_floor > 0.0 and np.min(g_face) < gamma_floor:
            warnings.warn(
                f"min face gamma {np.min(g_face):.3e} < floor {gamma_floor:.3e}",
                DegenerateDiffusionWarning, stacklevel=2)
        ph_face = 0.5 * (ph[ls] + ph[rs])
        du = (u[rs] - u[ls]) / h
        dv = (v[rs] - v[ls]) / h
        w = ph_face * dv                       # drift velocity at the face
        u_up = np.where(w > 0, u[ls], u[rs])   # donor cell
        flux = g_face * du - u_up * w
        out += _div_from_face_fluxes(flux, ax, h)
    return ScalarField(grid, out)


def integrate(f):
    """Midpoint-rule integral: cell sum times cell volume."""
    return float(np.sum(f.values)) * f.grid.cell_volume


def lp_norm(f, p):
    """Discrete L^p norm; p = numpy.inf gives the max norm."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise DomainError(f"p must be >= 1 or inf, got {p}")
    return float(np.sum(np.abs(f.values) ** p) * f.grid.cell_volume) ** (1.0 / p)


def max_face_gradient(f):
    """Largest |difference quotient| over interior faces (all axes)."""
    vals = f.values
    best = 0.0
    for ax, h in enumerate(f.grid.spacing):
        d = np.abs(np.diff(vals, axis=ax)) / h
        if d.size:
            best = max(best, float(np.max(d)))
    return best


def max_face_drift_speed(state, fam):
    """Largest face drift speed |phi(v) * grad v| (all axes)."""
    grid = state.grid
    v = state.v.values
    ph = np.asarray(eval_phi(fam, v))
    best = 0.0
    for ax, h in enumerate(grid.spacing):
        ls, rs = _axis_slices(v.ndim, ax)
        w = 0.5 * (ph[ls] + ph[rs]) * (v[rs] - v[ls]) / h
        if w.size:
            best = max(best, float(np.max(np.abs(w))))
    return best
