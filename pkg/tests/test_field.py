"""Grid, field and discrete-operator tests.

Convergence oracles are analytic: the Neumann cosine eigenfunction for the
Laplacian, and hand-differentiated product-rule expressions for the
variable-coefficient flux divergence.
"""

import numpy as np
import pytest

from kemosim.errors import DegenerateDiffusionWarning, DomainError
from kemosim.field import (
    Grid,
    ScalarField,
    State,
    chemotactic_flux_divergence,
    integrate,
    laplacian_neumann,
    lp_norm,
    max_face_gradient,
)
from kemosim.motility import AlgebraicKS, Constant, Custom, Singular


def _grid1(n, L=1.0):
    return Grid(cells=(n,), lengths=(L,))


class TestGridAndFields:
    def test_spacing_and_volumes(self):
        g = Grid(cells=(10, 20), lengths=(2.0, 3.0))
        assert g.spacing == (0.2, 0.15)
        assert g.cell_volume == pytest.approx(0.03)
        assert g.volume == pytest.approx(6.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            Grid(cells=(3,), lengths=(1.0,))
        with pytest.raises(DomainError):
            Grid(cells=(8, 8, 8), lengths=(1.0, 1.0, 1.0))
        with pytest.raises(DomainError):
            Grid(cells=(8,), lengths=(-1.0,))
        with pytest.raises(DomainError):
            ScalarField(_grid1(8), np.zeros(9))
        with pytest.raises(DomainError):
            State(ScalarField.full(_grid1(8), 1.0),
                  ScalarField.full(_grid1(16), 1.0))

    def test_centers(self):
        g = _grid1(4, 2.0)
        assert np.allclose(g.centers(0), [0.25, 0.75, 1.25, 1.75])


class TestLaplacian:
    def test_constant_field_maps_to_zero(self):
        f = ScalarField.full(Grid(cells=(12, 9), lengths=(1.0, 2.0)), 3.7)
        out = laplacian_neumann(f)
        assert np.all(out.values == 0.0)

    def test_cosine_eigenfunction_second_order(self):
        # f = cos(pi x / L) satisfies the Neumann condition; Lap f = -(pi/L)^2 f
        L = 1.0
        errors = []
        for n in (32, 64, 128, 256):
            g = _grid1(n, L)
            x = g.centers(0)
            f = ScalarField(g, np.cos(np.pi * x / L))
            exact = -((np.pi / L) ** 2) * np.cos(np.pi * x / L)
            errors.append(np.max(np.abs(laplacian_neumann(f).values - exact)))
        orders = np.log2(np.asarray(errors[:-1]) / np.asarray(errors[1:]))
        assert np.all(orders >= 1.9)

    def test_cosine_eigenfunction_2d(self):
        g = Grid(cells=(64, 48), lengths=(1.0, 1.5))
        X, Y = g.meshes()
        f = ScalarField(g, np.cos(np.pi * X) * np.cos(2 * np.pi * Y / 1.5))
        exact = -(np.pi**2 + (2 * np.pi / 1.5) ** 2) * f.values
        err = np.max(np.abs(laplacian_neumann(f).values - exact))
        assert err < 0.05 * np.max(np.abs(exact))

    @pytest.mark.parametrize("cells,lengths", [((64,), (1.0,)),
                                               ((24, 40), (2.0, 0.7))])
    def test_output_integrates_to_zero(self, cells, lengths):
        rng = np.random.default_rng(5)
        g = Grid(cells=cells, lengths=lengths)
        f = ScalarField(g, rng.uniform(-1, 1, cells))
        out = laplacian_neumann(f)
        total = abs(np.sum(out.values)) * g.cell_volume
        scale = np.sum(np.abs(out.values)) * g.cell_volume
        assert total <= 1e-13 * scale

    def test_reflection_symmetry(self):
        rng = np.random.default_rng(6)
        g = _grid1(32)
        vals = rng.uniform(0, 1, 32)
        a = laplacian_neumann(ScalarField(g, vals[::-1].copy())).values
        b = laplacian_neumann(ScalarField(g, vals)).values[::-1]
        assert np.array_equal(a, b)


class TestFluxDivergence:
    def test_constant_state_maps_to_zero(self):
        g = Grid(cells=(8, 8), lengths=(1.0, 1.0))
        st = State(ScalarField.full(g, 2.0), ScalarField.full(g, 3.0))
        out = chemotactic_flux_divergence(st, Singular(chi=0.5))
        assert np.all(out.values == 0.0)

    def test_heat_limit_equals_laplacian(self):
        rng = np.random.default_rng(8)
        g = Grid(cells=(16, 16), lengths=(1.0, 1.0))
        u = ScalarField(g, rng.uniform(0.1, 2.0, (16, 16)))
        v = ScalarField(g, rng.uniform(0.5, 2.0, (16, 16)))
        out = chemotactic_flux_divergence(State(u, v), Constant(gamma0=1, phi0=0))
        assert np.array_equal(out.values, laplacian_neumann(u).values)

    @pytest.mark.parametrize("cells,lengths", [((64,), (1.0,)),
                                               ((24, 40), (2.0, 0.7))])
    def test_conservation_on_random_fields(self, cells, lengths):
        rng = np.random.default_rng(9)
        g = Grid(cells=cells, lengths=lengths)
        st = State(ScalarField(g, rng.uniform(0, 2, cells)),
                   ScalarField(g, rng.uniform(0.5, 2, cells)))
        out = chemotactic_flux_divergence(st, Singular(chi=0.8))
        total = abs(np.sum(out.values)) * g.cell_volume
        scale = np.sum(np.abs(out.values)) * g.cell_volume
        assert total <= 1e-13 * scale

    def test_diffusive_part_second_order(self):
        # gamma(v) = 1/v with phi = 0 via a dense table;
        # exact divergence: d/dx (u'/v) = u''/v - u'v'/v^2
        L = 1.0
        c = np.pi / L
        vt = np.linspace(1.4, 2.6, 4000)
        fam = Custom(vt, 1.0 / vt, np.zeros_like(vt))
        errors = []
        for n in (64, 128, 256):
            g = _grid1(n, L)
            x = g.centers(0)
            u = 2.0 + np.cos(c * x)
            v = 2.0 + 0.5 * np.cos(c * x)
            up = -c * np.sin(c * x)
            upp = -c * c * np.cos(c * x)
            vp = -0.5 * c * np.sin(c * x)
            exact = upp / v - up * vp / v**2
            st = State(ScalarField(g, u), ScalarField(g, v))
            out = chemotactic_flux_divergence(st, fam)
            errors.append(np.max(np.abs(out.values - exact)))
        orders = np.log2(np.asarray(errors[:-1]) / np.asarray(errors[1:]))
        assert np.all(orders >= 1.9)

    def test_advective_part_first_order(self):
        # isolate the drift term with gamma=1, phi=1:
        # Lap u - flux_div = div(u grad v), exact (u v')' = u'v' + u v''
        L = 1.0
        c = np.pi / L
        fam = Constant(gamma0=1.0, phi0=1.0)
        errors = []
        for n in (64, 128, 256):
            g = _grid1(n, L)
            x = g.centers(0)
            u = 2.0 + np.cos(c * x)
            v = 2.0 + 0.5 * np.cos(c * x)
            up = -c * np.sin(c * x)
            upp = -c * c * np.cos(c * x)
            vp = -0.5 * c * np.sin(c * x)
            vpp = -0.5 * c * c * np.cos(c * x)
            exact = up * vp + u * vpp
            uf = ScalarField(g, u)
            st = State(uf, ScalarField(g, v))
            adv = laplacian_neumann(uf).values \
                - chemotactic_flux_divergence(st, fam).values
            errors.append(np.max(np.abs(adv - exact)))
        orders = np.log2(np.asarray(errors[:-1]) / np.asarray(errors[1:]))
        assert np.all(errors[:-1] > errors[1:])
        assert np.all((orders >= 0.7) & (orders <= 1.6))

    def test_reflection_symmetry_2d(self):
        rng = np.random.default_rng(10)
        g = Grid(cells=(12, 10), lengths=(1.0, 1.0))
        u = rng.uniform(0.1, 2.0, (12, 10))
        v = rng.uniform(0.5, 2.0, (12, 10))
        fam = Singular(chi=0.7)
        base = chemotactic_flux_divergence(
            State(ScalarField(g, u), ScalarField(g, v)), fam).values
        for ax in (0, 1):
            flipped = chemotactic_flux_divergence(
                State(ScalarField(g, np.flip(u, ax).copy()),
                      ScalarField(g, np.flip(v, ax).copy())), fam).values
            assert np.array_equal(flipped, np.flip(base, ax))

    def test_degenerate_diffusion_warning(self):
        g = _grid1(8)
        st = State(ScalarField.full(g, 1.0),
                   ScalarField(g, np.linspace(50.0, 60.0, 8)))
        fam = AlgebraicKS(sigma=1, lam=1, alpha=0.5)  # gamma ~ 0.02
        with pytest.warns(DegenerateDiffusionWarning):
            chemotactic_flux_divergence(st, fam, gamma_floor=0.5)


class TestIntegralsAndNorms:
    def test_constant_on_unit_domain(self):
        assert integrate(ScalarField.full(_grid1(10), 4.2)) == pytest.approx(4.2, rel=1e-14)

    def test_constant_on_rectangle(self):
        g = Grid(cells=(8, 6), lengths=(2.0, 3.0))
        assert integrate(ScalarField.full(g, 2.0)) == pytest.approx(12.0, rel=1e-14)

    def test_full_period_cosine_cancels(self):
        g = _grid1(128, 2.0)
        x = g.centers(0)
        f = ScalarField(g, np.cos(2 * np.pi * x / 2.0))
        assert abs(integrate(f)) <= 1e-12

    def test_lp_norm_examples(self):
        g = _grid1(10)
        assert lp_norm(ScalarField.full(g, 1.0), 3.0) == pytest.approx(1.0, rel=1e-14)
        assert lp_norm(ScalarField.full(g, 3.0), np.inf) == 3.0
        # same arithmetic as a two-cell (0, 2) field with h = 0.5:
        # (sum |f|^2 * cellvol)^(1/2) = (4 * 0.5)^(1/2)
        g4 = _grid1(4)
        f = ScalarField(g4, np.array([0.0, 2.0, 2.0, 0.0]))
        assert lp_norm(f, 2.0) == pytest.approx(np.sqrt(2.0), rel=1e-14)

    def test_lp_norm_rejects_small_p(self):
        with pytest.raises(DomainError):
            lp_norm(ScalarField.full(_grid1(8), 1.0), 0.5)

    def test_max_face_gradient(self):
        g = _grid1(4)
        f = ScalarField(g, np.array([0.0, 1.0, 1.0, 3.0]))
        # spacing 0.25: steepest face jump is 2 / 0.25
        assert max_face_gradient(f) == pytest.approx(8.0, rel=1e-14)
        assert max_face_gradient(ScalarField.full(g, 5.0)) == 0.0
