"""Monitoring tests: weighted functional, residuals of the two evolution
relations, record assembly and trend classification."""

import numpy as np
import pytest

from kemosim.errors import DomainError
from kemosim.field import Grid, ScalarField, State
from kemosim.monitors import (
    Monitor,
    MonitorConfig,
    growth_trend,
    evolution_identity_residual,
    inequality_residual,
    sample,
    trend_bounded,
    weighted_functional,
)
from kemosim.motility import AlgebraicKS, Constant, ModelParams, Singular
from kemosim.stepper import StepControl, run

G8 = Grid(cells=(8,), lengths=(1.0,))
MP1 = ModelParams(d=1.0, n_dim=1, lengths=(1.0,))
FAM = Singular(chi=0.5)


def _const_state(u_val, v_val, t=0.0, grid=G8):
    return State(ScalarField.full(grid, u_val), ScalarField.full(grid, v_val), t)


class TestWeightedFunctional:
    def test_unit_state(self):
        assert weighted_functional(_const_state(1, 1), 2.7, 0.3) == pytest.approx(1.0, rel=1e-14)

    def test_frozen_values(self):
        assert weighted_functional(_const_state(2, 1), 2.0, 1.0) == pytest.approx(4.0, rel=1e-14)
        assert weighted_functional(_const_state(1, 4), 2.0, 0.5) == pytest.approx(0.5, rel=1e-14)

    def test_requires_positive_v(self):
        st = _const_state(1, 1)
        st.v.values[3] = 0.0
        with pytest.raises(DomainError):
            weighted_functional(st, 2.0, 1.0)


class TestInequalityResidual:
    def test_steady_state_exact_zero(self):
        cfg = MonitorConfig(p=1.5, q=0.25)
        s1 = _const_state(1, 1, t=0.0)
        rec = sample(s1, cfg, FAM, MP1)
        s2 = _const_state(1, 1, t=0.5)
        assert inequality_residual(rec, s2, cfg.p, cfg.q) == 0.0

    def test_rejects_nonpositive_dt(self):
        cfg = MonitorConfig(p=1.5, q=0.25)
        rec = sample(_const_state(1, 1, t=1.0), cfg, FAM, MP1)
        with pytest.raises(DomainError):
            inequality_residual(rec, _const_state(1, 1, t=1.0), 1.5, 0.25)

    def test_heat_limit_smooth_run_within_tolerance(self):
        # diffusion-only family: the weighted functional obeys the decay
        # inequality up to discretization error
        grid = Grid(cells=(32,), lengths=(2.0,))
        mp = ModelParams(d=1.0, n_dim=1, lengths=(2.0,))
        fam = Constant(gamma0=1.0, phi0=0.0)
        x = grid.centers(0)
        st = State(ScalarField(grid, 1.0 + 0.5 * np.cos(np.pi * x / 2.0)),
                   ScalarField.full(grid, 1.0))
        mon = Monitor(fam, mp, MonitorConfig(p=1.25, q=0.1))
        run(st, fam, mp, StepControl(), horizon=2.0,
            monitor_hook=mon, sample_every=0.1)
        res = mon.series("ineq_residual")[1:]
        h = 2.0 / 32
        tol = 10.0 * (h * h + 0.1) * np.max(mon.series("W"))
        assert np.all(res <= tol)


class TestIdentityResidual:
    def test_steady_state_exact_zero(self):
        s1 = _const_state(1, 1, t=0.0)
        s2 = _const_state(1, 1, t=0.5)
        assert evolution_identity_residual(s1, s2, 2.0, 1.0, FAM, MP1) == 0.0

    def test_reduces_to_mass_conservation(self):
        # exponents (1, 0) collapse every right-hand-side term
        grid = Grid(cells=(64,), lengths=(2.0,))
        mp = ModelParams(d=1.0, n_dim=1, lengths=(2.0,))
        x = grid.centers(0)
        st = State(ScalarField(grid, 1.0 + 0.5 * np.cos(np.pi * x / 2.0)),
                   ScalarField.full(grid, 1.0))
        s1 = run(st, FAM, mp, StepControl(), horizon=0.2).final_state
        s2 = run(s1, FAM, mp, StepControl(), horizon=0.3).final_state
        assert abs(evolution_identity_residual(s1, s2, 1.0, 0.0, FAM, mp)) <= 1e-12

    def _residual(self, n, dt_samp):
        grid = Grid(cells=(n,), lengths=(2.0,))
        mp = ModelParams(d=1.0, n_dim=1, lengths=(2.0,))
        x = grid.centers(0)
        st = State(ScalarField(grid, 1.0 + 0.5 * np.cos(np.pi * x / 2.0)),
                   ScalarField(grid, 1.0 + 0.25 * np.cos(np.pi * x / 2.0)))
        s1 = run(st, FAM, mp, StepControl(), horizon=0.5).final_state
        s2 = run(s1, FAM, mp, StepControl(), horizon=0.5 + dt_samp).final_state
        return evolution_identity_residual(s1, s2, 2.0, 1.0, FAM, mp)

    def test_refinement_reduces_residual(self):
        coarse = abs(self._residual(32, 0.1))
        fine = abs(self._residual(64, 0.05))
        assert coarse / fine >= 1.8

    def test_exponent_restrictions(self):
        with pytest.raises(DomainError):
            MonitorConfig(p=1.5, q=0.2, identity_p=5.0)
        with pytest.raises(DomainError):
            MonitorConfig(p=1.5, q=0.2, identity_q=3.0)


class TestSample:
    def test_steady_record(self):
        cfg = MonitorConfig(p=2.0, q=0.5)
        rec = sample(_const_state(1, 1), cfg, FAM, MP1)
        assert rec.mass_u == pytest.approx(1.0, rel=1e-14)
        assert rec.int_v == pytest.approx(1.0, rel=1e-14)
        assert rec.min_v == 1.0
        assert rec.sup_u == 1.0
        assert rec.sup_grad_v == 0.0
        assert rec.W == pytest.approx(1.0, rel=1e-14)
        assert np.isnan(rec.ineq_residual)

    def test_imbalanced_record(self):
        cfg = MonitorConfig(p=2.0, q=1.0)
        rec = sample(_const_state(2, 1), cfg, FAM, MP1)
        assert rec.mass_u == pytest.approx(2.0, rel=1e-14)
        assert rec.int_v == pytest.approx(1.0, rel=1e-14)

    def test_min_gamma_tracks_field_maximum(self):
        fam = AlgebraicKS(sigma=1, lam=1, alpha=0.5)
        grid = Grid(cells=(4,), lengths=(1.0,))
        st = State(ScalarField.full(grid, 1.0),
                   ScalarField(grid, np.array([1.0, 2.0, 4.0, 0.5])))
        rec = sample(st, MonitorConfig(p=1.5, q=0.2), fam, MP1)
        assert rec.min_gamma == pytest.approx(0.25, rel=1e-14)

    def test_lp_columns_follow_config(self):
        cfg = MonitorConfig(p=2.0, q=0.5, lp_list=(1.0, 3.0, np.inf))
        rec = sample(_const_state(2, 1), cfg, FAM, MP1)
        assert rec.lp_u == pytest.approx((2.0, 2.0, 2.0))


class TestMonitorLoop:
    def test_run_series_invariants(self):
        grid = Grid(cells=(16, 16), lengths=(1.0, 1.0))
        mp = ModelParams(d=1.0, n_dim=2, lengths=(1.0, 1.0))
        X, Y = grid.meshes()
        u0 = 1.0 + 2.0 * np.exp(-((X - 0.5) ** 2 + (Y - 0.5) ** 2) / 0.02)
        st = State(ScalarField(grid, u0), ScalarField.full(grid, 1.0))
        mon = Monitor(FAM, mp, MonitorConfig(p=1.25, q=0.08))
        run(st, FAM, mp, StepControl(), horizon=0.5,
            monitor_hook=mon, sample_every=0.05)
        mass = mon.series("mass_u")
        assert np.all(np.abs(mass - mass[0]) <= 1e-12 * mass[0])
        assert np.all(mon.series("min_v") > 0)
        assert np.all(mon.series("W") >= 0)
        assert np.isnan(mon.records[0].identity_residual)
        assert np.all(np.isfinite(mon.series("identity_residual")[1:]))


class TestTrends:
    def test_trend_bounded(self):
        assert trend_bounded(np.linspace(5, 1, 100))
        assert trend_bounded(np.full(50, 2.0))
        assert not trend_bounded(np.linspace(1, 5, 100))

    def test_growth_trend_labels(self):
        assert growth_trend(np.linspace(1, 5, 100)) == "growing"
        assert growth_trend(np.linspace(5, 1, 100)) == "bounded"
        assert growth_trend(np.full(40, 3.0)) == "bounded"
