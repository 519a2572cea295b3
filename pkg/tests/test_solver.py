import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractransport.solver import (
    InitialDataSpec,
    SimConfig,
    StepState,
    _Operators,
    adapt_dt,
    estimate_blowup_time,
    linear_kernel_check,
    run,
    step,
)
from fractransport.spectral import Field, Grid


def config(**kw):
    base = dict(alpha=0.4, beta=1.0, nu=1.0, grid=Grid(512, 40.0),
                initial_data=InitialDataSpec("odd_gaussian", 2.0, 1.0), t_end=0.5)
    base.update(kw)
    return SimConfig(**base)


def fixed_step_solution(cfg, n_steps):
    ops = _Operators(cfg)
    s = StepState(cfg.initial_data.evaluate(cfg.grid), 0.0, cfg.t_end / n_steps)
    for _ in range(n_steps):
        s = step(s, cfg, ops)
    return s.field.values


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(alpha=1.0), dict(beta=2.5), dict(nu=-1.0), dict(t_end=0.0),
                                    dict(cfl_safety=1.5), dict(output_stride=0),
                                    dict(blowup_gradient_threshold=0.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            config(**kw)

    def test_supercritical_flag(self):
        assert config(beta=0.5).supercritical
        assert not config(beta=0.6).supercritical

    def test_refined_doubles(self):
        cfg = config().refined()
        assert cfg.grid.n_points == 1024 and cfg.grid.box_length == 40.0
        assert not cfg.confirm_blowup

    def test_custom_samples(self):
        g = Grid(64, 10.0)
        data = InitialDataSpec("custom_samples", samples=tuple(np.sin(2 * np.pi * g.x / 10.0)))
        assert data.evaluate(g).parity == "odd"
        with pytest.raises(ValueError):
            config(initial_data=data, grid=g).refined()
        with pytest.raises(ValueError):
            data.evaluate(Grid(32, 10.0))

    @pytest.mark.parametrize("kw", [dict(family="cosine"), dict(width=0.0), dict(family="custom_samples")])
    def test_initial_data_rejects(self, kw):
        with pytest.raises(ValueError):
            InitialDataSpec(**kw)

    def test_default_delta_window(self):
        cfg = config(alpha=0.4, beta=0.1)
        assert 2 * cfg.alpha < cfg.delta < min(2.0, 2 * (1 - cfg.beta))


class TestStep:
    def test_zero_field_stays_zero(self):
        res = run(config(initial_data=InitialDataSpec("odd_gaussian", 0.0, 1.0)))
        assert res.verdict == "completed"
        assert np.all(res.final_field.values == 0.0)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_linear_decay_exact(self, beta):
        g = Grid(128, 2 * np.pi)
        data = InitialDataSpec("custom_samples", samples=tuple(np.sin(3 * g.x)))
        cfg = config(grid=g, initial_data=data, beta=beta, enable_drift=False, t_end=1.0)
        got = fixed_step_solution(cfg, 7)
        want = np.exp(-3.0 ** beta) * np.sin(3 * g.x)
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_fourth_order(self):
        cfg = config()
        a, b, c = (fixed_step_solution(cfg, m) for m in (20, 40, 80))
        ratio = np.max(np.abs(a - b)) / np.max(np.abs(b - c))
        assert 12 <= ratio <= 20

    def test_oddness_preserved(self):
        cfg = config()
        u = fixed_step_solution(cfg, 10)
        f = Field(cfg.grid, u)
        assert f.parity_error("odd") <= 1e-15 * f.sup_norm()

    def test_dt_must_be_positive(self):
        with pytest.raises(ValueError):
            StepState(Field(Grid(8, 1.0), np.zeros(8)), 0.0, 0.0)


class TestAdaptDt:
    cfg = config()

    def state(self, dt):
        u = self.cfg.initial_data.evaluate(self.cfg.grid)
        return StepState(u, 0.0, dt)

    @given(st.floats(1e-8, 1.0))
    def test_bounds(self, prev):
        dt = adapt_dt(self.state(prev), self.cfg)
        assert self.cfg.dt_min <= dt <= min(2 * prev, self.cfg.max_step) or dt == self.cfg.dt_min

    def test_transport_limited(self):
        ops = _Operators(self.cfg)
        vsup, dsup = ops.sups(np.fft.rfft(self.state(1.0).field.values))
        st_ = self.state(1.0)
        st_.drift_sup = dsup
        dt = adapt_dt(st_, self.cfg, vsup)
        cfl = self.cfg.cfl_safety * min(self.cfg.grid.spacing / vsup, 1.0 / dsup)
        assert dt == pytest.approx(min(cfl, self.cfg.max_step))

    def test_floor(self):
        st_ = self.state(1.0)
        st_.drift_sup = 1e30
        assert adapt_dt(st_, self.cfg, 1e30) == self.cfg.dt_min


class TestBlowupEstimate:
    def test_exact_inverse_law(self):
        t = np.linspace(0, 0.99, 100)
        assert estimate_blowup_time(t, 1.0 / (1.0 - t)) == pytest.approx(1.0, rel=1e-10)

    def test_no_growth(self):
        t = np.linspace(0, 1, 10)
        assert estimate_blowup_time(t, np.exp(-t)) == 1.0

    def test_short(self):
        assert estimate_blowup_time([0.0, 0.5], [1.0, 2.0]) == 0.5

    def test_inviscid_burgers(self):
        # with nu = 0, alpha = 0 the gradient blows up at 1 / max u0' = 1 / A
        cfg = SimConfig(0.0, 0.0, 0.0, Grid(2048, 20.0), InitialDataSpec("odd_gaussian", 2.0, 1.0),
                        t_end=2.0, blowup_gradient_threshold=40.0, output_stride=1, confirm_blowup=False)
        res = run(cfg)
        assert res.verdict == "blowup_detected"
        assert res.blowup_time_estimate == pytest.approx(0.5, rel=0.02)


class TestRun:
    def test_subcritical_laws(self):
        # n = 1024 dips to -4e-6 on x >= 0 from truncation, n = 2048 does not
        res = run(config(grid=Grid(2048, 80.0), initial_data=InitialDataSpec("odd_gaussian", 5.0, 1.0)))
        rec = res.record
        assert res.verdict == "completed"
        assert np.all(np.diff(rec.sup_norm) <= 1e-8 * rec.sup_norm[0])
        assert np.all(np.diff(rec.l1_norm) <= 1e-8 * rec.l1_norm[0])
        assert rec.min_positive_side.min() >= -1e-8 * rec.sup_norm[0]
        assert rec.times[-1] == pytest.approx(0.5)
        assert len(rec.step_times) >= len(rec)
        assert "C_alpha[0.4]" in res.calibrated_constants

    def test_snapshots(self):
        res = run(config(output_stride=5), keep_snapshots=True)
        assert len(res.snapshots) == len(res.record)
        assert res.snapshots[0][0] == 0.0

    def test_resolution_lost(self):
        cfg = SimConfig(0.0, 0.0, 0.0, Grid(1024, 20.0), InitialDataSpec("odd_gaussian", 2.0, 1.0),
                        t_end=2.0, blowup_gradient_threshold=40.0)
        assert run(cfg).verdict == "resolution_lost"

    def test_boundary_contaminated(self):
        g = Grid(256, 12.0)
        wide = InitialDataSpec("custom_samples", samples=tuple(g.x * np.exp(-(g.x / 3.0) ** 2)))
        cfg = config(grid=g, initial_data=wide)
        assert run(cfg).verdict == "boundary_contaminated"

    def test_max_steps(self):
        res = run(config(), max_steps=3)
        assert res.verdict == "completed"
        assert len(res.record.step_times) == 4


class TestLinearKernel:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_properties(self, beta):
        rep = linear_kernel_check(beta, 1.0, 1.0)
        assert rep.passed
        assert rep.mass_error <= 1e-8

    def test_poisson(self):
        rep = linear_kernel_check(1.0, 1.0, 1.0)
        c = 2 * np.pi / rep.box_length
        poisson = np.sinh(c) / (rep.box_length * (np.cosh(c) - np.cos(c * rep.x)))
        assert np.max(np.abs(rep.kernel - poisson)) <= 1e-6

    def test_gaussian(self):
        rep = linear_kernel_check(2.0, 0.5, 2.0)
        gauss = np.exp(-rep.x ** 2 / 4.0) / math.sqrt(4 * math.pi)
        assert np.max(np.abs(rep.kernel - gauss)) <= 1e-6

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, -1.0)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            linear_kernel_check(*args)
