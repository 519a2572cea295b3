import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractransport.fractional import (
    FractionalMultiplier,
    boundary_fraction,
    calibration_table,
    dealias_mask,
    drift_term,
    frac_laplacian,
    frac_laplacian_odd,
    frac_laplacian_realspace,
    laplacian_constant,
    odd_kernel_difference,
    positivity_integral,
    riesz_constant,
    riesz_potential_odd,
)
from fractransport.profiles import GaussianMixture, GaussianTerm
from fractransport.spectral import Field, Grid

# mpmath, 30 digits
C_ALPHA = {0.3: 0.187581540364524809, 0.5: 0.398942280401432678, 0.7: 0.848457384359951249}
C_BETA = {0.5: 0.199471140200716339, 1.0: 0.318309886183790672, 1.5: 0.299206710301074508}


def c_alpha_mp(a):
    a = mpmath.mpf(a)
    return mpmath.gamma((1 - a) / 2) / (2 ** a * mpmath.sqrt(mpmath.pi) * mpmath.gamma(a / 2))


def c_beta_mp(b):
    b = mpmath.mpf(b)
    return 2 ** b * mpmath.gamma((1 + b) / 2) / (mpmath.sqrt(mpmath.pi) * abs(mpmath.gamma(-b / 2)))


class TestEigenvalues:
    g = Grid(256, 2 * np.pi)

    @pytest.mark.parametrize("s", [-0.7, -0.3, 0.5, 1.0, 1.5, 2.0])
    @pytest.mark.parametrize("k", [1, 5, 40, 127])
    def test_single_mode(self, s, k):
        mode = np.sin(k * self.g.x)
        out = frac_laplacian(Field(self.g, mode), s).values
        eig = out @ mode / (mode @ mode)
        assert abs(eig / k ** s - 1) <= 1e-12

    def test_zero_mode_dropped(self):
        out = frac_laplacian(Field(self.g, np.ones(256)), -0.5)
        assert out.sup_norm() == 0.0

    def test_reject_nonzero_mean(self):
        with pytest.raises(ValueError):
            frac_laplacian(Field(self.g, 1.0 + np.sin(self.g.x)), -0.5, policy="reject_nonzero_mean")
        frac_laplacian(Field(self.g, np.sin(self.g.x)), -0.5, policy="reject_nonzero_mean")

    @pytest.mark.parametrize("s", [-1.0, 2.5])
    def test_exponent_range(self, s):
        with pytest.raises(ValueError):
            FractionalMultiplier(s, self.g)

    @given(st.floats(-0.45, 0.95), st.floats(-0.45, 0.95))
    def test_semigroup(self, s, t):
        f = Field(self.g, np.sin(3 * self.g.x) + 0.2 * np.sin(11 * self.g.x))
        lhs = frac_laplacian(frac_laplacian(f, s), t).values
        rhs = frac_laplacian(f, s + t).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-11 * max(1.0, np.max(np.abs(rhs)))

    def test_parity_preserved(self):
        f = Field(self.g, np.sin(2 * self.g.x), parity="odd")
        assert frac_laplacian(f, 0.5).parity_error("odd") < 1e-14


class TestConstants:
    @pytest.mark.parametrize("a", sorted(C_ALPHA))
    def test_riesz_constant_frozen(self, a):
        assert riesz_constant(a) == pytest.approx(C_ALPHA[a], rel=1e-9)

    @pytest.mark.parametrize("b", sorted(C_BETA))
    def test_laplacian_constant_frozen(self, b):
        assert laplacian_constant(b) == pytest.approx(C_BETA[b], rel=1e-9)

    @given(st.floats(0.05, 0.95))
    def test_riesz_constant_closed_form(self, a):
        assert riesz_constant(a) == pytest.approx(float(c_alpha_mp(a)), rel=1e-8)

    @given(st.floats(0.05, 1.95))
    def test_laplacian_constant_closed_form(self, b):
        assert laplacian_constant(b) == pytest.approx(float(c_beta_mp(b)), rel=1e-8)

    @pytest.mark.parametrize("a", [0.0, 1.0, -0.1])
    def test_riesz_domain(self, a):
        with pytest.raises(ValueError):
            riesz_constant(a)

    def test_table_skips_out_of_range(self):
        table = calibration_table([0.0, 0.5], [1.0, 2.0])
        assert set(table) == {"C_alpha[0.5]", "C_beta[1]"}


class TestKernelDifference:
    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(-1.9, -0.05))
    def test_matches_direct_when_well_separated(self, x, y, p):
        if abs(x - y) <= 0.1 * max(x, y):
            return
        direct = abs(x - y) ** p - (x + y) ** p
        got = odd_kernel_difference(x, y, p)
        assert got == pytest.approx(direct, rel=1e-10)

    def test_tiny_ratio_no_cancellation(self):
        # (1+r)^p ((1-r)/(1+r))^p - (1+r)^p ~ -2 p r for r -> 0
        r = 1e-12
        assert odd_kernel_difference(1.0, r, -0.6) == pytest.approx(1.2e-12, rel=1e-8)


class TestRealSpace:
    prof = GaussianMixture((GaussianTerm("dipole", 1.0, 1.0), GaussianTerm("pair", 0.4, 0.6, 1.5)))

    @pytest.mark.parametrize("a", [0.3, 0.6])
    def test_riesz_matches_closed_form(self, a):
        x = np.array([-1.3, 0.2, 0.9, 2.5])
        got = riesz_potential_odd(self.prof, x, a, support=12.0)
        np.testing.assert_allclose(got, self.prof.riesz(x, a), rtol=1e-8, atol=1e-12)

    @pytest.mark.parametrize("b", [0.5, 1.0, 1.5])
    def test_pv_matches_closed_form(self, b):
        x = np.array([0.3, 1.1, 2.0])
        got = frac_laplacian_realspace(self.prof, x, b, support_radius=12.0)
        np.testing.assert_allclose(got, self.prof.fractional(x, b), rtol=1e-6, atol=1e-9)

    @pytest.mark.parametrize("b", [0.4, 1.2])
    def test_odd_route_matches(self, b):
        x = np.array([-0.7, 0.5, 1.8])
        got = frac_laplacian_odd(self.prof, x, b, support=12.0)
        np.testing.assert_allclose(got, self.prof.fractional(x, b), rtol=1e-6, atol=1e-9)

    def test_pv_info(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            val, info = frac_laplacian_realspace(self.prof, 0.5, 1.0, support_radius=12.0,
                                                 return_info=True)
        assert info[0]["converging"]
        assert np.isscalar(val)

    def test_spectral_matches_line(self):
        g = Grid(2048, 80.0)
        f = Field(g, self.prof(g.x))
        inner = np.abs(g.x) < 3
        got = frac_laplacian(f, 1.2).values[inner]
        np.testing.assert_allclose(got, self.prof.fractional(g.x[inner], 1.2), atol=1e-4)


class TestDrift:
    def test_dealias_mask_count(self):
        g = Grid(96, 1.0)
        assert dealias_mask(g).sum() == 2 * 32 + 1

    def test_burgers_product(self):
        g = Grid(128, 2 * np.pi)
        f = Field(g, np.sin(g.x), parity="odd")
        out = drift_term(f, 0.0)
        np.testing.assert_allclose(out.values, np.sin(g.x) * np.cos(g.x), atol=1e-14)
        assert out.parity == "even"

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            drift_term(Field(Grid(8, 1.0), np.zeros(8)), 1.0)


class TestPositivity:
    @given(st.integers(0, 2 ** 31), st.sampled_from([2.0, 3.0, 4.0]), st.sampled_from([0.5, 1.0, 1.5]))
    def test_nonnegative(self, seed, p, b):
        rng = np.random.default_rng(seed)
        g = Grid(256, 2 * np.pi)
        k = np.arange(1, 25)
        f = Field(g, np.sin(np.outer(g.x, k) + rng.uniform(0, 6.3, k.size)) @ (rng.standard_normal(k.size) / k ** 1.5))
        norm = np.sum(np.abs(f.values) ** p) * g.spacing
        assert positivity_integral(f, p, b) / norm >= -1e-9

    def test_boundary_fraction(self):
        v = np.zeros(100)
        v[50] = 2.0
        v[1] = 0.5
        assert boundary_fraction(v) == 0.25
        assert boundary_fraction(np.zeros(10)) == 0.0
