import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LN_2PIE, LN_PIE, gaussian_entropy
from cventangle.checks import check_axis, random_mixture_density, random_wavefunction
from cventangle.entropy import (bbm_sum, common_axis, component_marginal, convolve, discrete_shannon,
                                ensemble_density, epi_gap, marginal_pm, mixture, product_pm, resample,
                                shannon)
from cventangle.errors import AxisError, ProbError
from cventangle.grid import Axis, Dist1D, gaussian_density, integrate, normalize, reflect
from cventangle.states import MixedEnsemble, build_gaussian_product, gaussian_wavefunction, to_momentum_2d, to_pm


def uniform(lo, hi, n=4097, pad=0.0):
    ax = Axis(lo - pad, hi + pad, n)
    x = ax.points
    return normalize(Dist1D(ax, ((x >= lo - 1e-12) & (x <= hi + 1e-12)).astype(float)))


class TestDiscrete:
    @pytest.mark.parametrize("p,expected", [([1.0], 0.0), ([0.5, 0.5], math.log(2)),
                                            ([0.25] * 4, math.log(4)), ([0.0, 1.0], 0.0)])
    def test_values(self, p, expected):
        assert discrete_shannon(p) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("p", [[0.5, 0.6], [-0.1, 1.1], [], [[0.5, 0.5]], [math.nan, 1.0]])
    def test_invalid(self, p):
        with pytest.raises(ProbError):
            discrete_shannon(p)


class TestShannon:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_gaussian(self, sigma):
        ax = Axis.symmetric(16 * sigma, 4097)
        assert shannon(gaussian_density(ax, sigma)) == pytest.approx(gaussian_entropy(sigma), abs=1e-6)

    @pytest.mark.parametrize("width", [1.0, 2.0, 0.5])
    def test_uniform(self, width):
        d = Dist1D(Axis(0.0, width, 1025), np.full(1025, 1 / width))
        assert shannon(d) == pytest.approx(math.log(width), abs=1e-12)

    def test_not_normalized(self, axis):
        with pytest.raises(ProbError):
            shannon(Dist1D(axis, 2 * gaussian_density(axis, 1.0).values))

    def test_zero_density_region(self):
        d = uniform(0.0, 1.0, n=2049, pad=1.0)
        assert shannon(d) == pytest.approx(0.0, abs=2e-3)

    @pytest.mark.parametrize("a", [0.5, 2.0, 5.0])
    def test_scaling(self, a):
        ax = Axis.symmetric(60.0, 8193)
        def f(x):
            return np.exp(-(x - 1) ** 2) + 0.5 * np.exp(-(x + 1.5) ** 2 / 0.5)

        base = normalize(Dist1D(ax, f(ax.points)))
        scaled = normalize(Dist1D(ax, f(ax.points / a) / a))
        assert shannon(scaled) - shannon(base) == pytest.approx(math.log(a), abs=1e-6)

    def test_translation(self, axis):
        d = normalize(Dist1D(axis, np.exp(-np.abs(axis.points) ** 3)))
        shift = 200 * axis.step
        moved = normalize(Dist1D(axis, np.exp(-np.abs(axis.points - shift) ** 3)))
        assert shannon(moved) == pytest.approx(shannon(d), abs=1e-8)

    def test_reflection(self, axis):
        x = axis.points
        d = normalize(Dist1D(axis, np.exp(-(x - 1) ** 2) + 0.4 * np.exp(-(x + 2) ** 2 / 0.3)))
        assert abs(shannon(reflect(d)) - shannon(d)) < 1e-10


class TestMarginals:
    def test_product_sum_variance(self):
        st_ = build_gaussian_product(1.0, 1.0, axis=Axis.symmetric(12.0, 513))
        d = st_.joint().amplitude.density()
        for sign in "+-":
            m = marginal_pm(d, sign)
            assert integrate(m) == pytest.approx(1.0, abs=1e-12)
            assert m.variance() == pytest.approx(2.0, abs=1e-6)

    def test_tmsv(self, tmsv_half):
        d = tmsv_half.amplitude.density()
        assert marginal_pm(d, "-").variance() == pytest.approx(math.exp(-1), rel=1e-9)
        assert marginal_pm(d, "+").variance() == pytest.approx(math.e, rel=1e-9)

    def test_pm_coordinates_agree(self, tmsv_half):
        d = tmsv_half.amplitude.density()
        via_pm = to_pm(tmsv_half).amplitude.density()
        for sign in "+-":
            assert shannon(marginal_pm(via_pm, sign)) == pytest.approx(shannon(marginal_pm(d, sign)), abs=1e-8)

    def test_momentum_marginals(self, tmsv_half):
        v = to_momentum_2d(tmsv_half).amplitude.density()
        assert shannon(marginal_pm(v, "+")) == pytest.approx(0.5 * LN_2PIE - 0.5, abs=1e-8)

    def test_product_matches_convolution(self):
        st_ = build_gaussian_product(0.8, 1.3, centers=(0.5, -1.0), axis=Axis.symmetric(14.0, 513))
        joint = st_.joint().amplitude.density()
        w1, w2 = st_.psi1.density(), st_.psi2.density()
        for sign in "+-":
            diag = marginal_pm(joint, sign)
            conv = product_pm(w1, w2, sign)
            np.testing.assert_allclose(diag.axis.points, conv.axis.points, atol=1e-12)
            assert np.max(np.abs(diag.values - conv.values)) < 1e-8

    def test_bad_sign(self, tmsv_half):
        with pytest.raises(ValueError):
            marginal_pm(tmsv_half.amplitude.density(), "x")


class TestConvolve:
    def test_gaussians(self):
        ax = Axis.symmetric(12.0, 2049)
        c = convolve(gaussian_density(ax, 1.0), gaussian_density(ax, 1.0))
        assert integrate(c) == pytest.approx(1.0, abs=1e-12)
        assert c.variance() == pytest.approx(2.0, abs=1e-8)
        assert c.axis.min == pytest.approx(-24.0)

    def test_mollifier(self):
        ax = Axis.symmetric(10.0, 40001)
        f = gaussian_density(ax, 1.0)
        c = convolve(normalize(gaussian_density(ax, 1e-3)), f)
        inner = resample(c, ax)
        assert np.max(np.abs(inner.values - f.values)) < 1e-4

    def test_step_mismatch(self):
        with pytest.raises(AxisError):
            convolve(gaussian_density(Axis.symmetric(5, 101), 1.0), gaussian_density(Axis.symmetric(5, 201), 1.0))


class TestEpi:
    def test_gaussian_saturation(self):
        ax = Axis.symmetric(20.0, 4097)
        assert abs(epi_gap(gaussian_density(ax, 1.0), gaussian_density(ax, 1.7))) < 1e-5

    def test_uniforms(self):
        u = uniform(0.0, 1.0, n=4097, pad=0.5)
        assert epi_gap(u, u) > 0

    def test_gaussian_uniform(self):
        ax = Axis(-10.0, 10.0, 8001)
        x = ax.points
        u = normalize(Dist1D(ax, ((x >= 0) & (x <= 1)).astype(float)))
        assert epi_gap(gaussian_density(ax, 1.0), u) > 0


class TestBbm:
    @pytest.mark.parametrize("sigma", [1.0, 2.0, 0.5])
    def test_saturation(self, sigma):
        ax = Axis.symmetric(max(14 * sigma, 6 * math.pi * sigma), 4097)
        assert bbm_sum(gaussian_wavefunction(ax, sigma).normalized()) == pytest.approx(LN_PIE, abs=1e-6)

    def test_cat_state_exceeds(self):
        ax = Axis.symmetric(30.0, 4097)
        psi = gaussian_wavefunction(ax, 1.0, 3.0).values + gaussian_wavefunction(ax, 1.0, -3.0).values
        from cventangle.grid import Field1D

        assert bbm_sum(Field1D(ax, psi).normalized()) > LN_PIE + 0.1


class TestMixtures:
    def test_common_axis(self):
        a = Axis(-1.0, 1.0, 21)
        b = Axis(0.0, 3.0, 61)
        c = common_axis([a, b])
        assert c.min == -1.0 and c.max == pytest.approx(3.0) and c.step == pytest.approx(0.05)

    def test_mixture_of_identical(self, axis):
        g = gaussian_density(axis, 1.0)
        m = mixture([0.5, 0.5], [g, g])
        np.testing.assert_allclose(m.values, g.values, rtol=1e-14)

    def test_ensemble_single_component(self, product_unit):
        e = MixedEnsemble((1.0,), (product_unit,))
        for obs in ("x+", "p-"):
            np.testing.assert_allclose(ensemble_density(e, obs).values,
                                       component_marginal(product_unit, obs).values, rtol=1e-14)

    def test_ensemble_concavity(self):
        ax = Axis.symmetric(30.0, 4097)
        a = build_gaussian_product(1.0, 1.0, centers=(2.0, 0.0), axis=ax)
        b = build_gaussian_product(1.0, 1.0, centers=(-2.0, 0.0), axis=ax)
        e = MixedEnsemble((0.4, 0.6), (a, b))
        for obs in ("x+", "x-", "p+", "p-"):
            h_mix = shannon(ensemble_density(e, obs))
            h_avg = 0.4 * shannon(component_marginal(a, obs)) + 0.6 * shannon(component_marginal(b, obs))
            assert h_mix >= h_avg - 1e-9

    def test_bad_observable(self, product_unit):
        with pytest.raises(ValueError):
            component_marginal(product_unit, "k+")


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0.0, 1.0))
def test_concavity_property(seed, lam):
    rng = np.random.default_rng(seed)
    ax = check_axis(2048)
    f, g = random_mixture_density(rng, ax), random_mixture_density(rng, ax)
    mix = Dist1D(ax, lam * f.values + (1 - lam) * g.values)
    assert shannon(mix) >= lam * shannon(f) + (1 - lam) * shannon(g) - 1e-9


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_epi_property(seed):
    rng = np.random.default_rng(seed)
    ax = check_axis(2048)
    assert epi_gap(random_mixture_density(rng, ax), random_mixture_density(rng, ax)) >= -1e-6


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_bbm_property(seed):
    rng = np.random.default_rng(seed)
    assert bbm_sum(random_wavefunction(rng, check_axis(2048))) >= LN_PIE - 1e-6
