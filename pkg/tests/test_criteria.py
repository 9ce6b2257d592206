import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LN_2PIE
from cventangle.criteria import (BoundKind, Family, Verdict, delta_objective, evaluate, gup_mixed_strong_bound,
                                 gup_mixed_weak_bound, gup_strong_pure_bound, gup_weak_pure_bound, judge,
                                 minimize_delta_h, mixed_strong_bound, mixed_weak_bound, profile,
                                 strong_pure_bound, weak_bound_cosh_form, weak_pure_bound)
from cventangle.errors import KindError, ParamError, WeightError
from cventangle.grid import Axis
from cventangle.gup import GupParam
from cventangle.states import MixedEnsemble, build_gaussian_product, build_tmsv

HW = 0.5 * LN_2PIE           # sigma_x = 1
HV = 0.5 * LN_2PIE + math.log(0.5)  # sigma_p = 1/2

finite = st.floats(-20, 20)
nonneg = st.floats(0, 2)


class TestKinds:
    def test_properties(self):
        k = BoundKind("strong-mixed-gup")
        assert k.is_gup and k.is_mixed and k.is_strong
        assert k.family is Family.STRONG_MIXED
        assert k.standard is BoundKind.STRONG_MIXED
        assert not BoundKind.WEAK_PURE.is_gup

    def test_unknown(self):
        with pytest.raises(ValueError):
            BoundKind("medium-pure")


class TestPureBounds:
    def test_strong_symmetric(self):
        assert strong_pure_bound(1.2, 1.2, 0.3, 0.3) == pytest.approx(math.log(2) + 1.5, abs=1e-14)

    def test_strong_saturation(self):
        assert strong_pure_bound(HW, HW, HV, HV) == pytest.approx(LN_2PIE, abs=1e-14)

    def test_strong_zero(self):
        assert strong_pure_bound(0, 0, 0, 0) == pytest.approx(math.log(2), abs=1e-15)

    def test_strong_large_entropies(self):
        assert strong_pure_bound(500, 500, 400, 400) == pytest.approx(math.log(2) + 900)

    def test_weak(self):
        assert weak_pure_bound() == pytest.approx(2.837877066409345, abs=1e-12)
        assert weak_pure_bound() == gup_weak_pure_bound(0.0, 0.0)

    def test_cosh_form(self):
        assert weak_bound_cosh_form(0.7, 0.7) == LN_2PIE
        direct = 0.5 * math.log(2 * (math.pi * math.e) ** 2 * (1 + math.cosh(1.0)))
        assert weak_bound_cosh_form(0.0, 1.0) == pytest.approx(direct, abs=1e-14)
        assert weak_bound_cosh_form(0.0, 1.0) == weak_bound_cosh_form(1.0, 0.0)
        assert weak_bound_cosh_form(0.0, 1.0) > LN_2PIE

    def test_gup_strong(self):
        h = (1.1, 1.3, 0.4, 0.2)
        assert gup_strong_pure_bound(*h, 0.0, 0.0) == strong_pure_bound(*h)
        assert gup_strong_pure_bound(*h, 0.05, 0.05) == pytest.approx(strong_pure_bound(*h) + 0.05, abs=1e-14)
        assert gup_strong_pure_bound(HW, HW, HV, HV, 0.010050, 0.010050) == pytest.approx(2.847927, abs=1e-6)

    def test_gup_weak(self):
        assert gup_weak_pure_bound(0.03, 0.03) == pytest.approx(LN_2PIE + 0.03, abs=1e-15)
        assert gup_weak_pure_bound(0.0, 0.02) == pytest.approx(LN_2PIE + math.log((1 + math.exp(0.02)) / 2))
        assert gup_weak_pure_bound(0.0, 0.02) == pytest.approx(2.847927, abs=1e-6)

    def test_negative_eta(self):
        with pytest.raises(ParamError):
            gup_weak_pure_bound(-0.1, 0.0)
        with pytest.raises(ParamError):
            gup_strong_pure_bound(1, 1, 1, 1, 0.0, -1e-3)

    def test_weak_matches_minimized_strong(self):
        # ln(pi e) + ln(e^eta1 + e^eta2) from the minimized delta
        e1, e2 = 0.01, 0.03
        _, m = minimize_delta_h(e1, e2)
        assert gup_weak_pure_bound(e1, e2) == pytest.approx(0.5 * math.log((math.pi * math.e) ** 2 * m), abs=1e-14)


class TestMixedBounds:
    comps = [(1.0, 1.2, 0.3, 0.5), (1.5, 0.9, 0.1, 0.8)]

    def test_single(self):
        assert mixed_strong_bound([1.0], self.comps[:1]) == pytest.approx(strong_pure_bound(*self.comps[0]))
        assert gup_mixed_strong_bound([1.0], self.comps[:1], [(0.1, 0.2)]) == pytest.approx(
            gup_strong_pure_bound(*self.comps[0], 0.1, 0.2))

    def test_identical(self):
        c = self.comps[0]
        assert mixed_strong_bound([0.5, 0.5], [c, c]) == pytest.approx(strong_pure_bound(*c), abs=1e-14)

    def test_weighted(self):
        h1, h2 = (strong_pure_bound(*c) for c in self.comps)
        assert mixed_strong_bound([0.3, 0.7], self.comps) == pytest.approx(0.3 * h1 + 0.7 * h2, abs=1e-14)

    def test_gup_strong(self):
        w = [0.3, 0.7]
        assert gup_mixed_strong_bound(w, self.comps, [(0, 0), (0, 0)]) == mixed_strong_bound(w, self.comps)
        assert gup_mixed_strong_bound(w, self.comps, [(0.02, 0.02)] * 2) == pytest.approx(
            mixed_strong_bound(w, self.comps) + 0.02, abs=1e-14)

    def test_gup_weak(self):
        assert gup_mixed_weak_bound([1.0], [0.0], [0.0]) == LN_2PIE
        assert gup_mixed_weak_bound([0.4, 0.6], [0.02, 0.02], [0.02, 0.02]) == pytest.approx(LN_2PIE + 0.02)
        assert gup_mixed_weak_bound([0.5, 0.5], [0.01, 0.02], [0.01, 0.02]) == pytest.approx(
            LN_2PIE + 0.015, abs=1e-15)

    def test_invalid_weights(self):
        with pytest.raises(WeightError):
            mixed_strong_bound([0.6, 0.5], self.comps)
        with pytest.raises(WeightError):
            mixed_weak_bound([1.2])
        with pytest.raises(ParamError):
            mixed_strong_bound([1.0], self.comps)
        with pytest.raises(ParamError):
            gup_mixed_weak_bound([0.5, 0.5], [0.1], [0.1, 0.1])


class TestMinimizer:
    def test_symmetric(self):
        d, m = minimize_delta_h(0.02, 0.02)
        assert d == 0.0
        assert m == pytest.approx(4 * math.exp(0.04))

    def test_zero(self):
        d, m = minimize_delta_h(0.0, 0.0)
        assert (d, m) == (0.0, 4.0)

    def test_asymmetric(self):
        d, m = minimize_delta_h(0.01, 0.03)
        assert d == pytest.approx(0.01, abs=1e-15)
        assert m == pytest.approx((math.exp(0.01) + math.exp(0.03)) ** 2, abs=1e-15)
        assert m == pytest.approx(4.163659, abs=1e-6)
        assert delta_objective(d, 0.01, 0.03) == pytest.approx(m, abs=1e-12)

    def test_non_finite(self):
        with pytest.raises(ParamError):
            minimize_delta_h(math.inf, 0.0)


@settings(max_examples=100, deadline=None)
@given(hw1=finite, hw2=finite, hv1=finite, hv2=finite, e1=nonneg, e2=nonneg)
def test_gup_bounds_dominate(hw1, hw2, hv1, hv2, e1, e2):
    h = (hw1, hw2, hv1, hv2)
    assert gup_strong_pure_bound(*h, e1, e2) >= strong_pure_bound(*h) - 1e-12
    assert gup_weak_pure_bound(e1, e2) >= LN_2PIE - 1e-15
    if max(e1, e2) > 1e-9:
        assert gup_weak_pure_bound(e1, e2) > LN_2PIE
    if min(e1, e2) > 1e-9:
        assert gup_strong_pure_bound(*h, e1, e2) > strong_pure_bound(*h)


@settings(max_examples=100, deadline=None)
@given(hv1=finite, hv2=finite)
def test_cosh_form_at_least_weak(hv1, hv2):
    val = weak_bound_cosh_form(hv1, hv2)
    assert val >= LN_2PIE
    if hv1 == hv2:
        assert val == LN_2PIE


@settings(max_examples=100, deadline=None)
@given(e1=st.floats(0, 1), e2=st.floats(0, 1), shift=st.floats(-0.5, 0.5))
def test_minimizer_is_minimum(e1, e2, shift):
    d, m = minimize_delta_h(e1, e2)
    assert delta_objective(d, e1, e2) == pytest.approx(m, rel=1e-12)
    assert delta_objective(d + shift, e1, e2) >= m * (1 - 1e-12)


# --------------------------------------------------------------------------
# full pipeline


@pytest.fixture(scope="module")
def ensemble():
    ax = Axis.symmetric(30.0, 4097)
    a = build_gaussian_product(1.0, 1.0, centers=(1.5, -0.5), axis=ax)
    b = build_gaussian_product(0.8, 0.8, centers=(-1.0, 1.0), axis=ax)
    return MixedEnsemble((0.35, 0.65), (a, b))


class TestEvaluate:
    @pytest.mark.parametrize("r", [0.01, 0.25, 0.5, 1.0])
    def test_tmsv_detected(self, r):
        res = evaluate(build_tmsv(r), BoundKind.WEAK_PURE)
        assert res.verdict is Verdict.ENTANGLED
        assert res.margin == pytest.approx(2 * r, abs=1e-6)
        assert res.lhs == pytest.approx(LN_2PIE - 2 * r, abs=1e-6)

    def test_tmsv_strong(self, tmsv_half):
        res = evaluate(tmsv_half, "strong-pure")
        assert res.verdict is Verdict.ENTANGLED
        assert res.margin > 1.0 - 1e-6

    def test_product_saturation(self, product_unit):
        res = evaluate(product_unit, BoundKind.WEAK_PURE)
        assert res.lhs == pytest.approx(LN_2PIE, abs=1e-5)
        assert res.verdict is Verdict.INCONCLUSIVE
        assert res.pairing == "+-"

    def test_tmsv_gup(self, tmsv_half):
        base = evaluate(tmsv_half, BoundKind.WEAK_PURE)
        res = evaluate(tmsv_half, BoundKind.WEAK_PURE_GUP, GupParam(0.01))
        assert res.bound > LN_2PIE
        assert res.verdict is Verdict.ENTANGLED
        assert res.eta1 > 0 and res.eta2 > 0
        # bound and lhs both rise by eta to first order in beta; the margin
        # moves only at second order
        assert abs(res.margin - base.margin) < 0.01**2 * 5
        assert res.lhs - base.lhs == pytest.approx(res.bound - base.bound, abs=5e-4)

    def test_gup_at_zero_is_standard(self, tmsv_half, product_unit, ensemble):
        cases = [(tmsv_half, "weak-pure"), (product_unit, "strong-pure"), (ensemble, "strong-mixed"),
                 (ensemble, "weak-mixed")]
        for state, kind in cases:
            std = evaluate(state, kind)
            gup = evaluate(state, kind + "-gup", GupParam(0.0))
            assert (gup.lhs, gup.bound, gup.margin, gup.verdict) == (std.lhs, std.bound, std.margin, std.verdict)

    def test_standard_echoes_beta(self, product_unit):
        res = evaluate(product_unit, "weak-pure", GupParam(0.02))
        assert res.beta == 0.02
        assert res.eta1 == 0.0

    def test_kind_mismatch(self, ensemble, product_unit):
        with pytest.raises(KindError):
            evaluate(ensemble, "strong-pure")
        with pytest.raises(KindError):
            evaluate(product_unit, "weak-mixed")

    @pytest.mark.parametrize("kind", [k for k in BoundKind if k.is_mixed])
    def test_separable_ensemble_never_flagged(self, ensemble, kind):
        res = evaluate(ensemble, kind, GupParam(0.01))
        assert res.verdict is Verdict.INCONCLUSIVE

    @pytest.mark.parametrize("kind", [k for k in BoundKind if not k.is_mixed])
    @pytest.mark.parametrize("sigmas", [(1.0, 1.0), (0.6, 1.4)])
    def test_separable_products_never_flagged(self, kind, sigmas):
        st_ = build_gaussian_product(*sigmas, centers=(0.5, -1.0), momenta=(0.3, 0.0))
        assert evaluate(st_, kind, GupParam(0.01)).verdict is Verdict.INCONCLUSIVE

    def test_bounds_monotone_in_beta(self, product_unit):
        prev = {"strong-pure-gup": -math.inf, "weak-pure-gup": -math.inf}
        for beta in (1e-4, 1e-3, 1e-2):
            for kind in prev:
                b = evaluate(product_unit, kind, GupParam(beta)).bound
                assert b >= prev[kind]
                prev[kind] = b

    def test_judge_tau(self, tmsv_half):
        p = profile(tmsv_half)
        assert judge(p, BoundKind.WEAK_PURE, tau=2.0).verdict is Verdict.INCONCLUSIVE
        assert judge(p, BoundKind.WEAK_PURE).delta_h == pytest.approx(0.0, abs=1e-12)

    def test_profile_densities(self, product_unit):
        p = profile(product_unit, GupParam(0.01))
        assert {"w+", "w-", "v+", "v-", "u+", "u-", "w1", "v2"} <= set(p.densities)
        assert p.hu_plus > p.hv_plus
        assert p.as_dict()["eta1"] == p.eta1
