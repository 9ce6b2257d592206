"""Entropic entanglement criteria for EPR-type sum/difference quadratures.

Every separable state satisfies ``H[w+/-] + H[v-/+] >= bound`` for each of the
bounds below; a state that violates one (``margin = bound - lhs > tau``) is
certified entangled. Satisfying a bound proves nothing, hence the verdict
``Inconclusive`` rather than ``Separable``.

With the GUP deformation the momentum entropies ``H[v]`` are replaced by
``H[u] = H[v] + eta`` and every bound is raised accordingly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import marginal_pm, mixture, product_pm, shannon
from .errors import KindError, ParamError
from .grid import Dist1D
from .gup import (EPS_TAIL, GupParam, correction, ensemble_u_pm, joint_u_pm,
                  product_u_pm, shared_k_axis)
from .states import JointState, MixedEnsemble, PureProductState, State, check_weights, to_momentum, to_momentum_2d

LN_2PIE = 1.0 + math.log(2 * math.pi)
LN2 = math.log(2.0)
TAU_VERDICT = 1e-9


class Family(str, enum.Enum):
    STRONG_PURE = "strong-pure"
    WEAK_PURE = "weak-pure"
    STRONG_MIXED = "strong-mixed"
    WEAK_MIXED = "weak-mixed"


class BoundKind(str, enum.Enum):
    STRONG_PURE = "strong-pure"
    WEAK_PURE = "weak-pure"
    STRONG_MIXED = "strong-mixed"
    WEAK_MIXED = "weak-mixed"
    STRONG_PURE_GUP = "strong-pure-gup"
    WEAK_PURE_GUP = "weak-pure-gup"
    STRONG_MIXED_GUP = "strong-mixed-gup"
    WEAK_MIXED_GUP = "weak-mixed-gup"

    @property
    def is_gup(self) -> bool:
        return self.value.endswith("-gup")

    @property
    def family(self) -> Family:
        return Family(self.value.removesuffix("-gup"))

    @property
    def is_mixed(self) -> bool:
        return self.family in (Family.STRONG_MIXED, Family.WEAK_MIXED)

    @property
    def is_strong(self) -> bool:
        return self.family in (Family.STRONG_PURE, Family.STRONG_MIXED)

    @property
    def standard(self) -> "BoundKind":
        return BoundKind(self.family.value)


class Verdict(str, enum.Enum):
    ENTANGLED = "Entangled"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CriterionResult:
    kind: BoundKind
    lhs: float
    bound: float
    margin: float
    verdict: Verdict
    delta_h: float
    beta: float
    pairing: str
    eta1: float = 0.0
    eta2: float = 0.0

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lhs": self.lhs,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict.value,
            "delta_h": self.delta_h,
            "beta": self.beta,
            "pairing": self.pairing,
            "eta1": self.eta1,
            "eta2": self.eta2,
        }


# --------------------------------------------------------------------------
# bounds


def _check_eta(*etas: float) -> None:
    for e in etas:
        if not math.isfinite(e) or e < 0:
            raise ParamError(f"GUP corrections must be finite and >= 0, got {e!r}")


def strong_pure_bound(hw1: float, hw2: float, hv1: float, hv2: float) -> float:
    """``1/2 ln[(e^{2Hw1} + e^{2Hw2})(e^{2Hv1} + e^{2Hv2})]``."""
    return 0.5 * (float(np.logaddexp(2 * hw1, 2 * hw2)) + float(np.logaddexp(2 * hv1, 2 * hv2)))


def weak_pure_bound() -> float:
    """State-independent bound ``ln 2 pi e``."""
    return LN_2PIE


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - LN2


def weak_bound_cosh_form(hv1: float, hv2: float) -> float:
    """``1/2 ln{2 (pi e)^2 (1 + cosh dH)}`` with ``dH = Hv2 - Hv1``.

    Uses ``1 + cosh d = 2 cosh^2(d/2)``, so the value is
    ``ln 2 pi e + ln cosh(dH / 2)``.
    """
    return LN_2PIE + _log_cosh(0.5 * (hv2 - hv1))


def gup_strong_pure_bound(hw1: float, hw2: float, hv1: float, hv2: float,
                          eta1: float, eta2: float) -> float:
    _check_eta(eta1, eta2)
    return 0.5 * (float(np.logaddexp(2 * hw1, 2 * hw2))
                  + float(np.logaddexp(2 * (hv1 + eta1), 2 * (hv2 + eta2))))


def _log_mean_exp(eta1: float, eta2: float) -> float:
    # ln((e^a + e^b) / 2), exact when a == b
    if eta1 == eta2:
        return eta1
    return float(np.logaddexp(eta1, eta2)) - LN2


def gup_weak_pure_bound(eta1: float, eta2: float) -> float:
    """``ln 2 pi e + ln[(e^{eta1} + e^{eta2}) / 2]``."""
    _check_eta(eta1, eta2)
    return LN_2PIE + _log_mean_exp(eta1, eta2)


def _check_mixed(weights, n_components: int) -> None:
    check_weights(weights)
    if len(weights) != n_components:
        raise ParamError("one set of component entropies per weight is required")


def mixed_strong_bound(weights, entropies) -> float:
    """Weighted mean of per-component strong bounds.

    ``entropies`` holds one ``(Hw1, Hw2, Hv1, Hv2)`` tuple per component.
    """
    _check_mixed(weights, len(entropies))
    return math.fsum(lam * strong_pure_bound(*h) for lam, h in zip(weights, entropies))


def mixed_weak_bound(weights) -> float:
    check_weights(weights)
    return LN_2PIE


def gup_mixed_strong_bound(weights, entropies, etas) -> float:
    """Weighted mean of per-component GUP strong bounds; ``etas`` holds ``(eta1, eta2)`` pairs.

    The corrections multiply only the momentum factor, as in the pure-state bound.
    """
    _check_mixed(weights, len(entropies))
    if len(etas) != len(entropies):
        raise ParamError("one (eta1, eta2) pair per component is required")
    return math.fsum(lam * gup_strong_pure_bound(*h, *e) for lam, h, e in zip(weights, entropies, etas))


def gup_mixed_weak_bound(weights, eta1m, eta2m) -> float:
    """``ln 2 pi e + sum_m lambda_m ln[(e^{eta1m} + e^{eta2m}) / 2]``."""
    check_weights(weights)
    if not len(weights) == len(eta1m) == len(eta2m):
        raise ParamError("one eta pair per weight is required")
    _check_eta(*eta1m, *eta2m)
    return LN_2PIE + math.fsum(lam * _log_mean_exp(a, b) for lam, a, b in zip(weights, eta1m, eta2m))


def minimize_delta_h(eta1: float, eta2: float) -> tuple[float, float]:
    """Minimize ``e^{2eta1} + e^{2eta2} + e^{2eta1 + 2d} + e^{2eta2 - 2d}`` over ``d``.

    Setting the derivative to zero gives ``d* = (eta2 - eta1) / 2`` and the
    minimum ``(e^{eta1} + e^{eta2})^2``.
    """
    if not (math.isfinite(eta1) and math.isfinite(eta2)):
        raise ParamError("eta values must be finite")
    d_star = 0.5 * (eta2 - eta1)
    return d_star, (math.exp(eta1) + math.exp(eta2)) ** 2


def delta_objective(d: float, eta1: float, eta2: float) -> float:
    return (math.exp(2 * eta1) + math.exp(2 * eta2)
            + math.exp(2 * eta1 + 2 * d) + math.exp(2 * eta2 - 2 * d))


# --------------------------------------------------------------------------
# entropy profile of a state


@dataclass(frozen=True)
class EntropyProfile:
    """All entropies that enter the criteria, for one state and one beta.

    ``components`` holds ``(Hw1, Hw2, Hv1, Hv2)`` per ensemble member (a single
    entry for pure states) and ``component_etas`` the matching ``(eta1, eta2)``.
    The ``hu_*`` fields equal the ``hv_*`` fields at ``beta = 0``.
    """

    beta: float
    hw1: float
    hw2: float
    hv1: float
    hv2: float
    hw_plus: float
    hw_minus: float
    hv_plus: float
    hv_minus: float
    hu_plus: float
    hu_minus: float
    eta1: float
    eta2: float
    weights: tuple[float, ...] = (1.0,)
    components: tuple[tuple[float, float, float, float], ...] = ()
    component_etas: tuple[tuple[float, float], ...] = ()
    densities: dict = field(default_factory=dict, compare=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "H_w1": self.hw1, "H_w2": self.hw2, "H_v1": self.hv1, "H_v2": self.hv2,
            "H_w_plus": self.hw_plus, "H_w_minus": self.hw_minus,
            "H_v_plus": self.hv_plus, "H_v_minus": self.hv_minus,
            "H_u_plus": self.hu_plus, "H_u_minus": self.hu_minus,
            "eta1": self.eta1, "eta2": self.eta2,
        }


def _product_entropies(state: PureProductState):
    w1, w2 = state.psi1.density(), state.psi2.density()
    v1, v2 = to_momentum(state.psi1).density(), to_momentum(state.psi2).density()
    return (w1, w2, v1, v2), tuple(shannon(d) for d in (w1, w2, v1, v2))


def profile(state: State, g: GupParam = GupParam(0.0), eps_tail: float = EPS_TAIL) -> EntropyProfile:
    """Compute single-subsystem, sum/difference and GUP entropies of ``state``."""
    dens: dict[str, Dist1D] = {}
    if isinstance(state, PureProductState):
        (w1, w2, v1, v2), comp = _product_entropies(state)
        corr = correction(v1, v2, g, eps_tail)
        for s in "+-":
            dens["w" + s] = product_pm(w1, w2, s)
            dens["v" + s] = product_pm(v1, v2, s)
        if g.beta > 0:
            kax = shared_k_axis((v1, v2), g, eps_tail)
            for s in "+-":
                dens["u" + s] = product_u_pm(v1, v2, g, s, eps_tail, kax)
        weights, comps, etas = (1.0,), (comp,), ((corr.eta1, corr.eta2),)
    elif isinstance(state, JointState):
        wd = state.amplitude.density()
        vd = to_momentum_2d(state).amplitude.density()
        w1, w2 = wd.marginal(0), wd.marginal(1)
        v1, v2 = vd.marginal(0), vd.marginal(1)
        corr = correction(v1, v2, g, eps_tail)
        for s in "+-":
            dens["w" + s] = marginal_pm(wd, s)
            dens["v" + s] = marginal_pm(vd, s)
            if g.beta > 0:
                dens["u" + s] = joint_u_pm(vd, g, s, eps_tail)
        comp = tuple(shannon(d) for d in (w1, w2, v1, v2))
        weights, comps, etas = (1.0,), (comp,), ((corr.eta1, corr.eta2),)
    elif isinstance(state, MixedEnsemble):
        comps, etas, parts = [], [], []
        for c in state.components:
            (w1m, w2m, v1m, v2m), comp = _product_entropies(c)
            corr_m = correction(v1m, v2m, g, eps_tail)
            comps.append(comp)
            etas.append((corr_m.eta1, corr_m.eta2))
            parts.append((w1m, w2m, v1m, v2m))
        weights = state.weights
        w1 = mixture(weights, [p[0] for p in parts])
        w2 = mixture(weights, [p[1] for p in parts])
        v1 = mixture(weights, [p[2] for p in parts])
        v2 = mixture(weights, [p[3] for p in parts])
        corr = correction(v1, v2, g, eps_tail)
        for s in "+-":
            dens["w" + s] = mixture(weights, [product_pm(p[0], p[1], s) for p in parts])
            dens["v" + s] = mixture(weights, [product_pm(p[2], p[3], s) for p in parts])
            if g.beta > 0:
                dens["u" + s] = ensemble_u_pm(weights, [(p[2], p[3]) for p in parts], g, s, eps_tail)
        comps, etas = tuple(comps), tuple(etas)
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")
    if g.beta == 0:
        dens["u+"], dens["u-"] = dens["v+"], dens["v-"]
    dens.update(w1=w1, w2=w2, v1=v1, v2=v2)
    h = {k: shannon(d) for k, d in dens.items() if k[0] in "wvu" and len(k) == 2 and k[1] in "+-"}
    return EntropyProfile(
        beta=g.beta,
        hw1=shannon(w1), hw2=shannon(w2), hv1=shannon(v1), hv2=shannon(v2),
        hw_plus=h["w+"], hw_minus=h["w-"], hv_plus=h["v+"], hv_minus=h["v-"],
        hu_plus=h["u+"], hu_minus=h["u-"],
        eta1=corr.eta1, eta2=corr.eta2,
        weights=tuple(weights), components=tuple(comps), component_etas=tuple(etas),
        densities=dens,
    )


# --------------------------------------------------------------------------
# evaluation


def check_kind(state: State, kind: BoundKind) -> None:
    mixed = isinstance(state, MixedEnsemble)
    if kind.is_mixed != mixed:
        need = "a mixed ensemble" if kind.is_mixed else "a pure (product or joint) state"
        raise KindError(f"criterion {kind.value} needs {need}")


def bound_for(p: EntropyProfile, kind: BoundKind) -> float:
    fam = kind.family
    gup = kind.is_gup
    if fam is Family.STRONG_PURE:
        h = (p.hw1, p.hw2, p.hv1, p.hv2)
        return gup_strong_pure_bound(*h, p.eta1, p.eta2) if gup else strong_pure_bound(*h)
    if fam is Family.WEAK_PURE:
        return gup_weak_pure_bound(p.eta1, p.eta2) if gup else weak_pure_bound()
    if fam is Family.STRONG_MIXED:
        if gup:
            return gup_mixed_strong_bound(p.weights, p.components, p.component_etas)
        return mixed_strong_bound(p.weights, p.components)
    if gup:
        return gup_mixed_weak_bound(p.weights, [e[0] for e in p.component_etas],
                                    [e[1] for e in p.component_etas])
    return mixed_weak_bound(p.weights)


def judge(p: EntropyProfile, kind: BoundKind, tau: float = TAU_VERDICT) -> CriterionResult:
    """Apply one criterion to a precomputed profile, keeping the better sign pairing."""
    bound = bound_for(p, kind)
    mom_plus, mom_minus = (p.hu_plus, p.hu_minus) if kind.is_gup else (p.hv_plus, p.hv_minus)
    pairings = {"+-": p.hw_plus + mom_minus, "-+": p.hw_minus + mom_plus}
    # ties resolve to "+-" so the output is deterministic
    pairing = min(pairings, key=lambda k: (pairings[k], k != "+-"))
    lhs = pairings[pairing]
    margin = bound - lhs
    delta_h = p.hv2 - p.hv1
    if kind.is_gup:
        delta_h += p.eta2 - p.eta1
    return CriterionResult(
        kind=kind, lhs=lhs, bound=bound, margin=margin,
        verdict=Verdict.ENTANGLED if margin > tau else Verdict.INCONCLUSIVE,
        delta_h=delta_h, beta=p.beta, pairing=pairing,
        eta1=p.eta1 if kind.is_gup else 0.0, eta2=p.eta2 if kind.is_gup else 0.0,
    )


def evaluate_with_profile(state: State, kind: BoundKind | str, g: GupParam = GupParam(0.0),
                          eps_tail: float = EPS_TAIL,
                          tau: float = TAU_VERDICT) -> tuple[CriterionResult, EntropyProfile]:
    """Like :func:`evaluate`, also returning the entropy profile it used."""
    kind = BoundKind(kind)
    check_kind(state, kind)
    gp = g if kind.is_gup else GupParam(0.0)
    prof = profile(state, gp, eps_tail)
    res = judge(prof, kind, tau)
    if not kind.is_gup:
        res = CriterionResult(**{**res.__dict__, "beta": g.beta})
    return res, prof


def evaluate(state: State, kind: BoundKind | str, g: GupParam = GupParam(0.0),
             eps_tail: float = EPS_TAIL, tau: float = TAU_VERDICT) -> CriterionResult:
    """Build every density ``state`` needs and apply criterion ``kind``.

    Standard kinds ignore ``g`` for the entropies (``beta`` is only echoed);
    GUP kinds at ``beta = 0`` reproduce the standard result exactly.
    """
    return evaluate_with_profile(state, kind, g, eps_tail, tau)[0]
