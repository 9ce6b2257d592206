"""GUP momentum deformation and its entropy correction.

Under the deformed commutator ``[x, k] = i (1 + beta k^2)`` the auxiliary
momentum ``k`` is related to the physical momentum ``p`` by
``k = tan(sqrt(beta) p) / sqrt(beta)``, so ``p`` lives in ``(-p0, p0)`` with
``p0 = pi / (2 sqrt(beta))`` while ``k`` covers the real line. Densities
transform as ``u(k) = v(p) / (1 + beta k^2)`` and the entropy picks up

    H[u] = H[v] + eta,   eta = int v(p) ln(1 + beta k(p)^2) dp >= 0.

Integrals over ``k`` are carried out in the ``p`` domain, where the support is
bounded. States whose momentum density leaks past ``p0`` by more than
``eps_tail`` are rejected with :class:`GupDomainError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .entropy import _check_sign, marginal_pm, mixture, product_pm, shannon
from .errors import DomainError, GupDomainError, ParamError
from .grid import Axis, Coordinates, Dist1D, Dist2D, integrate, normalize, normalize2d

EPS_TAIL = 1e-8
MIN_K_POINTS = 1025


@dataclass(frozen=True)
class GupParam:
    beta: float

    def __post_init__(self):
        if isinstance(self.beta, bool) or not isinstance(self.beta, (int, float, np.floating)):
            raise ParamError(f"beta must be a real number, got {self.beta!r}")
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ParamError(f"beta must be finite and >= 0, got {self.beta}")
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def p0(self) -> float:
        return math.inf if self.beta == 0 else math.pi / (2 * math.sqrt(self.beta))


@dataclass(frozen=True)
class GupCorrection:
    beta: float
    eta1: float
    eta2: float
    tail1: float
    tail2: float


def p_to_k(p, g: GupParam):
    """``tan(sqrt(beta) p) / sqrt(beta)``; the identity at ``beta = 0``."""
    arr = np.asarray(p, dtype=float)
    if g.beta == 0:
        return arr if arr.ndim else float(arr)
    if np.any(np.abs(arr) >= g.p0):
        raise DomainError(f"|p| must stay below p0 = {g.p0:.12g}")
    sb = math.sqrt(g.beta)
    out = np.tan(sb * arr) / sb
    return out if out.ndim else float(out)


def k_to_p(k, g: GupParam):
    arr = np.asarray(k, dtype=float)
    if g.beta == 0:
        return arr if arr.ndim else float(arr)
    sb = math.sqrt(g.beta)
    out = np.arctan(sb * arr) / sb
    return out if out.ndim else float(out)


def _cdf(v: Dist1D) -> np.ndarray:
    return cumulative_trapezoid(v.values, dx=v.axis.step, initial=0.0)


def tail_mass(v: Dist1D, g: GupParam) -> float:
    """Probability carried by ``|p| >= p0`` (trapezoid, linear in the edge cells)."""
    if g.beta == 0:
        return 0.0
    cdf = _cdf(v)
    x = v.axis.points
    lo, hi = np.interp([-g.p0, g.p0], x, cdf)
    return float(max(cdf[-1] - (hi - lo), 0.0))


def _check_tail(v: Dist1D, g: GupParam, eps_tail: float) -> float:
    tail = tail_mass(v, g)
    if tail >= eps_tail:
        raise GupDomainError(
            f"momentum tail mass {tail:.3g} beyond p0 = {g.p0:.6g} exceeds eps_tail = {eps_tail:g}"
        )
    return tail


def _log_factor(p: np.ndarray, g: GupParam) -> np.ndarray:
    """``ln(1 + beta k(p)^2)`` inside ``(-p0, p0)``, zero outside."""
    sb = math.sqrt(g.beta)
    inside = np.abs(p) < g.p0
    t = np.tan(sb * np.where(inside, p, 0.0))
    return np.where(inside, np.log1p(t * t), 0.0)


def eta(v: Dist1D, g: GupParam, eps_tail: float = EPS_TAIL) -> float:
    """GUP entropy correction ``int v(p) ln(1 + beta k(p)^2) dp``."""
    if g.beta == 0:
        return 0.0
    _check_tail(v, g, eps_tail)
    return integrate(v, v.values * _log_factor(v.axis.points, g))


def gup_entropy(v: Dist1D, g: GupParam, eps_tail: float = EPS_TAIL) -> float:
    """Entropy of the deformed density, ``H[v] + eta``."""
    return shannon(v) + eta(v, g, eps_tail)


def _central_interval(v: Dist1D, eps_tail: float) -> float:
    """Smallest symmetric half-width ``q`` with mass outside ``(-q, q)`` below ``eps_tail``."""
    cdf = _cdf(v)
    total = cdf[-1]
    x = v.axis.points
    # cdf may have flat stretches; np.interp needs increasing abscissae
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    lo = np.interp(0.5 * eps_tail * total, cdf[keep], x[keep])
    hi = np.interp(total * (1 - 0.5 * eps_tail), cdf[keep], x[keep])
    return max(abs(lo), abs(hi))


def _k_axis(q: float, p_step: float, g: GupParam, min_points: int = MIN_K_POINTS,
            max_points: int = 1 << 16) -> Axis:
    k_max = p_to_k(q, g)
    n = max(min_points, int(math.ceil(2 * k_max / p_step)) + 1)
    n = min(n, max_points)
    n += 1 - n % 2
    return Axis.symmetric(k_max, n)


def _spline_at(v: Dist1D, p: np.ndarray) -> np.ndarray:
    # not-a-knot cubic: fourth-order accurate, unlike PCHIP which is too
    # coarse on FFT momentum grids; overshoot below zero is clipped
    spline = CubicSpline(v.axis.points, v.values, extrapolate=False)
    return np.clip(np.nan_to_num(spline(p), nan=0.0), 0.0, None)


def u_from_v(v: Dist1D, g: GupParam, eps_tail: float = EPS_TAIL) -> Dist1D:
    """Deformed density ``u(k) = v(p(k)) / (1 + beta k^2)`` on a uniform ``k`` grid.

    The ``k`` range is the image of the central interval holding all but
    ``eps_tail`` of the mass; ``v`` is evaluated off-grid by a cubic spline
    clipped at zero.
    """
    if g.beta == 0:
        return v
    _check_tail(v, g, eps_tail)
    return deform(v, shared_k_axis((v,), g, eps_tail), g)


def correction(v1: Dist1D, v2: Dist1D, g: GupParam, eps_tail: float = EPS_TAIL) -> GupCorrection:
    """Per-subsystem corrections and tail masses for momentum marginals ``v1, v2``."""
    if g.beta == 0:
        return GupCorrection(0.0, 0.0, 0.0, 0.0, 0.0)
    t1 = _check_tail(v1, g, eps_tail)
    t2 = _check_tail(v2, g, eps_tail)
    return GupCorrection(g.beta, eta(v1, g, eps_tail), eta(v2, g, eps_tail), t1, t2)


def shared_k_axis(dists, g: GupParam, eps_tail: float = EPS_TAIL) -> Axis:
    """One ``k`` grid wide enough for every density in ``dists``."""
    q = max(_central_interval(v, eps_tail) for v in dists)
    q = min(q, g.p0 * (1 - 1e-9))
    return _k_axis(q, min(v.axis.step for v in dists), g)


def deform(v: Dist1D, kax: Axis, g: GupParam) -> Dist1D:
    """``u(k)`` sampled on a given ``k`` axis (no tail check)."""
    k = kax.points
    return normalize(Dist1D(kax, _spline_at(v, k_to_p(k, g)) / (1 + g.beta * k**2)))


def product_u_pm(v1: Dist1D, v2: Dist1D, g: GupParam, sign: str,
                 eps_tail: float = EPS_TAIL, kax: Axis | None = None) -> Dist1D:
    """``u1 * u2^(+/-)`` for independent subsystems, on a shared ``k`` grid."""
    _check_sign(sign)
    if g.beta == 0:
        return product_pm(v1, v2, sign)
    for v in (v1, v2):
        _check_tail(v, g, eps_tail)
    if kax is None:
        kax = shared_k_axis((v1, v2), g, eps_tail)
    return product_pm(deform(v1, kax, g), deform(v2, kax, g), sign)


def joint_tail_mass(v2d: Dist2D, g: GupParam) -> float:
    """Union bound on the mass outside ``(-p0, p0)^2``."""
    return tail_mass(normalize(v2d.marginal(0)), g) + tail_mass(normalize(v2d.marginal(1)), g)


def joint_u_pm(v2d: Dist2D, g: GupParam, sign: str, eps_tail: float = EPS_TAIL) -> Dist1D:
    """Density of ``k1 + k2`` or ``k1 - k2`` for a joint momentum density ``v(p1, p2)``.

    ``u(k1, k2) = v(p1, p2) / ((1 + beta k1^2)(1 + beta k2^2))`` is sampled on
    a uniform square ``k`` lattice (bicubic spline of ``v`` at ``p(k)``), then
    summed along lattice diagonals.
    """
    _check_sign(sign)
    if v2d.coords is not Coordinates.P1P2:
        raise ValueError(f"joint_u_pm needs a (p1, p2) density, got {v2d.coords.value}")
    if g.beta == 0:
        return marginal_pm(v2d, sign)
    tail = joint_tail_mass(v2d, g)
    if tail >= eps_tail:
        raise GupDomainError(
            f"joint momentum tail mass {tail:.3g} beyond p0 = {g.p0:.6g} exceeds eps_tail = {eps_tail:g}"
        )
    m1, m2 = normalize(v2d.marginal(0)), normalize(v2d.marginal(1))
    q = min(max(_central_interval(m1, eps_tail), _central_interval(m2, eps_tail)), g.p0 * (1 - 1e-9))
    a, b = v2d.axes
    kax = _k_axis(q, min(a.step, b.step), g, min_points=513, max_points=2049)
    k = kax.points
    p = k_to_p(k, g)
    # restrict the spline to the block of the p grid that the lattice can reach
    sl = []
    for ax in (a, b):
        x = ax.points
        i0 = max(int(np.searchsorted(x, -q)) - 4, 0)
        i1 = min(int(np.searchsorted(x, q)) + 4, ax.n)
        sl.append(slice(i0, i1))
    spline = RectBivariateSpline(a.points[sl[0]], b.points[sl[1]], v2d.values[sl[0], sl[1]], kx=3, ky=3)
    jac = 1 + g.beta * k**2
    u = np.clip(spline(p, p, grid=True), 0.0, None) / np.outer(jac, jac)
    lattice = Dist2D((kax, kax), u, Coordinates.K1K2)
    return marginal_pm(normalize2d(lattice), sign)


def ensemble_u_pm(weights, v_pairs, g: GupParam, sign: str, eps_tail: float = EPS_TAIL) -> Dist1D:
    """``sum_m lambda_m u_m(+/-)`` over per-component momentum densities."""
    kax = None
    if g.beta > 0:
        kax = shared_k_axis([v for pair in v_pairs for v in pair], g, eps_tail)
    return mixture(weights, [product_u_pm(v1, v2, g, sign, eps_tail, kax) for v1, v2 in v_pairs])
