"""Shannon entropies of sampled densities and the EPR-marginal machinery.

All entropies are in nats. Differential entropies may be negative and are
never clamped.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.signal import fftconvolve

from .errors import AxisError, ProbError
from .grid import Axis, Coordinates, Dist1D, Dist2D, Field1D, integrate, normalize, reflect
from .states import MixedEnsemble, PureProductState, to_momentum

# 0 ln 0 := 0 below this floor.
DENSITY_FLOOR = 1e-300
NORM_TOL = 1e-6

_PAIR_COORDS = (Coordinates.X1X2, Coordinates.P1P2, Coordinates.K1K2)
_PM_COORDS = (Coordinates.XPM, Coordinates.PPM, Coordinates.KPM)


def _check_sign(sign: str) -> str:
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return sign


def discrete_shannon(probs) -> float:
    """``-sum P ln P`` with ``0 ln 0 = 0``."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ProbError("probability vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ProbError("probabilities must be finite and nonnegative")
    if abs(math.fsum(p) - 1.0) > 1e-12:
        raise ProbError(f"probabilities sum to {math.fsum(p)!r}, not 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def shannon(d: Dist1D, tol: float = NORM_TOL) -> float:
    """Differential entropy ``-int d ln d`` by trapezoid quadrature."""
    mass = integrate(d)
    if abs(mass - 1.0) > tol:
        raise ProbError(f"density integrates to {mass:.10g}, not 1")
    v = d.values
    safe = np.where(v > DENSITY_FLOOR, v, 1.0)
    integrand = np.where(v > DENSITY_FLOOR, -v * np.log(safe), 0.0)
    return integrate(d, integrand)


def _diagonal_marginal(d: Dist2D, sign: str) -> Dist1D:
    a, b = d.axes
    if not a.same_step(b):
        raise AxisError("diagonal marginal needs equal steps on both axes")
    h = a.step
    i = np.arange(a.n)[:, None]
    j = np.arange(b.n)[None, :]
    if sign == "+":
        idx = i + j
        start = a.min + b.min
    else:
        idx = i - j + (b.n - 1)
        start = a.min - b.max
    n_out = a.n + b.n - 1
    sums = np.bincount(np.broadcast_to(idx, d.values.shape).ravel(), weights=d.values.ravel(),
                       minlength=n_out)
    return normalize(Dist1D(Axis.from_step(start, h, n_out), h * sums))


def marginal_pm(d: Dist2D, sign: str) -> Dist1D:
    """Density of ``q1 + q2`` (``sign='+'``) or ``q1 - q2`` of a joint density.

    Accepts a density already in sum/difference coordinates (the other
    variable is integrated out) or one in the pair coordinates, in which case
    the sums along lattice diagonals give the marginal without interpolation.
    """
    _check_sign(sign)
    mass = d.marginal(0)
    if abs(integrate(mass) - 1.0) > NORM_TOL:
        raise ProbError("joint density is not normalized")
    if d.coords in _PM_COORDS:
        return normalize(d.marginal(0 if sign == "+" else 1))
    return _diagonal_marginal(d, sign)


def convolve(a: Dist1D, b: Dist1D) -> Dist1D:
    """Linear convolution ``(a * b)(s) = int a(t) b(s - t) dt`` on the summed support."""
    if not a.axis.same_step(b.axis):
        raise AxisError(f"convolution needs equal grid spacing, got {a.axis.step} and {b.axis.step}")
    h = a.axis.step
    vals = h * fftconvolve(a.values, b.values)
    axis = Axis.from_step(a.axis.min + b.axis.min, h, a.axis.n + b.axis.n - 1)
    return normalize(Dist1D(axis, np.clip(vals, 0.0, None)))


def product_pm(d1: Dist1D, d2: Dist1D, sign: str) -> Dist1D:
    """Sum (``+``) or difference (``-``) density of independent variables."""
    _check_sign(sign)
    return convolve(d1, d2 if sign == "+" else reflect(d2))


def epi_gap(a: Dist1D, b: Dist1D) -> float:
    """``exp(2H[a*b]) - exp(2H[a]) - exp(2H[b])``; nonnegative up to quadrature error."""
    h_ab = shannon(convolve(a, b))
    return math.exp(2 * h_ab) - math.exp(2 * shannon(a)) - math.exp(2 * shannon(b))


def bbm_sum(psi: Field1D) -> float:
    """Position plus momentum entropy of a normalized wavefunction."""
    phi = to_momentum(psi)
    return shannon(psi.density()) + shannon(phi.density())


def resample(d: Dist1D, axis: Axis) -> Dist1D:
    """Linear interpolation onto ``axis``; zero outside the source support."""
    if d.axis == axis:
        return d
    vals = np.interp(axis.points, d.axis.points, d.values, left=0.0, right=0.0)
    return normalize(Dist1D(axis, vals))


def common_axis(axes: list[Axis]) -> Axis:
    """Finest step over the union of the supports."""
    step = min(a.step for a in axes)
    lo = min(a.min for a in axes)
    hi = max(a.max for a in axes)
    n = int(math.ceil((hi - lo) / step - 1e-9)) + 1
    return Axis.from_step(lo, step, n)


def mixture(weights, dists: list[Dist1D]) -> Dist1D:
    """Convex combination of densities, resampled to a common grid if needed."""
    axes = [d.axis for d in dists]
    axis = axes[0] if all(a == axes[0] for a in axes) else common_axis(axes)
    total = sum(float(w) * resample(d, axis).values for w, d in zip(weights, dists))
    return Dist1D(axis, total)


def component_marginal(state: PureProductState, observable: str) -> Dist1D:
    """Marginal of ``x+``, ``x-``, ``p+`` or ``p-`` for a pure product state."""
    if observable not in ("x+", "x-", "p+", "p-"):
        raise ValueError(f"observable must be one of x+, x-, p+, p-; got {observable!r}")
    var, sign = observable
    if var == "x":
        d1, d2 = state.psi1.density(), state.psi2.density()
    else:
        d1, d2 = to_momentum(state.psi1).density(), to_momentum(state.psi2).density()
    return product_pm(d1, d2, sign)


def ensemble_density(e: MixedEnsemble, observable: str) -> Dist1D:
    """``sum_m lambda_m w_m`` for the requested sum/difference observable."""
    return mixture(e.weights, [component_marginal(c, observable) for c in e.components])
