"""Bipartite continuous-variable states and their representation changes.

Three state shapes are supported:

* :class:`PureProductState`, a separable pure state ``psi1(x1) psi2(x2)``;
* :class:`JointState`, an arbitrary two-mode amplitude on a 2D grid
  (the two-mode squeezed vacuum is the built-in entangled example);
* :class:`MixedEnsemble`, a convex combination of pure products.

Descriptors (``GaussianProduct``, ``TMSV``, ``Tabulated``, ``Ensemble``) are
the serializable recipes; :func:`build_state` turns one into sampled
amplitudes on a grid chosen from :class:`GridConfig`.

Fourier convention: ``phi(p) = (2 pi)^(-1/2) int psi(x) exp(-i p x) dx`` with
hbar = 1, evaluated by FFT on the conjugate grid ``dp = 2 pi / (n dx)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import AliasError, AxisError, ParamError, SchemaError, WeightError
from .grid import Axis, Coordinates, Field1D, Field2D

NORM_TOL = 1e-8
WEIGHT_TOL = 1e-12
ALIAS_TOL = 1e-10
# Gaussian factors are sampled out to this many standard deviations.
GAUSS_SPAN = 14.0


@dataclass(frozen=True)
class GridConfig:
    """Grid resolution used by :func:`build_state`.

    ``n`` and ``n2d`` count intervals, so axes carry ``n + 1`` samples and are
    symmetric about the origin (needed for reflection and for an FFT momentum
    axis that is itself symmetric).
    """

    n: int = 4096
    n2d: int = 512
    half_width: float | None = None

    def __post_init__(self):
        for name in ("n", "n2d"):
            val = getattr(self, name)
            if val < 16 or val & (val - 1):
                raise ParamError(f"{name} must be a power of two >= 16, got {val}")
        if self.half_width is not None and not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ParamError("half_width must be positive and finite")


# --------------------------------------------------------------------------
# sampled states


@dataclass(frozen=True)
class PureProductState:
    psi1: Field1D
    psi2: Field1D

    def __post_init__(self):
        for name in ("psi1", "psi2"):
            nrm = getattr(self, name).norm()
            if abs(nrm - 1.0) > NORM_TOL:
                raise ParamError(f"{name} is not normalized (norm {nrm:.12g})")

    def joint(self) -> "JointState":
        amp = np.outer(self.psi1.values, self.psi2.values)
        return JointState(Field2D((self.psi1.axis, self.psi2.axis), amp, Coordinates.X1X2))


@dataclass(frozen=True)
class JointState:
    amplitude: Field2D

    def __post_init__(self):
        nrm = self.amplitude.norm()
        tol = NORM_TOL if self.amplitude.coords in (Coordinates.X1X2, Coordinates.P1P2) else 1e-6
        if abs(nrm - 1.0) > tol:
            raise ParamError(f"joint amplitude is not normalized (norm {nrm:.12g})")

    @property
    def coords(self) -> Coordinates:
        return self.amplitude.coords


@dataclass(frozen=True)
class MixedEnsemble:
    weights: tuple[float, ...]
    components: tuple[PureProductState, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "components", tuple(self.components))
        check_weights(self.weights)
        if len(self.weights) != len(self.components):
            raise WeightError("one weight per component is required")


def check_weights(weights) -> None:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise WeightError("weights must be a non-empty list")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise WeightError(f"weights must be finite and nonnegative: {list(w)}")
    if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
        raise WeightError(f"weights sum to {math.fsum(w)!r}, not 1")


State = Union[PureProductState, JointState, MixedEnsemble]


# --------------------------------------------------------------------------
# builders


def _check_finite(**params) -> None:
    for name, val in params.items():
        if not isinstance(val, (int, float, np.floating, np.integer)) or not math.isfinite(val):
            raise ParamError(f"{name} must be a finite real number, got {val!r}")


def gaussian_wavefunction(axis: Axis, sigma: float, center: float = 0.0, momentum: float = 0.0) -> Field1D:
    """Minimum-uncertainty packet with position variance ``sigma**2``."""
    _check_finite(sigma=sigma, center=center, momentum=momentum)
    if sigma <= 0:
        raise ParamError(f"sigma must be positive, got {sigma}")
    x = axis.points
    amp = (2 * math.pi * sigma**2) ** -0.25 * np.exp(
        -((x - center) ** 2) / (4 * sigma**2) + 1j * momentum * x
    )
    return Field1D(axis, amp)


def gaussian_half_width(sigma: float, center: float = 0.0) -> float:
    """Half-width that holds the packet and resolves its momentum image.

    The conjugate momentum step is about ``pi / L``; requiring it to be at most
    a third of the momentum width ``1/(2 sigma)`` gives ``L >= 6 pi sigma``.
    """
    return max(abs(center) + GAUSS_SPAN * sigma, 6 * math.pi * sigma)


def build_gaussian_product(
    sigma1: float,
    sigma2: float,
    centers: tuple[float, float] = (0.0, 0.0),
    momenta: tuple[float, float] = (0.0, 0.0),
    axis: Axis | None = None,
    n: int = 4096,
) -> PureProductState:
    """Product of two minimum-uncertainty Gaussians on a shared symmetric axis."""
    _check_finite(sigma1=sigma1, sigma2=sigma2, center1=centers[0], center2=centers[1],
                  momentum1=momenta[0], momentum2=momenta[1])
    if sigma1 <= 0 or sigma2 <= 0:
        raise ParamError(f"widths must be positive, got sigma1={sigma1}, sigma2={sigma2}")
    if axis is None:
        half = max(gaussian_half_width(s, c) for s, c in zip((sigma1, sigma2), centers))
        axis = Axis.symmetric(half, n + 1)
    psi1 = gaussian_wavefunction(axis, sigma1, centers[0], momenta[0]).normalized()
    psi2 = gaussian_wavefunction(axis, sigma2, centers[1], momenta[1]).normalized()
    _check_momentum_fits(psi1, momenta[0], sigma1)
    _check_momentum_fits(psi2, momenta[1], sigma2)
    return PureProductState(psi1, psi2)


def _check_momentum_fits(psi: Field1D, momentum: float, sigma: float) -> None:
    p_max = math.pi / psi.axis.step
    if abs(momentum) + GAUSS_SPAN / (2 * sigma) > p_max:
        raise ParamError(
            f"grid step {psi.axis.step:.4g} too coarse for momentum {momentum} and width {sigma}"
        )


def tmsv_amplitude(x1: np.ndarray, x2: np.ndarray, r: float) -> np.ndarray:
    """Two-mode squeezed vacuum; Var(x1 + x2) = e^{2r}, Var(x1 - x2) = e^{-2r}."""
    plus = x1 + x2
    minus = x1 - x2
    return math.pi**-0.5 * np.exp(-math.exp(-2 * r) * plus**2 / 4 - math.exp(2 * r) * minus**2 / 4)


def build_tmsv(r: float, n: int = 512, half_width: float | None = None) -> JointState:
    """Two-mode squeezed vacuum on an ``(n+1) x (n+1)`` grid in (x1, x2).

    The resolution is raised (up to 4096 intervals) when the narrow
    quadrature ``e^{-|r|}`` would be sampled by fewer than three points per
    standard deviation.
    """
    _check_finite(r=r)
    sigma_single = math.sqrt(math.cosh(2 * r) / 2)
    sigma_narrow = math.exp(-abs(r))
    half = half_width if half_width is not None else GAUSS_SPAN * sigma_single
    while 2 * half / n > sigma_narrow / 3:
        n *= 2
        if n > 4096:
            raise ParamError(f"squeezing r={r} needs a grid finer than 4096 x 4096")
    axis = Axis.symmetric(half, n + 1)
    x = axis.points
    amp = tmsv_amplitude(x[:, None], x[None, :], r)
    field2 = Field2D((axis, axis), amp, Coordinates.X1X2).normalized()
    return JointState(field2)


# --------------------------------------------------------------------------
# transforms


def _conjugate_axis(axis: Axis) -> tuple[Axis, int]:
    n = axis.n
    dp = 2 * math.pi / (n * axis.step)
    c = n // 2
    return Axis(-c * dp, (n - 1 - c) * dp, n), c


def _dft(values: np.ndarray, axis: Axis, along: int) -> tuple[np.ndarray, Axis]:
    n = axis.n
    paxis, c = _conjugate_axis(axis)
    shape = [1] * values.ndim
    shape[along] = n
    j = np.arange(n).reshape(shape)
    twisted = values * np.exp(2j * math.pi * c * j / n)
    spectrum = np.fft.fft(twisted, axis=along)
    p = paxis.points.reshape(shape)
    spectrum = spectrum * (axis.step / math.sqrt(2 * math.pi)) * np.exp(-1j * p * axis.min)
    return spectrum, paxis


def _check_alias(values: np.ndarray, tol: float) -> None:
    edges = [values[0], values[-1]] if values.ndim == 1 else [
        values[0, :], values[-1, :], values[:, 0], values[:, -1]]
    worst = max(float(np.max(np.abs(e))) for e in edges)
    if worst > tol:
        raise AliasError(f"momentum amplitude {worst:.3g} at the grid edge exceeds {tol:g}; refine the position grid")


def to_momentum(f: Field1D, tol: float = ALIAS_TOL) -> Field1D:
    """Unitary Fourier transform onto the conjugate momentum axis."""
    spectrum, paxis = _dft(f.values, f.axis, 0)
    _check_alias(spectrum, tol)
    return Field1D(paxis, spectrum)


def to_momentum_2d(j: JointState, tol: float = ALIAS_TOL) -> JointState:
    """Joint momentum amplitude phi(p1, p2) of a state given in (x1, x2)."""
    if j.coords is not Coordinates.X1X2:
        raise AxisError(f"to_momentum_2d needs (x1, x2) coordinates, got {j.coords.value}")
    a0, a1 = j.amplitude.axes
    spectrum, p0 = _dft(j.amplitude.values, a0, 0)
    spectrum, p1 = _dft(spectrum, a1, 1)
    _check_alias(spectrum, tol)
    return JointState(Field2D((p0, p1), spectrum, Coordinates.P1P2))


_PM_OF = {Coordinates.X1X2: Coordinates.XPM, Coordinates.P1P2: Coordinates.PPM, Coordinates.K1K2: Coordinates.KPM}


def to_pm(j: JointState, step: float | None = None, edge_tol: float = 1e-8) -> JointState:
    """Resample ``Psi(x1, x2)`` onto ``(x+, x-)`` with the ``1/sqrt 2`` Jacobian factor.

    The target grid is the bounding box of the image of the source square.
    By default its step is twice the source step, which on odd-sized grids
    places every target node exactly on a source node; other steps use
    bilinear interpolation followed by renormalization. Target nodes outside the source square are set to
    zero, which is only legitimate when the source amplitude has decayed at
    its boundary; otherwise :class:`AxisError` is raised.
    """
    if j.coords not in _PM_OF:
        raise AxisError(f"to_pm needs (x1, x2)-type coordinates, got {j.coords.value}")
    a, b = j.amplitude.axes
    if not a.same_step(b):
        raise AxisError("to_pm needs equal steps on both axes")
    vals = j.amplitude.values
    _check_edges(vals, edge_tol)
    h = a.step
    step = 2 * h if step is None else float(step)
    lo_p, hi_p = a.min + b.min, a.max + b.max
    lo_m, hi_m = a.min - b.max, a.max - b.min
    n_p = int(round((hi_p - lo_p) / step)) + 1
    n_m = int(round((hi_m - lo_m) / step)) + 1
    ax_p = Axis.from_step(lo_p, step, n_p)
    ax_m = Axis.from_step(lo_m, step, n_m)
    xp, xm = np.meshgrid(ax_p.points, ax_m.points, indexing="ij")
    x1 = 0.5 * (xp + xm)
    x2 = 0.5 * (xp - xm)
    interp = RegularGridInterpolator((a.points, b.points), vals, method="linear",
                                     bounds_error=False, fill_value=0.0)
    # snap to source nodes to avoid spurious interpolation from rounding
    i1 = (x1 - a.min) / h
    i2 = (x2 - b.min) / h
    x1 = np.where(np.abs(i1 - np.round(i1)) < 1e-9, a.min + np.round(i1) * h, x1)
    x2 = np.where(np.abs(i2 - np.round(i2)) < 1e-9, b.min + np.round(i2) * h, x2)
    out = interp(np.stack([x1.ravel(), x2.ravel()], axis=-1)).reshape(x1.shape) / math.sqrt(2)
    # bilinear interpolation loses O(h^2) of the mass off-node; restore it
    return JointState(Field2D((ax_p, ax_m), out, _PM_OF[j.coords]).normalized())


def _check_edges(vals: np.ndarray, tol: float) -> None:
    peak = float(np.max(np.abs(vals)))
    edge = max(float(np.max(np.abs(e))) for e in (vals[0], vals[-1], vals[:, 0], vals[:, -1]))
    if edge > tol * peak:
        raise AxisError(
            f"source amplitude {edge:.3g} at the grid boundary; resampling would extrapolate"
        )


# --------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class GaussianProduct:
    sigma1: float
    sigma2: float
    center1: float = 0.0
    center2: float = 0.0
    momentum1: float = 0.0
    momentum2: float = 0.0

    def __post_init__(self):
        _check_finite(sigma1=self.sigma1, sigma2=self.sigma2, center1=self.center1,
                      center2=self.center2, momentum1=self.momentum1, momentum2=self.momentum2)
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ParamError("sigma1 and sigma2 must be positive")

    def to_dict(self) -> dict:
        return {"type": "gaussian_product", "sigma1": self.sigma1, "sigma2": self.sigma2,
                "center1": self.center1, "center2": self.center2,
                "momentum1": self.momentum1, "momentum2": self.momentum2}


@dataclass(frozen=True)
class TMSV:
    r: float

    def __post_init__(self):
        _check_finite(r=self.r)

    def to_dict(self) -> dict:
        return {"type": "tmsv", "r": self.r}


@dataclass(frozen=True)
class Tabulated:
    """Sampled amplitudes: either two factors or one joint array on ``axis x axis``."""

    axis: Axis
    psi1: np.ndarray | None = None
    psi2: np.ndarray | None = None
    joint: np.ndarray | None = None

    def __post_init__(self):
        factors = self.psi1 is not None and self.psi2 is not None
        if factors == (self.joint is not None):
            raise SchemaError("tabulated state needs either psi1 and psi2, or joint")
        for name in ("psi1", "psi2", "joint"):
            val = getattr(self, name)
            if val is None:
                continue
            arr = np.array(val, dtype=complex)
            want = (self.axis.n,) if name != "joint" else (self.axis.n, self.axis.n)
            if arr.shape != want:
                raise SchemaError(f"{name} must have shape {want}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ParamError(f"{name} has non-finite samples")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def is_product(self) -> bool:
        return self.joint is None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"type": "tabulated",
                               "axis": {"min": self.axis.min, "max": self.axis.max, "n": self.axis.n}}
        for name in ("psi1", "psi2", "joint"):
            val = getattr(self, name)
            if val is not None:
                out[name] = {"re": val.real.tolist(), "im": val.imag.tolist()}
        return out


@dataclass(frozen=True)
class Ensemble:
    weights: tuple[float, ...]
    components: tuple[Union[GaussianProduct, Tabulated], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.weights) != len(self.components):
            raise SchemaError("ensemble needs exactly one weight per component")
        try:
            check_weights(self.weights)
        except WeightError as exc:
            raise SchemaError(str(exc)) from exc
        for c in self.components:
            if not (isinstance(c, GaussianProduct) or (isinstance(c, Tabulated) and c.is_product)):
                raise SchemaError("ensemble components must be pure product states")

    def to_dict(self) -> dict:
        return {"type": "ensemble", "weights": list(self.weights),
                "components": [c.to_dict() for c in self.components]}


StateDescriptor = Union[GaussianProduct, TMSV, Tabulated, Ensemble]

_ALLOWED_KEYS = {
    "gaussian_product": {"type", "sigma1", "sigma2", "center1", "center2", "momentum1", "momentum2"},
    "tmsv": {"type", "r"},
    "tabulated": {"type", "axis", "psi1", "psi2", "joint"},
    "ensemble": {"type", "weights", "components"},
}


def _number(doc: Mapping, key: str, default: float | None = None) -> float:
    if key not in doc:
        if default is None:
            raise SchemaError(f"missing required field {key!r}")
        return default
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise SchemaError(f"field {key!r} must be a number, got {val!r}")
    return float(val)


def _complex_samples(doc: Any, name: str) -> np.ndarray:
    if isinstance(doc, Mapping):
        if "re" not in doc:
            raise SchemaError(f"{name} needs an 're' array")
        try:
            re = np.asarray(doc["re"], dtype=float)
            im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{name} samples must be numeric arrays") from exc
        if re.shape != im.shape:
            raise SchemaError(f"{name}: 're' and 'im' shapes differ")
        return re + 1j * im
    try:
        return np.asarray(doc, dtype=float).astype(complex)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{name} samples must be numeric arrays") from exc


def descriptor_from_mapping(doc: Any) -> StateDescriptor:
    if not isinstance(doc, Mapping):
        raise SchemaError("state descriptor must be a JSON object")
    kind = doc.get("type")
    if kind not in _ALLOWED_KEYS:
        raise SchemaError(f"unknown or missing state type {kind!r}")
    extra = set(doc) - _ALLOWED_KEYS[kind]
    if extra:
        raise SchemaError(f"unexpected fields for {kind}: {sorted(extra)}")
    if kind == "gaussian_product":
        return GaussianProduct(
            _number(doc, "sigma1"), _number(doc, "sigma2"),
            _number(doc, "center1", 0.0), _number(doc, "center2", 0.0),
            _number(doc, "momentum1", 0.0), _number(doc, "momentum2", 0.0),
        )
    if kind == "tmsv":
        return TMSV(_number(doc, "r"))
    if kind == "tabulated":
        ax = doc.get("axis")
        if not isinstance(ax, Mapping):
            raise SchemaError("tabulated state needs an 'axis' object")
        n = ax.get("n")
        if isinstance(n, bool) or not isinstance(n, int):
            raise SchemaError("axis.n must be an integer")
        try:
            axis = Axis(_number(ax, "min"), _number(ax, "max"), n)
        except AxisError as exc:
            raise SchemaError(str(exc)) from exc
        arrays = {k: _complex_samples(doc[k], k) for k in ("psi1", "psi2", "joint") if k in doc}
        return Tabulated(axis, **arrays)
    weights = doc.get("weights")
    comps = doc.get("components")
    if not isinstance(weights, list) or not isinstance(comps, list):
        raise SchemaError("ensemble needs 'weights' and 'components' lists")
    if any(isinstance(w, bool) or not isinstance(w, (int, float)) for w in weights):
        raise SchemaError("ensemble weights must be numbers")
    return Ensemble(tuple(weights), tuple(descriptor_from_mapping(c) for c in comps))


def parse_descriptor(text: str | bytes | Mapping) -> StateDescriptor:
    """Parse and validate a JSON state descriptor."""
    if isinstance(text, Mapping):
        return descriptor_from_mapping(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return descriptor_from_mapping(doc)


def _tabulated_product(t: Tabulated) -> PureProductState:
    psi1 = Field1D(t.axis, t.psi1).normalized()
    psi2 = Field1D(t.axis, t.psi2).normalized()
    return PureProductState(psi1, psi2)


def build_state(desc: StateDescriptor, config: GridConfig = GridConfig()) -> State:
    """Sample the state a descriptor describes."""
    if isinstance(desc, GaussianProduct):
        axis = None
        if config.half_width is not None:
            axis = Axis.symmetric(config.half_width, config.n + 1)
        return build_gaussian_product(desc.sigma1, desc.sigma2, (desc.center1, desc.center2),
                                      (desc.momentum1, desc.momentum2), axis=axis, n=config.n)
    if isinstance(desc, TMSV):
        return build_tmsv(desc.r, n=config.n2d, half_width=config.half_width)
    if isinstance(desc, Tabulated):
        if desc.is_product:
            return _tabulated_product(desc)
        field2 = Field2D((desc.axis, desc.axis), desc.joint, Coordinates.X1X2).normalized()
        return JointState(field2)
    gaussians = [c for c in desc.components if isinstance(c, GaussianProduct)]
    axis = None
    if config.half_width is not None:
        axis = Axis.symmetric(config.half_width, config.n + 1)
    elif gaussians:
        half = max(gaussian_half_width(s, c) for g in gaussians
                   for s, c in ((g.sigma1, g.center1), (g.sigma2, g.center2)))
        axis = Axis.symmetric(half, config.n + 1)
    comps = []
    for c in desc.components:
        if isinstance(c, GaussianProduct):
            comps.append(build_gaussian_product(c.sigma1, c.sigma2, (c.center1, c.center2),
                                                (c.momentum1, c.momentum2), axis=axis, n=config.n))
        else:
            comps.append(_tabulated_product(c))
    return MixedEnsemble(desc.weights, tuple(comps))
