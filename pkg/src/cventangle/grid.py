"""Uniform-grid wavefunctions and densities.

Every sampled object carries its own :class:`Axis` (or pair of axes) so that
quadrature, transforms and resampling never need out-of-band metadata.
Values are stored as read-only numpy arrays; operations return new objects.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisError, MassError

MIN_POINTS = 16


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Axis:
    """Uniform sampling ``x_i = min + i * step`` for ``i = 0 .. n-1``."""

    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise AxisError("axis bounds must be finite")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise AxisError(f"axis needs an integer n >= {MIN_POINTS}, got {self.n}")
        if not self.max > self.min:
            raise AxisError("axis max must exceed min")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "Axis":
        return cls(-float(half_width), float(half_width), n)

    @classmethod
    def from_step(cls, start: float, step: float, n: int) -> "Axis":
        """Axis whose step is exactly ``step`` up to rounding of ``max``."""
        return cls(start, start + step * (n - 1), n)

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.min + np.arange(self.n) * self.step

    @property
    def is_symmetric(self) -> bool:
        return math.isclose(self.min, -self.max, rel_tol=0.0, abs_tol=1e-12 * self.max)

    def same_step(self, other: "Axis", rtol: float = 1e-9) -> bool:
        return math.isclose(self.step, other.step, rel_tol=rtol)


class Coordinates(str, enum.Enum):
    """Which pair of variables a two-dimensional object is sampled over."""

    X1X2 = "x1x2"
    XPM = "xpm"
    P1P2 = "p1p2"
    PPM = "ppm"
    K1K2 = "k1k2"
    KPM = "kpm"


@dataclass(frozen=True)
class Field1D:
    axis: Axis
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, complex)
        if vals.shape != (self.axis.n,):
            raise AxisError(f"expected {self.axis.n} samples, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    def density(self) -> "Dist1D":
        return Dist1D(self.axis, np.abs(self.values) ** 2)

    def norm(self) -> float:
        """Squared L2 norm by trapezoid quadrature."""
        return integrate(self.density())

    def normalized(self) -> "Field1D":
        mass = self.norm()
        if not (math.isfinite(mass) and mass > 0):
            raise MassError(f"cannot normalize a field with norm {mass!r}")
        return Field1D(self.axis, self.values / math.sqrt(mass))


@dataclass(frozen=True)
class Dist1D:
    axis: Axis
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, float)
        if vals.shape != (self.axis.n,):
            raise AxisError(f"expected {self.axis.n} samples, got shape {vals.shape}")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise MassError("density values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)

    def moment(self, order: int, center: float = 0.0) -> float:
        x = self.axis.points - center
        return float(_trapz(x**order * self.values, self.axis.step))

    def mean(self) -> float:
        return self.moment(1)

    def variance(self) -> float:
        mu = self.mean()
        return self.moment(2, mu)


@dataclass(frozen=True)
class Field2D:
    """Amplitude on ``axes[0] x axes[1]``; ``values[i, j]`` sits at ``(a_i, b_j)``."""

    axes: tuple[Axis, Axis]
    values: np.ndarray
    coords: Coordinates = Coordinates.X1X2

    def __post_init__(self):
        vals = _frozen(self.values, complex)
        shape = (self.axes[0].n, self.axes[1].n)
        if vals.shape != shape:
            raise AxisError(f"expected shape {shape}, got {vals.shape}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "coords", Coordinates(self.coords))

    def density(self) -> "Dist2D":
        return Dist2D(self.axes, np.abs(self.values) ** 2, self.coords)

    def norm(self) -> float:
        return integrate2d(self.density())

    def normalized(self) -> "Field2D":
        mass = self.norm()
        if not (math.isfinite(mass) and mass > 0):
            raise MassError(f"cannot normalize a field with norm {mass!r}")
        return Field2D(self.axes, self.values / math.sqrt(mass), self.coords)


@dataclass(frozen=True)
class Dist2D:
    axes: tuple[Axis, Axis]
    values: np.ndarray
    coords: Coordinates = Coordinates.X1X2

    def __post_init__(self):
        vals = _frozen(self.values, float)
        shape = (self.axes[0].n, self.axes[1].n)
        if vals.shape != shape:
            raise AxisError(f"expected shape {shape}, got {vals.shape}")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise MassError("density values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "coords", Coordinates(self.coords))

    def marginal(self, index: int) -> Dist1D:
        """Density of the variable on ``axes[index]`` (the other one integrated out)."""
        other = 1 - index
        vals = _trapz(self.values, self.axes[other].step, axis=other)
        return Dist1D(self.axes[index], np.clip(vals, 0.0, None))


def _trapz(values: np.ndarray, step: float, axis: int = -1) -> np.ndarray | float:
    values = np.asarray(values)
    first = np.take(values, 0, axis=axis)
    last = np.take(values, -1, axis=axis)
    return step * (values.sum(axis=axis) - 0.5 * (first + last))


def integrate(d: Dist1D, integrand: np.ndarray | None = None) -> float:
    """Composite trapezoid integral of ``d`` (or of ``integrand`` on ``d.axis``)."""
    vals = d.values if integrand is None else np.asarray(integrand)
    return float(_trapz(vals, d.axis.step))


def integrate2d(d: Dist2D) -> float:
    inner = _trapz(d.values, d.axes[1].step, axis=1)
    return float(_trapz(inner, d.axes[0].step))


def normalize(d: Dist1D) -> Dist1D:
    mass = integrate(d)
    if not (math.isfinite(mass) and mass > 0):
        raise MassError(f"cannot normalize a density with integral {mass!r}")
    return Dist1D(d.axis, d.values / mass)


def normalize2d(d: Dist2D) -> Dist2D:
    mass = integrate2d(d)
    if not (math.isfinite(mass) and mass > 0):
        raise MassError(f"cannot normalize a density with integral {mass!r}")
    return Dist2D(d.axes, d.values / mass, d.coords)


def reflect(d: Dist1D) -> Dist1D:
    """Mirror image ``d(-x)`` on the same (symmetric) axis."""
    if not d.axis.is_symmetric:
        raise AxisError(f"reflect needs an axis symmetric about 0, got [{d.axis.min}, {d.axis.max}]")
    return Dist1D(d.axis, d.values[::-1])


def reflect_field(f: Field1D) -> Field1D:
    if not f.axis.is_symmetric:
        raise AxisError("reflect needs an axis symmetric about 0")
    return Field1D(f.axis, f.values[::-1])


def tabulate(axis: Axis, func) -> Dist1D:
    """Sample a nonnegative callable on ``axis``."""
    return Dist1D(axis, func(axis.points))


def gaussian_density(axis: Axis, sigma: float, center: float = 0.0) -> Dist1D:
    x = axis.points
    vals = np.exp(-0.5 * ((x - center) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return Dist1D(axis, vals)
