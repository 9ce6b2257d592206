"""Seeded randomized checks of the entropy-power and BBM inequalities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import bbm_sum, epi_gap
from .grid import Axis, Dist1D, Field1D, normalize

LN_PIE = 1.0 + math.log(math.pi)
VIOLATION_TOL = 1e-6

# sampling ranges for the random families
CENTER_RANGE = 3.0
SIGMA_RANGE = (0.4, 1.5)
MOMENTUM_RANGE = 2.0
MAX_COMPONENTS = 3


def check_axis(n: int = 4096) -> Axis:
    """Axis wide enough for every random density and wavefunction below."""
    half = max(CENTER_RANGE + 14 * SIGMA_RANGE[1], 6 * math.pi * SIGMA_RANGE[1])
    return Axis.symmetric(half, n + 1)


def random_mixture_density(rng: np.random.Generator, axis: Axis) -> Dist1D:
    """Normalized mixture of 1 to 3 Gaussians with random centers, widths and weights."""
    k = int(rng.integers(1, MAX_COMPONENTS + 1))
    centers = rng.uniform(-CENTER_RANGE, CENTER_RANGE, k)
    sigmas = rng.uniform(*SIGMA_RANGE, k)
    weights = rng.dirichlet(np.ones(k))
    x = axis.points[:, None]
    comps = np.exp(-0.5 * ((x - centers) / sigmas) ** 2) / (sigmas * math.sqrt(2 * math.pi))
    return normalize(Dist1D(axis, comps @ weights))


def random_wavefunction(rng: np.random.Generator, axis: Axis) -> Field1D:
    """Normalized superposition of 1 to 3 Gaussian packets with complex coefficients."""
    k = int(rng.integers(1, MAX_COMPONENTS + 1))
    centers = rng.uniform(-CENTER_RANGE, CENTER_RANGE, k)
    sigmas = rng.uniform(*SIGMA_RANGE, k)
    momenta = rng.uniform(-MOMENTUM_RANGE, MOMENTUM_RANGE, k)
    coeffs = rng.normal(size=k) + 1j * rng.normal(size=k)
    x = axis.points[:, None]
    packets = np.exp(-((x - centers) ** 2) / (4 * sigmas**2) + 1j * momenta * x) / np.sqrt(sigmas)
    return Field1D(axis, packets @ coeffs).normalized()


@dataclass(frozen=True)
class CheckSummary:
    trials: int
    seed: int
    min_epi_gap: float
    min_bbm_excess: float
    epi_violations: int
    bbm_violations: int

    @property
    def ok(self) -> bool:
        return self.epi_violations == 0 and self.bbm_violations == 0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "min_epi_gap": self.min_epi_gap,
            "min_bbm_excess": self.min_bbm_excess,
            "epi_violations": self.epi_violations,
            "bbm_violations": self.bbm_violations,
            "tolerance": VIOLATION_TOL,
            "passed": self.ok,
        }


def run_checks(trials: int, seed: int, n: int = 4096) -> CheckSummary:
    """Evaluate ``trials`` random EPI pairs and ``trials`` random BBM wavefunctions."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    axis = check_axis(n)
    gaps = []
    excesses = []
    for _ in range(trials):
        a = random_mixture_density(rng, axis)
        b = random_mixture_density(rng, axis)
        gaps.append(epi_gap(a, b))
        excesses.append(bbm_sum(random_wavefunction(rng, axis)) - LN_PIE)
    gaps = np.array(gaps)
    excesses = np.array(excesses)
    return CheckSummary(
        trials=trials,
        seed=seed,
        min_epi_gap=float(gaps.min()),
        min_bbm_excess=float(excesses.min()),
        epi_violations=int(np.sum(gaps < -VIOLATION_TOL)),
        bbm_violations=int(np.sum(excesses < -VIOLATION_TOL)),
    )
