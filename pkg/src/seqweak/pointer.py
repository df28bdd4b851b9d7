"""Discretized one-dimensional Gaussian pointer wavefunctions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GridSupportError

DEFAULT_SPACING = 20.0  # µm
DEFAULT_COUNT = 512


@dataclass(frozen=True)
class PointerGrid:
    """Uniform grid of ``count`` points centred on ``origin`` (µm).

    Points sit at half-integer offsets so that the grid is symmetric about
    its centre for any ``count``.
    """

    spacing: float = DEFAULT_SPACING
    count: int = DEFAULT_COUNT
    origin: float = 0.0

    def __post_init__(self):
        if self.count < 16:
            raise ConfigurationError(f"grid count must be >= 16, got {self.count}")
        if not self.spacing > 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.spacing}")

    @property
    def extent(self) -> float:
        return self.count * self.spacing

    @property
    def points(self) -> np.ndarray:
        return self.origin + (np.arange(self.count) - (self.count - 1) / 2.0) * self.spacing

    def steps_for(self, shift: float) -> int:
        """Integer number of grid steps equal to ``shift``; raises if not integral."""
        ratio = shift / self.spacing
        steps = int(round(ratio))
        if abs(ratio - steps) > 1e-9:
            raise GridSupportError(
                f"shift {shift} µm is not an integer multiple of spacing {self.spacing} µm"
            )
        return steps


@dataclass(frozen=True, eq=False)
class PointerWavefunction:
    grid: PointerGrid
    samples: np.ndarray
    leakage: float = 0.0

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.samples, self.samples).real)


def gaussian_samples(grid: PointerGrid, sigma: float) -> np.ndarray:
    """Normalized samples of ``(2πσ²)^(-1/4) exp(-x²/4σ²)`` (so ``|ψ|²`` has std σ)."""
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    if grid.extent < 8.0 * sigma:
        raise GridSupportError(
            f"grid extent {grid.extent} µm < 8σ = {8.0 * sigma} µm"
        )
    x = grid.points - grid.origin
    psi = np.exp(-(x**2) / (4.0 * sigma**2))
    return psi / np.sqrt(np.sum(psi**2))


def gaussian_wavefunction(grid: PointerGrid, sigma: float) -> PointerWavefunction:
    return PointerWavefunction(grid, gaussian_samples(grid, sigma).astype(complex))


def translate(wf: PointerWavefunction, steps: int) -> PointerWavefunction:
    """Shift by ``steps`` grid points towards +x, zero-filling; off-grid mass is leakage."""
    n = wf.grid.count
    if abs(steps) >= n:
        raise GridSupportError(f"shift of {steps} steps leaves the {n}-point grid")
    src = wf.samples
    out = np.zeros_like(src)
    if steps > 0:
        out[steps:] = src[:-steps]
        lost = src[-steps:]
    elif steps < 0:
        out[:steps] = src[-steps:]
        lost = src[:-steps]
    else:
        out[:] = src
        lost = src[:0]
    leak = float(np.vdot(lost, lost).real)
    return PointerWavefunction(wf.grid, out, wf.leakage + leak)


def position_moment(wf: PointerWavefunction, power: int) -> float:
    if power not in (0, 1, 2):
        raise ConfigurationError(f"moment power must be 0, 1 or 2, got {power}")
    prob = np.abs(wf.samples) ** 2
    return float(np.sum(wf.grid.points**power * prob))
