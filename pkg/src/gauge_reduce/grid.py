"""Flat periodic base grids and smooth random fields on them.

The base manifold is a flat torus: ``shape[i]`` nodes along axis ``i`` with
uniform spacing ``dx`` and periodic wraparound.  All derivatives in the
package are second-order central differences, so any residual that involves
a derivative scales like ``dx**2``.

Random test fields are truncated Fourier series with seed-derived
coefficients.  The coefficients depend only on the seed and the mode
cutoff, never on the grid shape, so the same continuum field can be
sampled at several resolutions for convergence studies.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionError

__all__ = ["BaseGrid", "build_grid", "fourier_scalar", "FourierCoefficients"]


@dataclass(frozen=True)
class BaseGrid:
    """Periodic node lattice over [0, L_i) per axis, L_i = shape[i] * dx."""

    dim: int
    shape: tuple[int, ...]
    dx: float

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        if self.dim != len(self.shape):
            raise DimensionError("shape must have one entry per dimension")
        if self.dim not in (1, 2, 3, 4):
            raise DimensionError("dimension must be between 1 and 4")
        if any(s < 4 for s in self.shape):
            raise DimensionError("every axis needs at least 4 nodes")
        if not self.dx > 0:
            raise DimensionError("dx must be positive")

    @property
    def periods(self) -> tuple[float, ...]:
        return tuple(s * self.dx for s in self.shape)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    def coordinates(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcast to the grid shape."""
        axes = [np.arange(s) * self.dx for s in self.shape]
        return list(np.meshgrid(*axes, indexing="ij"))

    def derivative(self, field: np.ndarray, axis: int) -> np.ndarray:
        """Central difference along a base axis; trailing axes ride along."""
        if not 0 <= axis < self.dim:
            raise DimensionError(f"axis {axis} out of range for dim {self.dim}")
        return (np.roll(field, -1, axis=axis) - np.roll(field, 1, axis=axis)) / (2.0 * self.dx)

    def gradient(self, field: np.ndarray) -> np.ndarray:
        """Stack of central differences; the new direction axis follows the grid axes."""
        grads = [self.derivative(field, a) for a in range(self.dim)]
        return np.stack(grads, axis=self.dim)


def build_grid(dim: int, shape, dx: float) -> BaseGrid:
    """Construct a periodic grid (the only supported base geometry)."""
    return BaseGrid(dim=int(dim), shape=tuple(shape), dx=float(dx))


@dataclass(frozen=True)
class FourierCoefficients:
    """Grid-independent coefficients of one truncated Fourier series."""

    modes: tuple[tuple[int, ...], ...]
    cos: np.ndarray
    sin: np.ndarray

    def evaluate(self, grid: BaseGrid) -> np.ndarray:
        coords = grid.coordinates()
        periods = grid.periods
        out = np.zeros(grid.shape)
        for m, (mode) in enumerate(self.modes):
            phase = np.zeros(grid.shape)
            for a, k in enumerate(mode):
                phase = phase + 2.0 * np.pi * k * coords[a] / periods[a]
            out += self.cos[m] * np.cos(phase) + self.sin[m] * np.sin(phase)
        return out


def _mode_list(dim: int, kmax: int) -> tuple[tuple[int, ...], ...]:
    modes = []
    for mode in product(range(-kmax, kmax + 1), repeat=dim):
        if all(k == 0 for k in mode):
            continue
        # keep one representative of each +-k pair
        for k in mode:
            if k != 0:
                if k > 0:
                    modes.append(mode)
                break
    return tuple(modes)


def fourier_scalar(
    dim: int, rng: np.random.Generator, amplitude: float, kmax: int = 2
) -> FourierCoefficients:
    """Draw a smooth random scalar with RMS amplitude roughly ``amplitude``.

    Mode weights decay like 1/|k|^2 and the total is normalized so the field
    stays O(amplitude) regardless of dimension or cutoff.
    """
    modes = _mode_list(dim, kmax)
    weights = np.array([1.0 / (1.0 + float(sum(k * k for k in m))) for m in modes])
    weights /= np.sqrt(np.sum(weights**2))
    cos = rng.normal(size=len(modes)) * weights * amplitude
    sin = rng.normal(size=len(modes)) * weights * amplitude
    return FourierCoefficients(modes=modes, cos=cos, sin=sin)
