"""Sampled storage of coset-bundle connection coefficients.

Stores coefficient values on the product of the base grid and a rectangular
sample grid in coset coordinates, with multilinear interpolation between
samples.  Because the package's sigma-connections are affine in the coset
coordinates, multilinear interpolation reproduces them exactly, so the
sampled container participates in the algebraic identity checks without an
interpolation-error budget.  Intended for the low-dimensional coset models
(ambient dimension 3); the 10-dimensional frame model keeps the affine
storage, whose sample count would be impractical.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .composite import SigmaConnection
from .errors import DimensionError

__all__ = ["SampledSigmaConnection", "sample_box"]


def sample_box(lo, hi, counts) -> list[np.ndarray]:
    return [np.linspace(l, h, c) for l, h, c in zip(lo, hi, counts)]


@dataclass(frozen=True)
class SampledSigmaConnection:
    """Coefficients tabulated on base-grid x coset-sample-grid nodes."""

    model: "object"
    atlas_tag: str
    axes: tuple[np.ndarray, ...]  # per coset coordinate, strictly increasing
    ax_samples: np.ndarray  # (*grid.shape, *samples, dim, nh)
    am_samples: np.ndarray  # (*grid.shape, *samples, m, nh)

    @classmethod
    def from_affine(cls, sc: SigmaConnection, axes: list[np.ndarray]) -> "SampledSigmaConnection":
        m = sc.model.coset_dim
        if len(axes) != m:
            raise DimensionError("need one sample axis per coset coordinate")
        counts = tuple(len(a) for a in axes)
        base_shape = sc.ax0.shape[:-2]
        ax = np.zeros(base_shape + counts + sc.ax0.shape[-2:])
        am = np.zeros(base_shape + counts + sc.am0.shape[-2:])
        for idx in product(*(range(c) for c in counts)):
            sigma = np.array([axes[k][idx[k]] for k in range(m)])
            sel = (...,) + idx + (slice(None), slice(None))
            ax[(Ellipsis,) + idx] = sc.eval_x(sigma)
            am[(Ellipsis,) + idx] = sc.eval_m(sigma)
        return cls(sc.model, sc.atlas_tag, tuple(axes), ax, am)

    def _weights(self, sigma: np.ndarray):
        """Per-axis cell index and fractional position for one point."""
        cells, fracs = [], []
        for k, axis in enumerate(self.axes):
            x = float(sigma[k])
            i = int(np.clip(np.searchsorted(axis, x) - 1, 0, len(axis) - 2))
            t = (x - axis[i]) / (axis[i + 1] - axis[i])
            cells.append(i)
            fracs.append(t)
        return cells, fracs

    def _interp(self, table: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        cells, fracs = self._weights(np.asarray(sigma, dtype=float))
        m = len(self.axes)
        out = None
        for corner in product((0, 1), repeat=m):
            w = 1.0
            for k, c in enumerate(corner):
                w *= fracs[k] if c else (1.0 - fracs[k])
            idx = tuple(cells[k] + corner[k] for k in range(m))
            val = table[(Ellipsis,) + idx + (slice(None), slice(None))]
            out = w * val if out is None else out + w * val
        return out

    def eval_x(self, sigma: np.ndarray) -> np.ndarray:
        return self._interp(self.ax_samples, sigma)

    def eval_m(self, sigma: np.ndarray) -> np.ndarray:
        return self._interp(self.am_samples, sigma)

    def sigma_smoothness(self) -> float:
        """Largest per-step jump of the tabulated coefficients along sigma axes."""
        worst = 0.0
        base_ndim = self.ax_samples.ndim - len(self.axes) - 2
        for table in (self.ax_samples, self.am_samples):
            for k in range(len(self.axes)):
                ax = base_ndim + k
                jump = np.abs(np.diff(table, axis=ax))
                worst = max(worst, float(jump.max()))
        return worst
