"""Seeded generation of smooth random test inputs.

Everything here is a truncated Fourier series in the base coordinates with
coefficients drawn from a caller-supplied generator, so a fixed seed gives
the same continuum object at every resolution; amplitudes are kept small
enough that coset-valued fields stay inside one section chart and all
dx^2 residual constants stay within their pinned tolerances.

For the frame model, random metric-like fields are built as
``Q(x) D(x) Q(x)^T`` with a smooth rotation ``Q`` close to the identity and
diagonal ``D`` confined to separated bands.  This keeps the eigenvalue
order fixed across the grid, so the canonical eigenframe section varies
smoothly and finite differences of the section gauge converge at second
order (eigenvalue crossings would break differentiability).
"""

from __future__ import annotations

import numpy as np

from .atlas import Atlas, atlas_from_gauges, three_arc_masks, trivial_atlas
from .connection import ConnectionField
from .fields import EquivariantFunction, HiggsField, MatterField
from .grid import BaseGrid, fourier_scalar
from .groups import GroupModel, expm_field

__all__ = [
    "smooth_scalar",
    "smooth_algebra_coeffs",
    "smooth_group_field",
    "smooth_subgroup_field",
    "random_higgs_values",
    "random_higgs",
    "random_matter",
    "random_connection",
    "random_equivariant",
    "make_bundle",
]


def smooth_scalar(grid: BaseGrid, rng: np.random.Generator, amplitude: float, kmax: int = 2):
    return fourier_scalar(grid.dim, rng, amplitude, kmax).evaluate(grid)


def _model_kmax(model: GroupModel) -> int:
    # the eigenframe section of the frame model has large higher derivatives;
    # gentler fields keep its dx^2 constants inside the pinned tolerances
    return 1 if model.name == "GL4_SO13" else 2


def smooth_algebra_coeffs(
    model: GroupModel, grid: BaseGrid, rng: np.random.Generator, amplitude: float
) -> np.ndarray:
    kmax = _model_kmax(model)
    cols = [smooth_scalar(grid, rng, amplitude, kmax) for _ in range(model.algebra.dim)]
    return np.stack(cols, axis=-1)


def smooth_group_field(
    model: GroupModel, grid: BaseGrid, rng: np.random.Generator, amplitude: float
) -> np.ndarray:
    return model.exp(smooth_algebra_coeffs(model, grid, rng, amplitude))


def smooth_subgroup_field(
    model: GroupModel, grid: BaseGrid, rng: np.random.Generator, amplitude: float
) -> np.ndarray:
    coeffs = model.algebra.h_project(smooth_algebra_coeffs(model, grid, rng, amplitude))
    return model.exp(coeffs)


def _gl4_random_metric(grid: BaseGrid, rng: np.random.Generator, amplitude: float) -> np.ndarray:
    """Symmetric signature-(1,3) field with banded, non-crossing eigenvalues."""
    skew = np.zeros(grid.shape + (4, 4))
    for i in range(4):
        for j in range(i + 1, 4):
            th = smooth_scalar(grid, rng, 0.6 * amplitude, kmax=1)
            skew[..., i, j] = th
            skew[..., j, i] = -th
    q = expm_field(skew)
    centers = (1.0, -0.5, -1.0, -1.5)
    widths = (0.20, 0.10, 0.10, 0.10)
    diag = np.zeros(grid.shape + (4,))
    for k in range(4):
        s = np.tanh(smooth_scalar(grid, rng, 2.0 * amplitude, kmax=1))
        diag[..., k] = centers[k] + widths[k] * s
    d = np.zeros(grid.shape + (4, 4))
    for k in range(4):
        d[..., k, k] = diag[..., k]
    return q @ d @ np.swapaxes(q, -1, -2)


def random_higgs_values(
    model: GroupModel, grid: BaseGrid, rng: np.random.Generator, amplitude: float = 0.35
) -> np.ndarray:
    """Smooth coset-valued field staying inside one section chart."""
    if model.name == "GL4_SO13":
        from .groups import sym_to_vec

        return sym_to_vec(_gl4_random_metric(grid, rng, amplitude))
    coeffs = model.algebra.f_project(smooth_algebra_coeffs(model, grid, rng, amplitude))
    g = model.exp(coeffs)
    center = np.broadcast_to(model.center, grid.shape + (model.coset_dim,))
    return model.coset_action(g, center)


def random_higgs(
    atlas: Atlas,
    rng: np.random.Generator,
    amplitude: float = 0.35,
    gauges: list[np.ndarray] | None = None,
) -> HiggsField:
    """Global random coset field expressed chart-wise.

    ``gauges`` must be the per-chart gauge fields the atlas was built from
    (identity for a trivial atlas); chart data is the global field moved by
    the inverse gauge, which makes the compatibility law hold exactly.
    """
    model = atlas.group
    base = random_higgs_values(model, atlas.grid, rng, amplitude)
    if gauges is None:
        values = tuple(base.copy() for _ in range(atlas.n_charts))
    else:
        values = tuple(
            model.coset_action(np.linalg.inv(g), base) for g in gauges
        )
    return HiggsField(model, atlas.tag, values)


def random_matter(
    atlas: Atlas, rng: np.random.Generator, amplitude: float = 0.5
) -> MatterField:
    """Smooth matter field on a reduced atlas (chart data related by the
    fiber representation of the transitions)."""
    model = atlas.group
    grid = atlas.grid
    comps = []
    for _ in range(model.fiber_dim):
        re = smooth_scalar(grid, rng, amplitude)
        if model.fiber_dtype is complex:
            comps.append(re + 1j * smooth_scalar(grid, rng, amplitude))
        else:
            comps.append(re)
    base = np.stack(comps, axis=-1).astype(model.fiber_dtype)
    values = [base]
    for c in range(1, atlas.n_charts):
        rep = model.fiber_rep(atlas.transition(c, 0))
        values.append(np.einsum("...ij,...j->...i", rep, base))
    return MatterField(model, atlas.tag, tuple(values))


def random_connection(
    atlas: Atlas, rng: np.random.Generator, amplitude: float = 0.25,
    h_only: bool = False,
    gauges: list[np.ndarray] | None = None,
) -> ConnectionField:
    """Random smooth connection; chart data re-gauged when gauges are given."""
    from .connection import transform_connection

    model = atlas.group
    grid = atlas.grid
    cols = []
    for _ in range(grid.dim):
        cols.append(smooth_algebra_coeffs(model, grid, rng, amplitude))
    base = np.stack(cols, axis=-2)  # (*shape, dim, dim_g)
    if h_only:
        base = model.algebra.h_project(base)
    ref = ConnectionField(model, atlas.tag, tuple(base.copy() for _ in range(atlas.n_charts)))
    if gauges is None:
        return ref
    out = []
    for c, g in enumerate(gauges):
        single = ConnectionField(model, atlas.tag, (base,))
        moved = transform_connection(grid, single, [g], atlas.tag)
        out.append(moved.coeffs[0])
    return ConnectionField(model, atlas.tag, tuple(out))


def random_equivariant(
    atlas: Atlas, rng: np.random.Generator, amplitude: float = 0.3
) -> EquivariantFunction:
    """Chart-compatible group-valued function (conjugation across charts)."""
    model = atlas.group
    base = smooth_group_field(model, atlas.grid, rng, amplitude)
    values = [base]
    for c in range(1, atlas.n_charts):
        t = atlas.transition(c, 0)
        values.append(t @ base @ np.linalg.inv(t))
    return EquivariantFunction.from_values(atlas, values)


def _gauge_generator_filter(model: GroupModel, coeffs: np.ndarray) -> np.ndarray:
    """Restrict gauge generators for models whose canonical section is only
    piecewise smooth: for the frame model, keep the antisymmetric directions
    (orthogonal gauges act on metrics by similarity, preserving the
    eigenvalue bands the random-metric generator relies on)."""
    if model.name != "GL4_SO13":
        return coeffs
    keep = []
    for p, mat in enumerate(model.algebra.basis):
        if np.abs(mat + mat.T).max() < 1e-14:
            keep.append(p)
    out = np.zeros_like(coeffs)
    out[..., keep] = coeffs[..., keep]
    return out


def make_bundle(
    model: GroupModel,
    grid: BaseGrid,
    rng: np.random.Generator,
    n_charts: int = 3,
    amplitude: float = 0.25,
) -> tuple[Atlas, list[np.ndarray]]:
    """Random constructive bundle: chart cover plus per-chart gauge fields."""
    if n_charts == 1:
        atlas = trivial_atlas(grid, model, tag=f"trivial:{model.name}")
        return atlas, [np.broadcast_to(model.identity(), grid.shape + model.identity().shape).copy()]
    masks = three_arc_masks(grid, axis=0)
    gauges = []
    for _ in masks:
        coeffs = _gauge_generator_filter(
            model, smooth_algebra_coeffs(model, grid, rng, amplitude)
        )
        gauges.append(model.exp(coeffs))
    atlas = atlas_from_gauges(grid, model, masks, gauges, tag=f"gauged:{model.name}")
    return atlas, gauges
