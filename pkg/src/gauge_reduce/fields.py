"""Chart-wise field containers: coset sections, matter fields, automorphism data.

All fields carry the tag of the atlas they are expressed in; operations that
combine fields refuse mismatched tags instead of silently mixing frames.
Chart data arrays are grid-shaped (values outside the chart's mask are
smooth fillers so finite-difference stencils stay total); every contractual
statement is evaluated on chart masks and overlaps only.

Compatibility rules on an overlap of charts a, b with transition t = t[a,b]:

* coset-valued (Higgs) field:      ``h_a = action(t) h_b``
* group-valued equivariant field:  ``f_a = t f_b t^-1``
* matter field (reduced atlases):  ``y_a = fiber_rep(t) y_b``  (t must lie
  in the subgroup for the fiber representation to apply)

Equivariant functions carry their discrete derivative alongside the value.
The derivative is computed once, by central differences, when the object is
built from raw values; inverses then use the exact chain rule, which is what
makes automorphism round trips exact instead of O(dx^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atlas import Atlas
from .errors import AtlasMismatchError, StructureError
from .groups import GroupModel

__all__ = [
    "HiggsField",
    "MatterField",
    "EquivariantFunction",
    "constant_higgs",
    "higgs_compat_residual",
    "matter_compat_residual",
    "equivariant_compat_residual",
    "require_same_atlas",
]


def require_same_atlas(*tagged) -> None:
    tags = {t.atlas_tag if hasattr(t, "atlas_tag") else t.tag for t in tagged}
    if len(tags) > 1:
        raise AtlasMismatchError(f"fields expressed in different atlases: {sorted(tags)}")


@dataclass(frozen=True)
class HiggsField:
    """Coset-model coordinates per chart, shape (*grid.shape, m)."""

    group: GroupModel
    atlas_tag: str
    values: tuple[np.ndarray, ...]

    def constraint_residual(self) -> float:
        return max(float(self.group.constraint_residual(v).max()) for v in self.values)


@dataclass(frozen=True)
class MatterField:
    """Fiber vectors per chart, shape (*grid.shape, v)."""

    group: GroupModel
    atlas_tag: str
    values: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class EquivariantFunction:
    """Group-valued function with its discrete 1-jet, per chart.

    ``values[c]`` has shape (*grid.shape, k, k); ``jets[c]`` has shape
    (*grid.shape, dim, k, k) and holds the derivative along each base axis.
    """

    group: GroupModel
    atlas_tag: str
    values: tuple[np.ndarray, ...]
    jets: tuple[np.ndarray, ...]

    @classmethod
    def from_values(cls, atlas: Atlas, values: list[np.ndarray]) -> "EquivariantFunction":
        jets = tuple(atlas.grid.gradient(v) for v in values)
        return cls(atlas.group, atlas.tag, tuple(values), jets)

    @classmethod
    def identity(cls, atlas: Atlas) -> "EquivariantFunction":
        eye = atlas.group.identity()
        shape = atlas.grid.shape
        val = np.broadcast_to(eye, shape + eye.shape).copy()
        jet = np.zeros(shape + (atlas.grid.dim,) + eye.shape, dtype=eye.dtype)
        n = atlas.n_charts
        return cls(atlas.group, atlas.tag, tuple(val.copy() for _ in range(n)),
                   tuple(jet.copy() for _ in range(n)))

    def inverse(self) -> "EquivariantFunction":
        """Pointwise inverse with chain-rule jets: d(f^-1) = -f^-1 (df) f^-1."""
        invs = tuple(np.linalg.inv(v) for v in self.values)
        jets = tuple(
            -np.einsum("...ij,...ajk,...kl->...ail", inv, jet, inv)
            for inv, jet in zip(invs, self.jets)
        )
        return EquivariantFunction(self.group, self.atlas_tag, invs, jets)

    def log_derivative(self, chart: int) -> np.ndarray:
        """(d_lambda f) f^-1 as algebra coefficients, shape (*shape, dim, dim_g)."""
        inv = np.linalg.inv(self.values[chart])
        mats = np.einsum("...aij,...jk->...aik", self.jets[chart], inv)
        return self.group.algebra.to_coefficients(mats)


def constant_higgs(atlas: Atlas, sigma: np.ndarray | None = None) -> HiggsField:
    """Field sitting at one coset point in every chart (default: the center).

    Only compatible across charts when the point is fixed by all transition
    values, e.g. the center under a reduced (subgroup-valued) atlas.
    """
    sigma = atlas.group.center if sigma is None else np.asarray(sigma, dtype=float)
    val = np.broadcast_to(sigma, atlas.grid.shape + (atlas.group.coset_dim,)).copy()
    return HiggsField(atlas.group, atlas.tag, tuple(val.copy() for _ in range(atlas.n_charts)))


def higgs_compat_residual(atlas: Atlas, h: HiggsField) -> float:
    """Largest overlap violation of ``h_a = action(t[a,b]) h_b``."""
    require_same_atlas(atlas, h)
    worst = 0.0
    for (a, b) in atlas.overlapping_pairs():
        mask = atlas.overlap(a, b)
        moved = atlas.group.coset_action(atlas.transition(a, b), h.values[b])
        diff = np.abs(h.values[a] - moved).max(axis=-1)
        worst = max(worst, float(diff[mask].max()))
    return worst


def matter_compat_residual(atlas: Atlas, y: MatterField) -> float:
    """Largest overlap violation of ``y_a = fiber_rep(t[a,b]) y_b``.

    Transitions must be subgroup-valued for the fiber representation to be
    defined; callers should check ``is_H_valued`` first.
    """
    require_same_atlas(atlas, y)
    worst = 0.0
    for (a, b) in atlas.overlapping_pairs():
        mask = atlas.overlap(a, b)
        rep = atlas.group.fiber_rep(atlas.transition(a, b))
        moved = np.einsum("...ij,...j->...i", rep, y.values[b])
        diff = np.abs(y.values[a] - moved).max(axis=-1)
        worst = max(worst, float(diff[mask].max()))
    return worst


def equivariant_compat_residual(atlas: Atlas, f: EquivariantFunction) -> float:
    """Largest overlap violation of ``f_a = t f_b t^-1``."""
    require_same_atlas(atlas, f)
    worst = 0.0
    for (a, b) in atlas.overlapping_pairs():
        mask = atlas.overlap(a, b)
        t = atlas.transition(a, b)
        moved = t @ f.values[b] @ np.linalg.inv(t)
        diff = np.abs(f.values[a] - moved).max(axis=(-2, -1))
        worst = max(worst, float(diff[mask].max()))
    return worst


def chart_count_consistent(atlas: Atlas, *fields) -> None:
    for fld in fields:
        if len(fld.values) != atlas.n_charts:
            raise StructureError("field chart count does not match the atlas")
