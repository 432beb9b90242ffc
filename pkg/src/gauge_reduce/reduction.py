"""Structure-group reduction: adapted atlases and vertical automorphisms.

``adapt_atlas`` realizes the correspondence between a coset-valued Higgs
field and a subgroup-valued atlas: re-gauging every chart by the section
``z(h)`` produces transitions that stabilize the model center (hence pass
subgroup membership) and moves the field itself onto the center.

``apply_automorphism`` is the action of a vertical bundle automorphism,
given chart-wise as a group-valued equivariant function ``f``: coset fields
move by the left action, matter moves by the induced representation, and
connections transform actively.  Because equivariant functions carry their
discrete derivative and inverses use the exact chain rule, applying ``f``
followed by ``f.inverse()`` restores every field to roundoff, not merely to
O(dx^2).

``construct_global_higgs`` builds a global section by blending local pieces
with a partition of unity.  This constructive path needs two hypotheses: the
coset model must admit a global flat parametrization (the signature-(1,3)
model does, through the symmetric logarithm; the sphere models do not), and
the atlas transitions must be trivial on overlaps, since the blend is
performed in fiber coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .atlas import Atlas
from .connection import (
    ConnectionField,
    adapted_atlas,
    transform_connection_with_jets,
)
from .errors import StructureError, UnsupportedModelError
from .fields import EquivariantFunction, HiggsField, MatterField, require_same_atlas
from .groups import ETA, GroupModel, sym_to_vec, vec_to_sym

__all__ = [
    "AdaptedBundle",
    "adapt_atlas",
    "construct_global_higgs",
    "apply_automorphism",
    "pushforward_adapted_atlas",
    "conjugate_equivariant",
    "extend_subbundle_iso",
]


@dataclass(frozen=True)
class AdaptedBundle:
    atlas: Atlas
    gauges: tuple[np.ndarray, ...]
    higgs: HiggsField


def adapt_atlas(atlas: Atlas, h: HiggsField) -> AdaptedBundle:
    """Reduced atlas for h, the section gauges, and h re-expressed (centered)."""
    new_atlas, gauges = adapted_atlas(atlas, h)
    inv = [np.linalg.inv(g) for g in gauges]
    centered = tuple(
        atlas.group.coset_action(gi, hv) for gi, hv in zip(inv, h.values)
    )
    return AdaptedBundle(new_atlas, tuple(gauges), HiggsField(atlas.group, new_atlas.tag, centered))


# -- global sections by partition-of-unity blending ------------------------------


def _flat_coordinates(model: GroupModel, sigma: np.ndarray) -> np.ndarray:
    """Global flat parametrization of the coset model, where one exists."""
    if model.name != "GL4_SO13":
        raise UnsupportedModelError(
            f"{model.name}: coset model is not diffeomorphic to a flat space"
        )
    mats = vec_to_sym(sigma)
    flat = np.empty_like(mats)
    it = mats.reshape(-1, 4, 4)
    out = flat.reshape(-1, 4, 4)
    for i in range(len(it)):
        m = it[i] @ ETA
        w = np.linalg.eigvals(m)
        if np.any(np.real(w) <= 0) or np.any(np.abs(np.imag(w)) > 1e-12):
            raise UnsupportedModelError("piece leaves the logarithm domain of the flat chart")
        out[i] = np.real(scipy.linalg.logm(m))
    return flat


def _unflatten(model: GroupModel, flat: np.ndarray) -> np.ndarray:
    mats = scipy.linalg.expm(flat) @ ETA
    return sym_to_vec(mats)


def _mask_depth(mask: np.ndarray) -> np.ndarray:
    """Periodic distance (in nodes) to the complement of a mask; large if full."""
    if mask.all():
        return np.full(mask.shape, float(max(mask.shape)))
    depth = np.zeros(mask.shape)
    frontier = ~mask
    reached = frontier.copy()
    step = 0
    while not reached.all():
        step += 1
        grown = reached.copy()
        for axis in range(mask.ndim):
            grown |= np.roll(reached, 1, axis=axis) | np.roll(reached, -1, axis=axis)
        depth[grown & ~reached] = step
        reached = grown
    return depth


def construct_global_higgs(atlas: Atlas, pieces: dict[int, np.ndarray]) -> HiggsField:
    """Blend per-chart local pieces into a global section.

    ``pieces`` maps chart index -> coordinate array (*shape, m), meaningful
    on that chart's mask.  Pieces are pulled into the flat parametrization,
    averaged with smooth mask-depth weights, and mapped back, so the result
    satisfies the model constraint everywhere by construction.
    """
    model = atlas.group
    if not pieces:
        raise StructureError("no local pieces supplied")
    for (a, b), t in atlas.transitions.items():
        mask = atlas.overlap(a, b)
        if float(np.abs((t - model.identity()))[mask].max()) > 1e-12:
            raise StructureError(
                "blending requires trivial transitions on overlaps (trivialized bundle)"
            )
    if len(pieces) == 1:
        ((c, vals),) = pieces.items()
        if not atlas.charts[c].mask.all():
            raise StructureError("single piece does not cover the grid")
        return HiggsField(model, atlas.tag, tuple(vals.copy() for _ in range(atlas.n_charts)))

    shape = atlas.grid.shape
    total = np.zeros(shape)
    acc = None
    for c, vals in pieces.items():
        w = _mask_depth(atlas.charts[c].mask)
        flat = _flat_coordinates(model, vals)
        if acc is None:
            acc = np.zeros(shape + flat.shape[len(shape):])
        acc += w[(...,) + (None,) * (acc.ndim - len(shape))] * flat
        total += w
    if np.any(total <= 0):
        raise StructureError("pieces do not cover the grid")
    acc /= total[(...,) + (None,) * (acc.ndim - len(shape))]
    blended = _unflatten(model, acc)
    return HiggsField(model, atlas.tag, tuple(blended.copy() for _ in range(atlas.n_charts)))


# -- vertical automorphisms -------------------------------------------------------


def apply_automorphism(
    atlas: Atlas,
    f: EquivariantFunction,
    higgs: HiggsField | None = None,
    matter: MatterField | None = None,
    connection: ConnectionField | None = None,
) -> tuple[HiggsField | None, MatterField | None, ConnectionField | None]:
    """Transform fields under the vertical automorphism defined by ``f``.

    Coset fields move by the left action of the chart values of ``f``;
    matter pairs move by the induced representation (which needs the Higgs
    field); connections transform actively,
    ``A' = f A f^-1 - (df) f^-1``, using the stored derivative of ``f``.
    """
    require_same_atlas(atlas, f)
    model = atlas.group
    new_h = new_y = new_a = None
    if higgs is not None:
        require_same_atlas(atlas, higgs)
        new_h = HiggsField(
            model, atlas.tag,
            tuple(model.coset_action(fv, hv) for fv, hv in zip(f.values, higgs.values)),
        )
    if matter is not None:
        if higgs is None:
            raise StructureError("matter transforms through the induced action: higgs required")
        require_same_atlas(atlas, matter)
        vals = []
        for fv, hv, yv in zip(f.values, higgs.values, matter.values):
            _, y2 = model.induced_action(fv, hv, yv)
            vals.append(y2)
        new_y = MatterField(model, atlas.tag, tuple(vals))
    if connection is not None:
        require_same_atlas(atlas, connection)
        finv = f.inverse()
        new_a = transform_connection_with_jets(
            atlas.grid, connection, list(finv.values), list(finv.jets), atlas.tag
        )
    return new_h, new_y, new_a


def pushforward_adapted_atlas(
    atlas: Atlas, h: HiggsField, f: EquivariantFunction
) -> tuple[Atlas, list[np.ndarray]]:
    """Adapted atlas for the moved field built from pushforward sections.

    The gauges are ``f_a z(h_a)`` (move the adapted sections by the
    automorphism).  The resulting transitions coincide with those of the
    adapted atlas of ``h`` itself: the two reduced atlases realize the same
    cocycle.
    """
    from .connection import section_gauges

    require_same_atlas(atlas, h, f)
    gauges = section_gauges(atlas, h)
    pushed = [fv @ g for fv, g in zip(f.values, gauges)]
    inv = [np.linalg.inv(g) for g in pushed]
    transitions = {
        (a, b): inv[a] @ t @ pushed[b] for (a, b), t in atlas.transitions.items()
    }
    new = Atlas(atlas.grid, atlas.group, atlas.charts, transitions, atlas.tag + "/pushforward")
    return new, pushed


def conjugate_equivariant(
    f: EquivariantFunction,
    gauges: list[np.ndarray],
    gauge_jets: list[np.ndarray],
    new_tag: str,
) -> EquivariantFunction:
    """Re-express an equivariant function in a frame changed by ``gauges``.

    Values conjugate, ``f' = g^-1 f g``; jets follow the exact product rule
    so that conjugating there and back reproduces the input bitwise up to
    matrix arithmetic.
    """
    vals, jets = [], []
    for v, j, g, gj in zip(f.values, f.jets, gauges, gauge_jets):
        ginv = np.linalg.inv(g)
        vals.append(ginv @ v @ g)
        term = np.einsum("...ij,...ajk,...kl->...ail", ginv, j, g)
        term = term + np.einsum("...ij,...jk,...akl->...ail", ginv, v, gj)
        term = term - np.einsum(
            "...ij,...ajk,...kl,...lm,...mn->...ain", ginv, gj, ginv, v, g
        )
        jets.append(term)
    return EquivariantFunction(f.group, new_tag, tuple(vals), tuple(jets))


def extend_subbundle_iso(
    f_adapted: EquivariantFunction,
    gauges: list[np.ndarray],
    gauge_jets: list[np.ndarray],
    target_tag: str,
) -> EquivariantFunction:
    """Extend an automorphism given on the reduced atlas to an arbitrary frame.

    The extension is conjugation by the inverse section gauges; restricting
    back (conjugating by the gauges again) reproduces the input exactly.
    """
    inv_gauges = [np.linalg.inv(g) for g in gauges]
    inv_jets = [
        -np.einsum("...ij,...ajk,...kl->...ail", gi, gj, gi)
        for gi, gj in zip(inv_gauges, gauge_jets)
    ]
    return conjugate_equivariant(f_adapted, inv_gauges, inv_jets, target_tag)
