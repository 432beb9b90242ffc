"""Chart covers of the base grid with group-valued transition functions.

An :class:`Atlas` is a list of named charts (boolean node masks that cover
the grid) plus, for every ordered pair of overlapping charts, a
group-valued transition field.  Transitions are only meaningful on the
overlap mask; the arrays are stored grid-shaped (identity off the overlap)
so stencil operations stay total.

Conventions.  Transitions satisfy the cocycle rule
``t[a,b] @ t[b,c] = t[a,c]`` on triple overlaps, with ``t[a,a] = identity``
implied.  An atlas built from per-chart gauge fields ``g_a`` has
``t[a,b] = g_a^-1 g_b``; chart data of any associated object is the global
object moved by ``g_a^-1``, so a coset-valued field obeys
``h_a = action(t[a,b]) h_b`` and connection coefficients obey the usual
inhomogeneous transformation (see :mod:`gauge_reduce.connection`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StructureError, UsageError
from .grid import BaseGrid
from .groups import GroupModel

__all__ = [
    "Chart",
    "Atlas",
    "trivial_atlas",
    "three_arc_masks",
    "atlas_from_gauges",
    "check_cocycle",
    "is_H_valued",
]


@dataclass(frozen=True)
class Chart:
    name: str
    mask: np.ndarray


@dataclass(frozen=True)
class Atlas:
    grid: BaseGrid
    group: GroupModel
    charts: tuple[Chart, ...]
    transitions: dict[tuple[int, int], np.ndarray]
    tag: str

    def __post_init__(self):
        shape = self.grid.shape
        cover = np.zeros(shape, dtype=bool)
        for chart in self.charts:
            if chart.mask.shape != shape:
                raise StructureError("chart mask shape does not match the grid")
            cover |= chart.mask
        if not cover.all():
            raise StructureError("charts do not cover the grid")
        for axis in range(self.grid.dim):
            shared = np.zeros(shape, dtype=bool)
            for chart in self.charts:
                shared |= chart.mask & np.roll(chart.mask, -1, axis=axis)
            if not shared.all():
                raise StructureError("adjacent node pair not covered by a common chart")
        for (a, b) in self.transitions:
            if not np.any(self.overlap(a, b)):
                raise StructureError(f"transition stored for disjoint charts {a}, {b}")

    @property
    def n_charts(self) -> int:
        return len(self.charts)

    def chart_index(self, name: str) -> int:
        for i, chart in enumerate(self.charts):
            if chart.name == name:
                return i
        raise UsageError(f"no chart named {name!r}")

    def overlap(self, a: int, b: int) -> np.ndarray:
        return self.charts[a].mask & self.charts[b].mask

    def transition(self, a: int, b: int) -> np.ndarray:
        """Transition field t[a,b]; identity for a == b."""
        if a == b:
            eye = self.group.identity()
            return np.broadcast_to(eye, self.grid.shape + eye.shape).copy()
        try:
            return self.transitions[(a, b)]
        except KeyError:
            raise StructureError(f"missing transition data for charts {a}, {b}") from None

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.transitions.keys())

    def with_tag(self, tag: str) -> "Atlas":
        return Atlas(self.grid, self.group, self.charts, self.transitions, tag)


def three_arc_masks(grid: BaseGrid, axis: int = 0) -> list[np.ndarray]:
    """Three overlapping periodic arcs along one axis, full extent elsewhere.

    Arc length is chosen so that consecutive arcs overlap by several nodes
    and all three share a nonempty triple intersection.
    """
    n = grid.shape[axis]
    length = max(n - n // 3 + 1, 4)
    starts = [0, n // 3, (2 * n) // 3]
    masks = []
    for s in starts:
        idx = (np.arange(n) - s) % n < length
        shape = [1] * grid.dim
        shape[axis] = n
        masks.append(np.broadcast_to(idx.reshape(shape), grid.shape).copy())
    triple = masks[0] & masks[1] & masks[2]
    if not triple.any():
        raise StructureError("arc cover has no triple overlap; grid too small")
    return masks


def trivial_atlas(grid: BaseGrid, group: GroupModel, tag: str = "trivial") -> Atlas:
    chart = Chart("all", np.ones(grid.shape, dtype=bool))
    return Atlas(grid, group, (chart,), {}, tag)


def atlas_from_gauges(
    grid: BaseGrid,
    group: GroupModel,
    masks: list[np.ndarray],
    gauges: list[np.ndarray],
    tag: str,
) -> Atlas:
    """Atlas with transitions ``g_a^-1 g_b`` from per-chart gauge fields."""
    if len(masks) != len(gauges):
        raise StructureError("need one gauge field per chart")
    charts = tuple(Chart(f"c{i}", m) for i, m in enumerate(masks))
    inv = [np.linalg.inv(g) for g in gauges]
    transitions = {}
    for a in range(len(charts)):
        for b in range(len(charts)):
            if a == b or not np.any(charts[a].mask & charts[b].mask):
                continue
            transitions[(a, b)] = inv[a] @ gauges[b]
    return Atlas(grid, group, charts, transitions, tag)


def check_cocycle(atlas: Atlas) -> float:
    """Largest violation of ``t[a,b] t[b,c] = t[a,c]`` over triple overlaps.

    Pairs ``(a, b, a)`` are included, so inverse consistency
    ``t[a,b] t[b,a] = identity`` is part of the residual.
    """
    worst = 0.0
    pairs = set(atlas.transitions.keys())
    for (a, b) in sorted(pairs):
        for c in range(atlas.n_charts):
            if c == b:
                continue
            if c != a and (b, c) not in pairs:
                continue
            mask = atlas.charts[a].mask & atlas.charts[b].mask & atlas.charts[c].mask
            if not mask.any():
                continue
            lhs = atlas.transition(a, b) @ atlas.transition(b, c)
            rhs = atlas.transition(a, c)
            diff = np.abs(lhs - rhs).max(axis=(-2, -1))
            worst = max(worst, float(diff[mask].max()))
    return worst


def is_H_valued(atlas: Atlas, tol: float) -> bool:
    """True iff every transition passes the subgroup membership test on its overlap."""
    return h_valued_residual(atlas) <= tol


def h_valued_residual(atlas: Atlas) -> float:
    worst = 0.0
    for (a, b), t in sorted(atlas.transitions.items()):
        mask = atlas.overlap(a, b)
        res = atlas.group.h_membership_residual(t)
        worst = max(worst, float(res[mask].max()))
    return worst
