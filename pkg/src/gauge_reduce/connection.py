"""Connection coefficient fields, gauge transforms, and the h/f split.

A connection is stored chart-wise as real coefficients ``A[..., lam, p]``
(base direction ``lam``, algebra basis index ``p``), units 1/length.  Under
a passive gauge change by a group-valued field ``g`` the coefficients
transform as

    A' = g^-1 A g + g^-1 (d g),

with derivatives by central differences; chart transitions obey the same
law with ``g = t[a,b]``.  The covariant differential of a coset-valued
field uses the left-action generators ``J_p`` with a plus sign,

    (D h)_lam = d_lam h + A^p_lam J_p h,

which makes ``D h`` transform linearly under simultaneous gauge changes of
``A`` and ``h``.

The split.  Given a Higgs field ``h``, re-gauging every chart by the coset
section ``g = z(h)`` moves ``h`` to the model center; in that adapted frame
the subalgebra part of the coefficients is itself a connection for the
reduced (subgroup-valued) atlas and the complement part ``Theta`` is a
tensor.  ``Theta`` contracted with the coset generators reproduces ``D h``;
that identity is the module's central cross-check and is exercised both at
the field level and on free jet values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atlas import Atlas, Chart
from .errors import DimensionError, StructureError, UnsupportedModelError
from .fields import HiggsField, require_same_atlas
from .grid import BaseGrid
from .groups import GroupModel

__all__ = [
    "ConnectionField",
    "ThetaField",
    "CartanSplit",
    "zero_connection",
    "transform_connection",
    "transform_connection_with_jets",
    "connection_compat_residual",
    "associated_connection_coeffs",
    "covariant_differential_higgs",
    "is_reducible",
    "section_gauges",
    "adapted_atlas",
    "extend_H_connection",
    "cartan_split",
    "theta_in_atlas",
    "verify_theta_identity",
    "theta_affine_data",
    "theta_at_jet",
    "curvature",
]


@dataclass(frozen=True)
class ConnectionField:
    """Per-chart coefficients A[..., lam, p], shape (*grid.shape, dim, dim_g)."""

    group: GroupModel
    atlas_tag: str
    coeffs: tuple[np.ndarray, ...]

    def matrices(self, chart: int) -> np.ndarray:
        return self.group.algebra.to_matrix(self.coeffs[chart])

    def h_part(self) -> "ConnectionField":
        alg = self.group.algebra
        return ConnectionField(self.group, self.atlas_tag,
                               tuple(alg.h_project(c) for c in self.coeffs))

    def f_part(self) -> "ConnectionField":
        alg = self.group.algebra
        return ConnectionField(self.group, self.atlas_tag,
                               tuple(alg.f_project(c) for c in self.coeffs))

    def max_f_component(self) -> float:
        alg = self.group.algebra
        return max(float(np.abs(c[..., list(alg.f_indices)]).max()) for c in self.coeffs)


class ThetaField(ConnectionField):
    """Difference tensor between a connection and its reduced part."""


@dataclass(frozen=True)
class CartanSplit:
    """Result of splitting a connection along a Higgs field.

    All three coefficient fields live in the adapted atlas: ``a_adapted``
    is the full transformed connection, ``abar`` its subalgebra part (the
    reduced connection), ``theta`` the complement part;
    ``a_adapted = abar + theta`` holds exactly, entry by entry.
    """

    abar: ConnectionField
    theta: ThetaField
    a_adapted: ConnectionField
    atlas: Atlas
    gauges: tuple[np.ndarray, ...]


def zero_connection(atlas: Atlas) -> ConnectionField:
    shape = atlas.grid.shape + (atlas.grid.dim, atlas.group.algebra.dim)
    return ConnectionField(atlas.group, atlas.tag,
                           tuple(np.zeros(shape) for _ in range(atlas.n_charts)))


def _transform_one(
    grid: BaseGrid,
    model: GroupModel,
    coeffs: np.ndarray,
    g: np.ndarray,
    g_jet: np.ndarray | None,
) -> np.ndarray:
    """Coefficients of g^-1 A g + g^-1 dg; dg by central differences unless given."""
    ginv = np.linalg.inv(g)
    amat = model.algebra.to_matrix(coeffs)
    if g_jet is None:
        g_jet = grid.gradient(g)
    new = np.einsum("...ij,...ajk,...kl->...ail", ginv, amat, g)
    new = new + np.einsum("...ij,...ajk->...aik", ginv, g_jet)
    return model.algebra.to_coefficients(new)


def transform_connection(
    grid: BaseGrid,
    A: ConnectionField,
    gauges: list[np.ndarray],
    new_tag: str,
) -> ConnectionField:
    """Re-gauge a connection by per-chart group-valued fields."""
    model = A.group
    out = tuple(
        _transform_one(grid, model, c, g, None) for c, g in zip(A.coeffs, gauges)
    )
    return ConnectionField(model, new_tag, out)


def transform_connection_with_jets(
    grid: BaseGrid,
    A: ConnectionField,
    gauges: list[np.ndarray],
    gauge_jets: list[np.ndarray],
    new_tag: str,
) -> ConnectionField:
    """Re-gauge using caller-supplied gauge derivatives (exact chain rules)."""
    model = A.group
    out = tuple(
        _transform_one(grid, model, c, g, j)
        for c, g, j in zip(A.coeffs, gauges, gauge_jets)
    )
    return ConnectionField(model, new_tag, out)


def connection_compat_residual(atlas: Atlas, A: ConnectionField) -> float:
    """Largest overlap violation of the transition law, per coefficient entry.

    For every stored ordered pair (a, b):
    ``A_b = t^-1 A_a t + t^-1 dt`` with ``t = t[a, b]``.
    """
    require_same_atlas(atlas, A)
    worst = 0.0
    for (a, b) in atlas.overlapping_pairs():
        mask = atlas.overlap(a, b)
        moved = _transform_one(atlas.grid, A.group, A.coeffs[a], atlas.transition(a, b), None)
        diff = np.abs(A.coeffs[b] - moved).max(axis=(-2, -1))
        worst = max(worst, float(diff[mask].max()))
    return worst


def associated_connection_coeffs(
    model: GroupModel, coeffs: np.ndarray, generators: str = "coset"
) -> np.ndarray:
    """Contraction of connection coefficients with action generators.

    ``coset``: A^p_lam J_p, shape (..., dim, m, m).
    ``fiber``: subalgebra components contracted with I_a, (..., dim, v, v).
    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape[-1] != model.algebra.dim:
        raise DimensionError("coefficient array does not match the algebra dimension")
    if generators == "coset":
        return np.einsum("...ap,pij->...aij", coeffs, model.higgs_generators)
    if generators == "fiber":
        h = coeffs[..., list(model.algebra.h_indices)]
        return np.einsum("...aq,qij->...aij", h, model.fiber_generators)
    raise DimensionError(f"unknown generator set {generators!r}")


def covariant_differential_higgs(
    grid: BaseGrid, A: ConnectionField, h: HiggsField
) -> list[np.ndarray]:
    """Per-chart D h with (D h)[..., lam, m] = d_lam h^m + A^p_lam (J_p h)^m."""
    require_same_atlas(A, h)
    model = A.group
    out = []
    for coeffs, values in zip(A.coeffs, h.values):
        gen = associated_connection_coeffs(model, coeffs, "coset")
        d = grid.gradient(values) + np.einsum("...aij,...j->...ai", gen, values)
        out.append(d)
    return out


def is_reducible(
    grid: BaseGrid, atlas: Atlas, A: ConnectionField, h: HiggsField, tol: float
) -> tuple[bool, float]:
    """True iff the Higgs field is covariantly constant to the given tolerance."""
    diffs = covariant_differential_higgs(grid, A, h)
    worst = 0.0
    for chart, d in zip(atlas.charts, diffs):
        mag = np.abs(d).max(axis=(-2, -1))
        worst = max(worst, float(mag[chart.mask].max()))
    return worst <= tol, worst


# -- adapted atlases and the split ---------------------------------------------


def section_gauges(atlas: Atlas, h: HiggsField) -> list[np.ndarray]:
    """Per-chart section values z(h): the gauge change into the adapted frame.

    One coset chart is chosen per base chart (it must contain every Higgs
    value on the chart's mask); the section formula is evaluated on the full
    grid array so downstream stencils stay total.
    """
    require_same_atlas(atlas, h)
    gauges = []
    for chart, values in zip(atlas.charts, h.values):
        coset_chart = atlas.group.chart_for(values[chart.mask])
        gauges.append(coset_chart.section(values))
    return gauges


def adapted_atlas(atlas: Atlas, h: HiggsField) -> tuple[Atlas, list[np.ndarray]]:
    """Atlas with transitions conjugated into the subgroup by section gauges.

    Returns the new atlas (tag ``<old>/adapted``) and the gauge fields; the
    new transitions are ``z(h_a)^-1 t[a,b] z(h_b)``, which stabilize the
    center and therefore pass subgroup membership up to roundoff.
    """
    gauges = section_gauges(atlas, h)
    inv = [np.linalg.inv(g) for g in gauges]
    transitions = {
        (a, b): inv[a] @ t @ gauges[b] for (a, b), t in atlas.transitions.items()
    }
    new = Atlas(atlas.grid, atlas.group, atlas.charts, transitions, atlas.tag + "/adapted")
    return new, gauges


def extend_H_connection(
    grid: BaseGrid,
    A_h: ConnectionField,
    gauges: list[np.ndarray],
    target_tag: str,
) -> ConnectionField:
    """Reinterpret a subgroup connection as a full connection in a target atlas.

    ``A_h`` must vanish on the complement indices (it lives on the reduced
    atlas); the result is the same coefficient field re-gauged into the
    target frame by the inverse section gauges.
    """
    bad = A_h.max_f_component()
    if bad > 1e-12:
        raise StructureError(f"input has complement components (max {bad:.3e})")
    return transform_connection(grid, A_h, [np.linalg.inv(g) for g in gauges], target_tag)


def cartan_split(atlas: Atlas, A: ConnectionField, h: HiggsField) -> CartanSplit:
    """Split a connection into reduced part and difference tensor along h."""
    ok, res = atlas.group.algebra.check_reductive()
    if not ok:
        raise UnsupportedModelError(f"split needs a reductive algebra (residual {res:.3e})")
    require_same_atlas(atlas, A, h)
    new_atlas, gauges = adapted_atlas(atlas, h)
    a_ad = transform_connection(atlas.grid, A, gauges, new_atlas.tag)
    abar = a_ad.h_part()
    theta = ThetaField(A.group, new_atlas.tag, a_ad.f_part().coeffs)
    return CartanSplit(abar=abar, theta=theta, a_adapted=a_ad, atlas=new_atlas, gauges=tuple(gauges))


def theta_in_atlas(split: CartanSplit, original_tag: str) -> ThetaField:
    """Transport the difference tensor back to the original frame (no derivative)."""
    model = split.theta.group
    out = []
    for g, coeffs in zip(split.gauges, split.theta.coeffs):
        mats = model.algebra.to_matrix(coeffs)
        ginv = np.linalg.inv(g)
        back = np.einsum("...ij,...ajk,...kl->...ail", g, mats, ginv)
        out.append(model.algebra.to_coefficients(back))
    return ThetaField(model, original_tag, tuple(out))


def verify_theta_identity(atlas: Atlas, A: ConnectionField, h: HiggsField) -> float:
    """Max residual of Theta^p_lam (J_p h) - (D h)_lam over chart masks.

    Both sides are evaluated in the working atlas: Theta is produced by the
    split in the adapted frame and transported back, D h is computed
    directly.  Agreement is limited only by the finite differences, so the
    residual scales like dx^2.
    """
    split = cartan_split(atlas, A, h)
    theta = theta_in_atlas(split, atlas.tag)
    diffs = covariant_differential_higgs(atlas.grid, A, h)
    model = A.group
    worst = 0.0
    for chart, tc, hc, d in zip(atlas.charts, theta.coeffs, h.values, diffs):
        lhs = np.einsum("...ap,pij,...j->...ai", tc, model.higgs_generators, hc)
        mag = np.abs(lhs - d).max(axis=(-2, -1))
        worst = max(worst, float(mag[chart.mask].max()))
    return worst


# -- jet-level form of the difference tensor ------------------------------------


def theta_affine_data(model: GroupModel, a_adapted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Affine data (c, d) of the jet-extended difference tensor at the center.

    At a node with adapted coefficients ``a``, the tensor evaluated on a free
    coset jet ``s`` (value pinned at the center, slope ``s``) is

        theta(s) = f_part(a + lift(s)) = d + c . s,

    with ``d = f_part(a)`` (shape like ``a``) and the constant matrix
    ``c[p, m] = f_part(lift column m)`` shared by every node and direction.
    """
    alg = model.algebra
    d = alg.f_project(np.asarray(a_adapted))
    c = np.array(model.section_lift, dtype=float, copy=True)
    c[list(alg.h_indices), :] = 0.0
    return c, d


def theta_at_jet(
    model: GroupModel, a_adapted: np.ndarray, sigma_jet: np.ndarray
) -> np.ndarray:
    """Difference tensor on a free jet: f_part(a + lift(sigma_jet)).

    ``a_adapted``: (..., dim, dim_g) coefficients in the adapted frame;
    ``sigma_jet``: (..., dim, m) coset slopes.  Exactly affine in the jet.
    """
    lifted = np.einsum("pm,...am->...ap", model.section_lift, np.asarray(sigma_jet))
    return model.algebra.f_project(np.asarray(a_adapted) + lifted)


def curvature(grid: BaseGrid, A: ConnectionField) -> list[np.ndarray]:
    """Field strength F[..., lam, mu, p] = d_lam A_mu - d_mu A_lam + [A_lam, A_mu]."""
    alg = A.group.algebra
    out = []
    for coeffs in A.coeffs:
        n = grid.dim
        f = np.zeros(coeffs.shape[:-2] + (n, n, alg.dim))
        for lam in range(n):
            for mu in range(lam + 1, n):
                val = grid.derivative(coeffs[..., mu, :], lam)
                val = val - grid.derivative(coeffs[..., lam, :], mu)
                val = val + alg.bracket(coeffs[..., lam, :], coeffs[..., mu, :])
                f[..., lam, mu, :] = val
                f[..., mu, lam, :] = -val
        out.append(f)
    return out
