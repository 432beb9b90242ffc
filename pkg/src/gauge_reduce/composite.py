"""Matter fields over the coset bundle and the universal covariant differential.

Matter lives in pairs with a Higgs field: chart data is a fiber vector
``y`` over each node together with the coset value ``sigma``.  A connection
on the coset-bundle side is given by subalgebra-valued coefficient
functions ``ax(x, sigma)`` (base directions) and ``am(x, sigma)`` (coset
directions).  These define the first-order operator

    Dt[lam] = y_jet[lam] + (am . sigma_jet[lam] + ax[lam])^a I_a y,

the vertical covariant differential, evaluated on free jet values.  Its
restriction to the discrete jets of an actual pair (h, s) coincides, term
by term, with the covariant derivative of ``s`` along the pulled-back
connection ``am(h) . dh + ax(h)``; the agreement is algebraic, not a
discretization statement.

``solve_universal`` produces such coefficients from an ordinary gauge
connection in the adapted frame: the difference tensor of the h/f split is
affine in the coset jets, and matching its subalgebra rows determines
``ax = a_h`` (the reduced connection) and ``am`` from the jet-coupling
matrix of the section lift.  The resulting differential depends only on
dynamical gauge variables, and the matter Lagrangian

    L = 1/2 sum_lam <Dt[lam], Dt[lam]>_fiber

is invariant under vertical automorphisms because the whole pipeline
(automorphism, re-adaptation) collapses to a pointwise subgroup gauge whose
action on ``Dt`` is the fiber representation, an isometry of the fiber
metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import theta_affine_data, theta_at_jet
from .errors import DimensionError, ModelInconsistencyError
from .grid import BaseGrid
from .groups import GroupModel

__all__ = [
    "SigmaConnection",
    "JetSample",
    "pullback_coeffs",
    "vertical_covariant_differential",
    "vertical_differential_sample",
    "restriction_residual",
    "UniversalSolution",
    "solve_universal",
    "matter_lagrangian",
    "gauge_invariance_delta",
    "composite_section_roundtrip",
]


@dataclass(frozen=True)
class SigmaConnection:
    """Subalgebra-valued coefficients over (node, coset point), affine in sigma.

    ``ax(x, sigma) = ax0[x] + ax1[x] . (sigma - center)`` with
    ``ax0: (*shape, dim, nh)`` and ``ax1: (*shape, dim, nh, m)``; same for
    the coset-direction part ``am0: (*shape, m, nh)``, ``am1``.  Affine
    storage keeps every identity check exact while remaining smooth in
    sigma; see the sampled export in :mod:`gauge_reduce.sigma_samples` for
    the grid+interpolation container.
    """

    model: GroupModel
    atlas_tag: str
    ax0: np.ndarray
    ax1: np.ndarray
    am0: np.ndarray
    am1: np.ndarray

    def __post_init__(self):
        nh = len(self.model.algebra.h_indices)
        if self.ax0.shape[-1] != nh or self.am0.shape[-1] != nh:
            raise DimensionError("coefficient arrays must be indexed by the subalgebra basis")

    def eval_x(self, sigma: np.ndarray) -> np.ndarray:
        delta = np.asarray(sigma) - self.model.center
        return self.ax0 + np.einsum("...lam,...m->...la", self.ax1, delta)

    def eval_m(self, sigma: np.ndarray) -> np.ndarray:
        delta = np.asarray(sigma) - self.model.center
        return self.am0 + np.einsum("...kam,...m->...ka", self.am1, delta)

    @classmethod
    def constant(cls, model: GroupModel, atlas_tag: str, ax0, am0) -> "SigmaConnection":
        ax0 = np.asarray(ax0)
        am0 = np.asarray(am0)
        m = model.coset_dim
        return cls(
            model, atlas_tag, ax0,
            np.zeros(ax0.shape + (m,)), am0, np.zeros(am0.shape + (m,)),
        )


@dataclass(frozen=True)
class JetSample:
    """One free point of the total configuration space at a node.

    ``a`` and ``a_jet`` are connection coefficients and their base
    derivatives, ``sigma``/``sigma_jet`` the coset value and slope,
    ``y``/``y_jet`` the fiber value and slope.  No constraint ties the
    entries together; identities are checked by evaluating operators on the
    sample.
    """

    x: tuple[int, ...]
    a: np.ndarray  # (dim, dim_g)
    a_jet: np.ndarray  # (dim, dim, dim_g)
    sigma: np.ndarray  # (m,)
    sigma_jet: np.ndarray  # (dim, m)
    y: np.ndarray  # (v,)
    y_jet: np.ndarray  # (dim, v)


def pullback_coeffs(grid: BaseGrid, sc: SigmaConnection, h_values: np.ndarray) -> np.ndarray:
    """Coefficients of the pulled-back connection along a coset field.

    Returns (*shape, dim, nh): ``am(h) . d_lam h + ax(h)[lam]``.
    """
    dh = grid.gradient(h_values)
    am = sc.eval_m(h_values)
    ax = sc.eval_x(h_values)
    return np.einsum("...lm,...ma->...la", dh, am) + ax


def vertical_covariant_differential(
    model: GroupModel,
    ax_at: np.ndarray,
    am_at: np.ndarray,
    sigma_jet: np.ndarray,
    y: np.ndarray,
    y_jet: np.ndarray,
) -> np.ndarray:
    """Dt[..., lam, i] from already-evaluated coefficients.

    ``ax_at``: (..., dim, nh); ``am_at``: (..., m, nh);
    ``sigma_jet``: (..., dim, m); ``y``: (..., v); ``y_jet``: (..., dim, v).
    """
    comb = ax_at + np.einsum("...lm,...ma->...la", np.asarray(sigma_jet), am_at)
    gen = np.einsum("...la,aij->...lij", comb, model.fiber_generators)
    return np.asarray(y_jet) + np.einsum("...lij,...j->...li", gen, np.asarray(y))


def vertical_differential_sample(sc: SigmaConnection, jet: JetSample) -> np.ndarray:
    """Vertical covariant differential on one jet sample, shape (dim, v)."""
    ax = sc.eval_x(jet.sigma)[jet.x] if sc.ax0.ndim > 2 else sc.eval_x(jet.sigma)
    am = sc.eval_m(jet.sigma)[jet.x] if sc.am0.ndim > 2 else sc.eval_m(jet.sigma)
    return vertical_covariant_differential(sc.model, ax, am, jet.sigma_jet, jet.y, jet.y_jet)


def restriction_residual(
    grid: BaseGrid, sc: SigmaConnection, h_values: np.ndarray, y_values: np.ndarray
) -> float:
    """Max gap between the vertical differential on section jets and the
    pulled-back covariant derivative.  Both sides use the same central
    differences, so this is an exact algebraic identity (roundoff only)."""
    model = sc.model
    dt = vertical_covariant_differential(
        model,
        sc.eval_x(h_values),
        sc.eval_m(h_values),
        grid.gradient(h_values),
        y_values,
        grid.gradient(y_values),
    )
    ah = pullback_coeffs(grid, sc, h_values)
    gen = np.einsum("...la,aij->...lij", ah, model.fiber_generators)
    dcov = grid.gradient(y_values) + np.einsum("...lij,...j->...li", gen, y_values)
    return float(np.abs(dt - dcov).max())


@dataclass(frozen=True)
class UniversalSolution:
    """Sigma-connection solved from a gauge connection, plus diagnostics."""

    sigma_connection: SigmaConnection
    probe_residual: float
    affinity_residual: float


def solve_universal(
    model: GroupModel, a_adapted: np.ndarray, atlas_tag: str, affinity_tol: float = 1e-10
) -> UniversalSolution:
    """Match the subalgebra rows of the jet-extended difference tensor.

    ``a_adapted``: connection coefficients (*shape, dim, dim_g) in the
    adapted frame.  With the affine data ``theta(s) = d + c . s`` the
    solution is ``am = -c`` and ``ax = a - d`` on subalgebra rows, which
    makes ``am . s + ax = a_h - theta_h(s)`` hold identically in the jet.
    The identity is verified on the 2m+1 probe jets {0, +-unit vectors};
    a quadratic residue in the probes signals a non-reductive split.
    """
    alg = model.algebra
    hi = list(alg.h_indices)
    m = model.coset_dim
    c, d = theta_affine_data(model, a_adapted)
    ax0 = np.asarray(a_adapted)[..., hi] - d[..., hi]
    am0 = np.broadcast_to(-c[hi, :].T, a_adapted.shape[:-2] + (m, len(hi))).copy()
    sc = SigmaConnection.constant(model, atlas_tag, ax0, am0)

    lead = a_adapted.shape[:-2]
    dim = a_adapted.shape[-2]
    probe_worst = 0.0
    affine_worst = 0.0
    theta0 = theta_at_jet(model, a_adapted, np.zeros(lead + (dim, m)))
    for k in range(m):
        s = np.zeros(lead + (dim, m))
        s[..., k] = 1.0
        tplus = theta_at_jet(model, a_adapted, s)
        tminus = theta_at_jet(model, a_adapted, -s)
        affine_worst = max(affine_worst, float(np.abs(tplus + tminus - 2 * theta0).max()))
        for sign, th in ((1.0, tplus), (-1.0, tminus)):
            lhs = np.einsum("...ka,...lk->...la", am0, sign * s) + ax0
            rhs = np.asarray(a_adapted)[..., hi] - th[..., hi]
            probe_worst = max(probe_worst, float(np.abs(lhs - rhs).max()))
    lhs0 = ax0
    rhs0 = np.asarray(a_adapted)[..., hi] - theta0[..., hi]
    probe_worst = max(probe_worst, float(np.abs(lhs0 - rhs0).max()))
    if affine_worst > affinity_tol:
        raise ModelInconsistencyError(
            f"difference tensor is not affine in the jets (residue {affine_worst:.3e}); "
            "the algebra split is not reductive"
        )
    return UniversalSolution(sc, probe_worst, affine_worst)


def matter_lagrangian(model: GroupModel, dtilde: np.ndarray) -> np.ndarray:
    """Density 1/2 sum over directions of the fiber inner square of Dt.

    The fiber metric is the model's invariant one (indefinite for the
    frame-bundle model, so the density may be negative there).
    """
    return 0.5 * np.sum(model.fiber_norm2(dtilde), axis=-1)


def gauge_invariance_delta(
    grid: BaseGrid,
    model: GroupModel,
    a_adapted: np.ndarray,
    y: np.ndarray,
    f_values: np.ndarray,
    atlas_tag: str = "adapted",
) -> float:
    """Max change of the matter Lagrangian density under an automorphism.

    The state is adapted (Higgs at the center, zero coset jets).  The
    automorphism followed by re-adaptation collapses to the pointwise
    subgroup gauge ``u = z(pi(f))^-1 f``; its derivative enters both the
    connection transform and the matter jet transform through one shared
    central-difference field, so the cancellation in the differential is
    algebraic and the density change is roundoff-level.
    """
    alg = model.algebra
    hi = list(alg.h_indices)
    center = np.broadcast_to(model.center, grid.shape + (model.coset_dim,))

    y_jet = grid.gradient(y)
    sol = solve_universal(model, a_adapted, atlas_tag)
    dt = vertical_covariant_differential(
        model, sol.sigma_connection.ax0, sol.sigma_connection.am0,
        np.zeros(grid.shape + (grid.dim, model.coset_dim)), y, y_jet,
    )
    lag0 = matter_lagrangian(model, dt)

    h_moved = model.coset_action(f_values, center)
    u = np.linalg.inv(model.section(h_moved)) @ f_values
    res = float(np.max(model.h_membership_residual(u)))
    if res > 1e-8:
        raise ModelInconsistencyError(f"combined re-gauge leaves the subgroup ({res:.3e})")

    w = alg.to_coefficients(
        grid.gradient(u) @ np.linalg.inv(u)[..., None, :, :]
    )  # (*shape, dim, dim_g)
    amat = alg.to_matrix(a_adapted)
    uinv = np.linalg.inv(u)
    ad_u = alg.to_coefficients(
        np.einsum("...ij,...ajk,...kl->...ail", u, amat, uinv)
    )
    a2 = ad_u - w

    rep = model.fiber_rep(u)
    y2 = np.einsum("...ij,...j->...i", rep, y)
    corr = np.einsum("...la,aij,...j->...li", w[..., hi], model.fiber_generators, y2)
    y2_jet = np.einsum("...ij,...lj->...li", rep, y_jet) + corr

    sol2 = solve_universal(model, a2, atlas_tag + "/moved")
    dt2 = vertical_covariant_differential(
        model, sol2.sigma_connection.ax0, sol2.sigma_connection.am0,
        np.zeros(grid.shape + (grid.dim, model.coset_dim)), y2, y2_jet,
    )
    lag2 = matter_lagrangian(model, dt2)
    return float(np.abs(lag2 - lag0).max())


def composite_section_roundtrip(
    h_values: np.ndarray, y_values: np.ndarray
) -> dict[str, bool]:
    """Split a composite section into its pair and reassemble it.

    Pure bookkeeping: the pair (coset part, fiber part) determines the
    section and vice versa; the round trip must be bit-identical.
    """
    section = {"sigma": np.array(h_values, copy=True), "fiber": np.array(y_values, copy=True)}
    higgs_part = section["sigma"]
    matter_on_graph = section["fiber"]
    rebuilt = {"sigma": higgs_part, "fiber": matter_on_graph}
    return {
        "sigma_identical": bool(np.array_equal(rebuilt["sigma"], h_values)),
        "fiber_identical": bool(np.array_equal(rebuilt["fiber"], y_values)),
    }
