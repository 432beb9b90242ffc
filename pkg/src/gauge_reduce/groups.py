"""Concrete matrix group models with coset-space fibers and matter fibers.

Each :class:`GroupModel` packages, for a pair (G, H):

* an :class:`~gauge_reduce.algebra.AlgebraBasis` with the h/f split,
* membership residuals for G and for the subgroup H,
* a linear model of the quotient G/H: coset points are real coordinate
  vectors ``sigma`` of length ``coset_dim`` on which G acts by matrices
  ``action_matrix(g)``; the distinguished center ``sigma0`` is the image of
  the identity,
* coordinate charts on the coset model, each with a smooth local section
  ``z`` into G normalized so that ``z(sigma0) = identity``,
* generator matrices ``J_p`` of the infinitesimal coset action and ``I_a``
  of the H-action on the matter fiber V.

Registered models (``get_group_model``):

``SU2_U1``
    G = SU(2), H = diagonal phases.  Coset model: unit vectors in R^3 via
    ``g -> coords of g sigma_z g^dagger``; V = C^2.
``SO3_SO2``
    G = SO(3), H = rotations about the z axis.  Coset model: unit vectors,
    ``g -> g zhat``; V = R^2 rotated by the z-block.
``GL4_SO13``
    G = GL+(4, R), H = matrices preserving the Minkowski form eta with
    positive determinant.  Coset model: symmetric signature-(1,3) matrices
    encoded as 10-vectors, ``g -> g eta g^T``; V = R^4 with the eta fiber
    metric.

Generator convention: ``J_p`` and ``I_a`` are the derivatives of the left
actions along the basis directions, so they obey the same commutation
relations as the structure constants.  All covariant differentials in this
package consequently carry a plus sign, ``D = d(field) + A^p J_p(field)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.linalg

from .algebra import AlgebraBasis
from .errors import ChartDomainError, MembershipError, ModelInconsistencyError, UsageError

__all__ = [
    "GroupModel",
    "CosetChart",
    "get_group_model",
    "list_group_models",
    "expm_field",
]

MEMBERSHIP_TOL = 1e-10

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
Z_HAT = np.array([0.0, 0.0, 1.0])

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def expm_field(x: np.ndarray) -> np.ndarray:
    """Matrix exponential over the trailing (k, k) axes of a stacked array."""
    return scipy.linalg.expm(np.asarray(x))


def _mtrans(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2)


@dataclass(frozen=True)
class CosetChart:
    """A chart of the coset model: a domain predicate and a local section."""

    name: str
    contains: Callable[[np.ndarray], np.ndarray]
    section: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GroupModel:
    name: str
    algebra: AlgebraBasis
    coset_dim: int
    center: np.ndarray
    higgs_generators: np.ndarray  # (dim_g, m, m)
    charts: tuple[CosetChart, ...]
    section_lift: np.ndarray  # (dim_g, m): tangent coords at center -> algebra coeffs
    fiber_dim: int
    fiber_dtype: type
    fiber_metric: np.ndarray  # (v, v)
    fiber_generators: np.ndarray  # (n_h, v, v), aligned with algebra.h_indices
    _membership: Callable[[np.ndarray], np.ndarray]
    _h_membership: Callable[[np.ndarray], np.ndarray]
    _action_matrix: Callable[[np.ndarray], np.ndarray]
    _constraint: Callable[[np.ndarray], np.ndarray]
    _fiber_rep: Callable[[np.ndarray], np.ndarray]
    _chart_pick: Callable[[np.ndarray], np.ndarray]  # sigma -> integer chart index

    # -- group level ---------------------------------------------------------

    def membership_residual(self, g: np.ndarray) -> np.ndarray:
        return self._membership(np.asarray(g))

    def h_membership_residual(self, g: np.ndarray) -> np.ndarray:
        return self._h_membership(np.asarray(g))

    def require_member(self, g: np.ndarray, tol: float = MEMBERSHIP_TOL) -> None:
        res = np.max(self.membership_residual(g))
        if not np.isfinite(res) or res > tol:
            raise MembershipError(f"{self.name}: membership residual {res:.3e} > {tol:.1e}")

    def exp(self, coeffs: np.ndarray, t: float = 1.0) -> np.ndarray:
        """Exponential of ``t * X`` for X given by basis coefficients."""
        coeffs = np.asarray(coeffs, dtype=float)
        if not np.all(np.isfinite(coeffs)):
            raise MembershipError("non-finite algebra coefficients")
        return expm_field(t * self.algebra.to_matrix(coeffs))

    def identity(self) -> np.ndarray:
        k = self.algebra.matrix_size
        return np.eye(k, dtype=self.algebra.basis.dtype)

    def adjoint_coefficients(self, g: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients of g X g^-1 for X given by coefficients."""
        x = self.algebra.to_matrix(coeffs)
        gx = np.asarray(g) @ x @ np.linalg.inv(np.asarray(g))
        return self.algebra.to_coefficients(gx)

    # -- coset model -----------------------------------------------------------

    def constraint_residual(self, sigma: np.ndarray) -> np.ndarray:
        """Deviation of coordinates from the coset model (0 for valid points)."""
        return self._constraint(np.asarray(sigma))

    def coset_project(self, g: np.ndarray) -> np.ndarray:
        """Quotient projection G -> G/H in model coordinates."""
        self.require_member(g)
        return self.action_matrix(g) @ self.center

    def action_matrix(self, g: np.ndarray) -> np.ndarray:
        """Matrix of the (linear) left G-action on coset coordinates."""
        return self._action_matrix(np.asarray(g))

    def coset_action(self, g: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        return np.einsum("...ij,...j->...i", self.action_matrix(g), np.asarray(sigma))

    def infinitesimal_action(self, coeffs: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        """(sum_p x^p J_p) sigma for algebra coefficients x."""
        return np.einsum(
            "...p,pij,...j->...i", np.asarray(coeffs), self.higgs_generators, np.asarray(sigma)
        )

    def chart_for(self, sigma: np.ndarray) -> CosetChart:
        """Single chart whose domain contains every supplied point."""
        pts = np.asarray(sigma).reshape(-1, self.coset_dim)
        for chart in self.charts:
            if bool(np.all(chart.contains(pts))):
                return chart
        raise ChartDomainError(f"{self.name}: points leave every section chart domain")

    def chart_by_name(self, name: str) -> CosetChart:
        for chart in self.charts:
            if chart.name == name:
                return chart
        raise UsageError(f"{self.name}: unknown coset chart {name!r}")

    def section(self, sigma: np.ndarray, chart: str | None = None) -> np.ndarray:
        """Local section value z(sigma) with coset_project(z(sigma)) = sigma.

        With ``chart=None`` each point uses the deterministic per-point chart
        choice; pass a chart name to force one chart (required for fields
        whose values must vary smoothly).
        """
        sigma = np.asarray(sigma, dtype=float)
        lead = sigma.shape[:-1]
        pts = sigma.reshape(-1, self.coset_dim)
        if chart is not None:
            ch = self.chart_by_name(chart)
            if not np.all(ch.contains(pts)):
                raise ChartDomainError(f"{self.name}: point outside chart {chart!r}")
            out = ch.section(pts)
        elif len(self.charts) == 1:
            out = self.charts[0].section(pts)
        else:
            idx = self._chart_pick(pts)
            out = None
            for i, ch in enumerate(self.charts):
                sel = idx == i
                if not np.any(sel):
                    continue
                vals = ch.section(pts[sel])
                if out is None:
                    out = np.zeros((len(pts),) + vals.shape[-2:], dtype=vals.dtype)
                out[sel] = vals
        return out.reshape(lead + out.shape[-2:])

    # -- matter fiber ------------------------------------------------------------

    def fiber_rep(self, rho: np.ndarray) -> np.ndarray:
        """Matrix of the H-representation on V for H-elements rho."""
        return self._fiber_rep(np.asarray(rho))

    def fiber_infinitesimal(self, h_coeffs: np.ndarray, v: np.ndarray) -> np.ndarray:
        """(sum_a x^a I_a) v, with x indexed like algebra.h_indices."""
        return np.einsum("...a,aij,...j->...i", np.asarray(h_coeffs), self.fiber_generators, v)

    def fiber_norm2(self, v: np.ndarray) -> np.ndarray:
        """H-invariant squared fiber norm <v, v> (indefinite for GL4_SO13)."""
        return np.real(np.einsum("...i,ij,...j->...", np.conj(v), self.fiber_metric, v))

    # -- induced action on (G x V)/H ----------------------------------------------

    def induced_factor(
        self, g: np.ndarray, sigma: np.ndarray, tol: float = MEMBERSHIP_TOL
    ) -> tuple[np.ndarray, np.ndarray]:
        """Image point and compensating H-factor of the induced action.

        Returns ``(sigma', rho')`` with ``rho' = z(sigma')^-1 g z(sigma)``.
        A failed H-membership check on rho' signals broken section or chart
        bookkeeping and raises :class:`ModelInconsistencyError`.
        """
        sigma2 = self.coset_action(g, sigma)
        za = self.section(np.asarray(sigma))
        zb = self.section(sigma2)
        rho = np.linalg.inv(zb) @ np.asarray(g) @ za
        res = np.max(self.h_membership_residual(rho))
        if not np.isfinite(res) or res > tol:
            raise ModelInconsistencyError(
                f"{self.name}: compensating factor leaves H (residual {res:.3e})"
            )
        return sigma2, rho

    def induced_action(
        self, g: np.ndarray, sigma: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Induced G-action on coset-point / fiber-vector pairs."""
        sigma2, rho = self.induced_factor(g, sigma)
        v2 = np.einsum("...ij,...j->...i", self.fiber_rep(rho), np.asarray(v))
        return sigma2, v2


# ---------------------------------------------------------------------------
# Sphere-based models: SU(2)/U(1) and SO(3)/SO(2)
# ---------------------------------------------------------------------------


def _so3_generators() -> np.ndarray:
    gen = np.zeros((3, 3, 3))
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
        eps[i, k, j] = -1.0
        eps[k, i, j] = 1.0
        eps[j, k, i] = 1.0
        eps[k, j, i] = -1.0
    for p in range(3):
        gen[p] = -eps[p]
    return gen


SO3_GEN = _so3_generators()


def _unit_sphere(sigma: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(sigma, axis=-1, keepdims=True)
    return sigma / np.where(n == 0, 1.0, n)


def _geodesic_rotation_vector(s: np.ndarray, pole: np.ndarray) -> np.ndarray:
    """Rotation vector carrying ``pole`` to unit vectors ``s`` along the geodesic."""
    c = np.clip(np.einsum("...i,i->...", s, pole), -1.0, 1.0)
    theta = np.arccos(c)
    small = theta < 1e-6
    sin = np.where(small, 1.0, np.sin(theta))
    scale = np.where(small, 1.0 + theta**2 / 6.0, theta / sin)
    return scale[..., None] * np.cross(np.broadcast_to(pole, s.shape), s)


def _sphere_charts(exp_rotvec: Callable[[np.ndarray], np.ndarray], flip: np.ndarray):
    """North/south cap charts for a unit-sphere coset model.

    ``exp_rotvec`` maps an so(3) rotation vector to a group element whose
    coset action realizes that rotation; ``flip`` is the group element for
    the half-turn about the x axis (carrying the north pole to the south).
    """

    def north_contains(sigma):
        return _unit_sphere(np.asarray(sigma))[..., 2] > -0.2

    def south_contains(sigma):
        return _unit_sphere(np.asarray(sigma))[..., 2] < 0.2

    def north_section(sigma):
        s = _unit_sphere(np.asarray(sigma, dtype=float))
        return exp_rotvec(_geodesic_rotation_vector(s, Z_HAT))

    def south_section(sigma):
        s = _unit_sphere(np.asarray(sigma, dtype=float))
        g = exp_rotvec(_geodesic_rotation_vector(s, -Z_HAT))
        return g @ flip

    return (
        CosetChart("north", north_contains, north_section),
        CosetChart("south", south_contains, south_section),
    )


def _sphere_chart_pick(sigma: np.ndarray) -> np.ndarray:
    return (np.asarray(sigma)[..., 2] < 0.0).astype(int)


_SPHERE_LIFT = np.array(
    [
        [0.0, -1.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ]
)  # column m: coefficients of zhat x e_m


def _build_so3_so2() -> GroupModel:
    algebra = AlgebraBasis(SO3_GEN, h_indices=(2,), f_indices=(0, 1))

    def membership(g):
        gt = _mtrans(g)
        ortho = np.abs(gt @ g - np.eye(3)).max(axis=(-2, -1))
        return ortho + np.abs(np.linalg.det(g) - 1.0)

    def h_membership(g):
        fix = np.abs(np.einsum("...ij,j->...i", g, Z_HAT) - Z_HAT).max(axis=-1)
        return membership(g) + fix

    def exp_rotvec(om):
        return expm_field(np.einsum("...p,pij->...ij", om, SO3_GEN))

    flip = expm_field(np.pi * SO3_GEN[0])

    def constraint(sigma):
        return np.abs(np.linalg.norm(sigma, axis=-1) - 1.0)

    def fiber_rep(rho):
        return rho[..., :2, :2]

    model = GroupModel(
        name="SO3_SO2",
        algebra=algebra,
        coset_dim=3,
        center=Z_HAT.copy(),
        higgs_generators=SO3_GEN.copy(),
        charts=_sphere_charts(exp_rotvec, flip),
        section_lift=_SPHERE_LIFT.copy(),
        fiber_dim=2,
        fiber_dtype=float,
        fiber_metric=np.eye(2),
        fiber_generators=SO3_GEN[2:3, :2, :2].copy(),
        _membership=membership,
        _h_membership=h_membership,
        _action_matrix=lambda g: g,
        _constraint=constraint,
        _fiber_rep=fiber_rep,
        _chart_pick=_sphere_chart_pick,
    )
    return model


def _build_su2_u1() -> GroupModel:
    basis = -0.5j * PAULI
    algebra = AlgebraBasis(basis, h_indices=(2,), f_indices=(0, 1))

    def action_matrix(g):
        gd = np.conj(_mtrans(g))
        return 0.5 * np.real(np.einsum("pij,...jk,qkl,...il->...pq", PAULI, g, PAULI, np.conj(g)))

    def membership(g):
        gd = np.conj(_mtrans(g))
        unit = np.abs(gd @ g - np.eye(2)).max(axis=(-2, -1))
        return unit + np.abs(np.linalg.det(g) - 1.0)

    def h_membership(g):
        offdiag = np.abs(g[..., 0, 1]) + np.abs(g[..., 1, 0])
        return membership(g) + offdiag

    def exp_rotvec(om):
        return expm_field(np.einsum("...p,pij->...ij", om, basis))

    flip = expm_field(np.pi * basis[0])

    def constraint(sigma):
        return np.abs(np.linalg.norm(sigma, axis=-1) - 1.0)

    model = GroupModel(
        name="SU2_U1",
        algebra=algebra,
        coset_dim=3,
        center=Z_HAT.copy(),
        higgs_generators=SO3_GEN.copy(),  # adjoint action covers SO(3) rotations
        charts=_sphere_charts(exp_rotvec, flip),
        section_lift=_SPHERE_LIFT.copy(),
        fiber_dim=2,
        fiber_dtype=complex,
        fiber_metric=np.eye(2),
        fiber_generators=basis[2:3].copy(),
        _membership=membership,
        _h_membership=h_membership,
        _action_matrix=action_matrix,
        _constraint=constraint,
        _fiber_rep=lambda rho: rho,
        _chart_pick=_sphere_chart_pick,
    )
    return model


# ---------------------------------------------------------------------------
# GL+(4)/SO(1,3): symmetric signature-(1,3) matrices
# ---------------------------------------------------------------------------


def _sym4_basis() -> np.ndarray:
    mats = []
    for i in range(4):
        m = np.zeros((4, 4))
        m[i, i] = 1.0
        mats.append(m)
    inv = 1.0 / np.sqrt(2.0)
    for i in range(4):
        for j in range(i + 1, 4):
            m = np.zeros((4, 4))
            m[i, j] = m[j, i] = inv
            mats.append(m)
    return np.array(mats)


SYM4 = _sym4_basis()  # orthonormal basis of symmetric 4x4 matrices


def sym_to_vec(s: np.ndarray) -> np.ndarray:
    return np.einsum("kij,...ij->...k", SYM4, np.asarray(s))


def vec_to_sym(v: np.ndarray) -> np.ndarray:
    return np.einsum("...k,kij->...ij", np.asarray(v), SYM4)


def _gl4_basis() -> tuple[np.ndarray, tuple[int, ...], tuple[int, ...]]:
    def E(i, j):
        m = np.zeros((4, 4))
        m[i, j] = 1.0
        return m

    h = [
        E(2, 1) - E(1, 2),  # spatial rotations
        E(1, 3) - E(3, 1),
        E(3, 2) - E(2, 3),
        E(0, 1) + E(1, 0),  # boosts
        E(0, 2) + E(2, 0),
        E(0, 3) + E(3, 0),
    ]
    f = [E(i, i) for i in range(4)]
    f += [E(1, 2) + E(2, 1), E(1, 3) + E(3, 1), E(2, 3) + E(3, 2)]
    f += [E(0, i) - E(i, 0) for i in (1, 2, 3)]
    basis = np.array(h + f)
    return basis, tuple(range(6)), tuple(range(6, 16))


def _gl4_section(sigma_mat: np.ndarray) -> np.ndarray:
    """Frame with S eta S^T = sigma via eigendecomposition.

    Eigenvalues are ordered descending with a stable sort, each eigenvector's
    largest-magnitude entry is made positive, and if the frame is
    orientation-reversing the last column is flipped.  Exactly diagonal
    input (the Minkowski form and its conformal rescalings) maps to the
    positive diagonal square root, so the center goes to the identity.
    """
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    w, q = np.linalg.eigh(sigma_mat)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    q = np.take_along_axis(q, order[..., None, :], axis=-1)
    # column sign fix, anchored on the diagonal entry (stable for frames near
    # the identity, where eigenvector j stays within 90 degrees of axis j);
    # fall back to the largest-|entry| component when the anchor is weak
    diag = np.diagonal(q, axis1=-2, axis2=-1)
    pick = np.argmax(np.abs(q), axis=-2, keepdims=True)
    fallback = np.take_along_axis(q, pick, axis=-2)[..., 0, :]
    anchor = np.where(np.abs(diag) >= 0.2, diag, fallback)
    signs = np.sign(anchor)[..., None, :]
    signs = np.where(signs == 0, 1.0, signs)
    q = q * signs
    neg = np.linalg.det(q) < 0
    colsign = np.ones(q.shape[:-2] + (4,))
    colsign[..., 3] = np.where(neg, -1.0, 1.0)
    q = q * colsign[..., None, :]
    return q * np.sqrt(np.abs(w))[..., None, :]


def _gl4_signature_ok(sigma_mat: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(np.asarray(sigma_mat, dtype=float))
    return (w[..., 3] > 1e-12) & (w[..., 2] < -1e-12)


def _build_gl4_so13() -> GroupModel:
    basis, h_idx, f_idx = _gl4_basis()
    algebra = AlgebraBasis(basis, h_indices=h_idx, f_indices=f_idx)

    def membership(g):
        det = np.linalg.det(g)
        res = np.abs(det) - det
        return np.where(np.abs(det) < 1e-12, np.inf, res)

    def h_membership(g):
        gt = _mtrans(g)
        pseudo = np.abs(gt @ ETA @ g - ETA).max(axis=(-2, -1))
        det = np.linalg.det(g)
        return pseudo + (np.abs(det) - det)

    def action_matrix(g):
        gb = np.einsum("...ia,kab,...jb->...kij", g, SYM4, g)
        return np.einsum("lij,...kij->...lk", SYM4, gb)

    def constraint(sigma):
        ok = _gl4_signature_ok(vec_to_sym(sigma))
        return np.where(ok, 0.0, 1.0)

    def contains(sigma):
        return _gl4_signature_ok(vec_to_sym(sigma))

    def section(sigma):
        return _gl4_section(vec_to_sym(sigma))

    # J_p in coordinates: column k of J_p is vec(e_p B_k + B_k e_p^T)
    higgs_gen = np.einsum(
        "lij,pkij->plk",
        SYM4,
        np.einsum("pia,kaj->pkij", basis, SYM4)
        + np.einsum("kia,paj->pkij", SYM4, np.transpose(basis, (0, 2, 1))),
    )

    lift = algebra.to_coefficients(0.5 * np.einsum("mij,jk->mik", SYM4, ETA)).T  # (16, 10)

    model = GroupModel(
        name="GL4_SO13",
        algebra=algebra,
        coset_dim=10,
        center=sym_to_vec(ETA),
        higgs_generators=higgs_gen,
        charts=(CosetChart("sym", contains, section),),
        section_lift=lift,
        fiber_dim=4,
        fiber_dtype=float,
        fiber_metric=ETA.copy(),
        fiber_generators=basis[list(h_idx)].copy(),
        _membership=membership,
        _h_membership=h_membership,
        _action_matrix=action_matrix,
        _constraint=constraint,
        _fiber_rep=lambda rho: rho,
        _chart_pick=lambda sigma: np.zeros(np.asarray(sigma).shape[:-1], dtype=int),
    )
    return model


_BUILDERS = {
    "SU2_U1": _build_su2_u1,
    "SO3_SO2": _build_so3_so2,
    "GL4_SO13": _build_gl4_so13,
}


@lru_cache(maxsize=None)
def get_group_model(name: str) -> GroupModel:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UsageError(f"unknown group model {name!r}; known: {sorted(_BUILDERS)}") from None
    return builder()


def list_group_models() -> list[str]:
    return sorted(_BUILDERS)
