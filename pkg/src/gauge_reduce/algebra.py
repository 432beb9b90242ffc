"""Matrix Lie algebra bases with a designated subalgebra/complement split.

An :class:`AlgebraBasis` holds a list of square matrices ``e_p`` spanning a
real Lie algebra, together with an index split into an "h-part" (the
subalgebra of the unbroken subgroup) and an "f-part" (its complement).
Elements are handled as real coefficient vectors in this basis; the
conversion matrix <-> coefficients uses the Frobenius pairing
``<X, Y> = Re sum(conj(X) * Y)`` and the (nonsingular) Gram matrix of the
basis.

Structure constants are computed once from matrix commutators,
``[e_p, e_q] = c[r, p, q] e_r``, and every bracket in coefficient space goes
through them.  The split is *reductive* when ``[h, f]`` stays inside the
f-part; that property is what later allows a connection to be cut cleanly
into an h-valued piece and an f-valued remainder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, StructureError

__all__ = ["AlgebraBasis", "frobenius"]


def frobenius(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Real Frobenius pairing Re<x, y>, batched over leading axes."""
    return np.real(np.einsum("...ij,...ij->...", np.conj(x), y))


@dataclass(frozen=True)
class AlgebraBasis:
    """Basis of a matrix Lie algebra with an h/f index split.

    Parameters
    ----------
    basis:
        Array of shape ``(dim, k, k)``, real or complex.
    h_indices, f_indices:
        Disjoint index tuples covering ``range(dim)``; ``h_indices`` must
        span a subalgebra.
    """

    basis: np.ndarray
    h_indices: tuple[int, ...]
    f_indices: tuple[int, ...]
    atol: float = field(default=1e-12)

    def __post_init__(self):
        basis = np.asarray(self.basis)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "h_indices", tuple(self.h_indices))
        object.__setattr__(self, "f_indices", tuple(self.f_indices))
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise DimensionError("basis must have shape (dim, k, k)")
        if sorted(self.h_indices + self.f_indices) != list(range(self.dim)):
            raise StructureError("h_indices and f_indices must partition the basis")
        if np.abs(np.linalg.det(self.gram)) < 1e-12:
            raise StructureError("basis matrices are not linearly independent")
        closure = self._h_closure_residual()
        if closure > self.atol:
            raise StructureError(f"h-part does not close under brackets (residual {closure:.3e})")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def matrix_size(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        return np.real(np.einsum("pij,qij->pq", np.conj(self.basis), self.basis))

    @cached_property
    def _gram_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gram)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[r, p, q] with [e_p, e_q] = c[r, p, q] e_r, from matrix commutators."""
        comms = np.einsum("pij,qjk->pqik", self.basis, self.basis)
        comms = comms - np.transpose(comms, (1, 0, 2, 3))
        c = self.to_coefficients(comms)  # (p, q, r)
        return np.transpose(c, (2, 0, 1))

    @cached_property
    def structure_residual(self) -> float:
        """Worst per-entry defect of the commutator reconstruction."""
        rebuilt = np.einsum("rpq,rij->pqij", self.structure_constants, self.basis)
        comms = np.einsum("pij,qjk->pqik", self.basis, self.basis)
        comms = comms - np.transpose(comms, (1, 0, 2, 3))
        return float(np.abs(rebuilt - comms).max())

    # -- coefficient conversions -------------------------------------------------

    def to_matrix(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs)
        if coeffs.shape[-1] != self.dim:
            raise DimensionError(f"expected {self.dim} coefficients, got {coeffs.shape[-1]}")
        return np.einsum("...p,pij->...ij", coeffs, self.basis)

    def to_coefficients(self, x: np.ndarray) -> np.ndarray:
        """Project matrices onto the basis span (components outside it are dropped)."""
        b = np.real(np.einsum("pij,...ij->...p", np.conj(self.basis), np.asarray(x)))
        return b @ self._gram_inv.T

    # -- bracket and split -------------------------------------------------------

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coefficients of [X, Y] via structure constants."""
        x, y = np.asarray(x), np.asarray(y)
        if x.shape[-1] != self.dim or y.shape[-1] != self.dim:
            raise DimensionError("bracket arguments must have length dim")
        return np.einsum("rpq,...p,...q->...r", self.structure_constants, x, y)

    def h_project(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(coeffs))
        out[..., list(self.h_indices)] = np.asarray(coeffs)[..., list(self.h_indices)]
        return out

    def f_project(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(coeffs))
        out[..., list(self.f_indices)] = np.asarray(coeffs)[..., list(self.f_indices)]
        return out

    def project_split(self, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split coefficients into (h_part, f_part); the parts sum to the input exactly."""
        return self.h_project(coeffs), self.f_project(coeffs)

    # -- structural checks ---------------------------------------------------------

    def _h_closure_residual(self) -> float:
        worst = 0.0
        hs = list(self.h_indices)
        fo = list(self.f_indices)
        if not hs or not fo:
            return 0.0
        for a in hs:
            for a2 in hs:
                comm = self.basis[a] @ self.basis[a2] - self.basis[a2] @ self.basis[a]
                coeff = self.to_coefficients(comm)
                worst = max(worst, float(np.abs(coeff[fo]).max()))
        return worst

    def check_reductive(self) -> tuple[bool, float]:
        """True iff [h, f] has no h-components; also returns the largest violation."""
        worst = 0.0
        hs = list(self.h_indices)
        fo = list(self.f_indices)
        for a in hs:
            for b in fo:
                coeff = self.bracket(_unit(self.dim, a), _unit(self.dim, b))
                if hs:
                    worst = max(worst, float(np.abs(coeff[hs]).max()))
        return worst <= self.atol, worst


def _unit(dim: int, p: int) -> np.ndarray:
    e = np.zeros(dim)
    e[p] = 1.0
    return e
