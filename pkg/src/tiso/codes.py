"""Matrix codes: subspaces of M(n, q) with a canonical echelon basis,
the trace bilinear form Tr(AB), and the hull C intersect C-perp."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, Singular
from .gf import FieldSpec
from .matgf import MatGF, inverse_det, rref, rref_rank_kernel, trace
from .tensor import Tensor3, slices


@dataclass
class MatrixCode:
    """Subspace of M(ambient_n, q), basis rows echelonized as n^2-vectors.

    The reduced-echelon basis is canonical, so equal subspaces compare equal.
    """

    field: FieldSpec
    ambient_n: int
    basis_flat: np.ndarray  # dim x n^2, reduced row echelon form
    slices_independent: bool = True

    @property
    def dim(self) -> int:
        return self.basis_flat.shape[0]

    def basis(self) -> list:
        n = self.ambient_n
        return [MatGF(self.field, self.basis_flat[i].reshape(n, n).copy())
                for i in range(self.dim)]

    def __eq__(self, other):
        return (isinstance(other, MatrixCode) and self.field == other.field
                and self.ambient_n == other.ambient_n
                and self.basis_flat.shape == other.basis_flat.shape
                and bool((self.basis_flat == other.basis_flat).all()))

    def __repr__(self):
        return f"MatrixCode(dim={self.dim} in M({self.ambient_n}, {self.field.q}))"


def code_from_matrices(field: FieldSpec, mats: list, ambient_n: int) -> MatrixCode:
    """Span of the given matrices; flags whether they were independent."""
    if not mats:
        return MatrixCode(field, ambient_n, field.ops.zeros((0, ambient_n * ambient_n)))
    stacked = np.stack([M.a.reshape(-1) for M in mats], axis=0)
    R, pivots = rref(field, stacked)
    code = MatrixCode(field, ambient_n, R[: len(pivots)].copy(),
                      slices_independent=(len(pivots) == len(mats)))
    return code


def code_from_slices(A: Tensor3, direction: str) -> MatrixCode:
    mats = slices(A, direction)
    n = mats[0].rows
    if mats[0].cols != n:
        raise ShapeMismatch("matrix codes need square slices")
    return code_from_matrices(A.field, mats, n)


def gram_trace_form(C: MatrixCode) -> MatGF:
    """G(i,j) = Tr(B_i B_j) over the code basis; symmetric."""
    field = C.field
    n = C.ambient_n
    d = C.dim
    G = field.ops.zeros((d, d))
    if d:
        # Tr(B_i B_j) = sum_{a,b} B_i(a,b) B_j(b,a): a dot product of flattenings
        flat = C.basis_flat
        flat_t = np.stack(
            [C.basis_flat[i].reshape(n, n).T.reshape(-1) for i in range(d)], axis=0)
        G = field.ops.matmul(flat, flat_t.T)
    return MatGF(field, G)


def hull(C: MatrixCode) -> MatrixCode:
    """H(C) = {X in C : Tr(XY) = 0 for all Y in C}, via the Gram kernel."""
    field = C.field
    G = gram_trace_form(C)
    _, right, _ = rref_rank_kernel(G)
    if not right:
        return MatrixCode(field, C.ambient_n,
                          field.ops.zeros((0, C.ambient_n ** 2)))
    K = np.stack(right, axis=0)  # coefficient vectors in the code basis
    flat = field.ops.matmul(K, C.basis_flat)
    R, pivots = rref(field, flat)
    return MatrixCode(field, C.ambient_n, R[: len(pivots)].copy())


def conjugate_code(C: MatrixCode, T: MatGF) -> MatrixCode:
    """The code T C T^{-1}."""
    Tinv, d = inverse_det(T)
    if d == 0:
        raise Singular("conjugating matrix is singular")
    mats = [T @ M @ Tinv for M in C.basis()]
    return code_from_matrices(C.field, mats, C.ambient_n)


def equivalent_code(C: MatrixCode, L: MatGF, R: MatGF) -> MatrixCode:
    """The two-sided image {L^t M R : M in C}."""
    if inverse_det(L)[1] == 0 or inverse_det(R)[1] == 0:
        raise Singular("equivalence matrices must be invertible")
    Lt = L.T
    mats = [Lt @ M @ R for M in C.basis()]
    return code_from_matrices(C.field, mats, C.ambient_n)


def trace_pairing(X: MatGF, Y: MatGF) -> int:
    return trace(X @ Y)
