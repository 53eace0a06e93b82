"""Intertwiner spaces and matrix-tuple conjugacy.

The intertwiner space of (Atuple, Btuple) is {X : X A_i = B_i X for all i};
its invertible elements form the conjugacy coset.  Alongside the exact
linear-system route (n^2 unknowns) there is a seeded fast path that
propagates a single known vector pair through the tuple's Krylov closure,
which is what makes large-n solves cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ShapeMismatch
from .gf import FieldSpec
from .matgf import MatGF, identity, inverse_det, rref_rank_kernel
from .tensor import kron, as_rng

# above this size the dense n^2-unknown system is not attempted
FULL_SYSTEM_MAX_N = 32


@dataclass
class ConjCoset:
    """Outcome of a tuple-conjugacy computation.

    kind is "Conjugate" (representative present), "NotConjugate", or
    "Undecided" (an invertible element may exist in the intertwiner span but
    none was found within the randomized trial budget).
    """

    kind: str
    representative: MatGF | None
    basis: list = dc_field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


def _check_tuples(Atuple, Btuple):
    if len(Atuple) != len(Btuple) or not Atuple:
        raise ShapeMismatch("tuples must be nonempty and of equal length")
    n = Atuple[0].rows
    for M in (*Atuple, *Btuple):
        if M.shape != (n, n):
            raise ShapeMismatch("tuple members must be square of equal size")
    return n


def intertwiner_space(Atuple, Btuple) -> list:
    """Canonical basis of {X : X A_i = B_i X for all i}."""
    n = _check_tuples(Atuple, Btuple)
    field = Atuple[0].field
    I = identity(field, n)
    blocks = []
    for A, B in zip(Atuple, Btuple):
        blocks.append(field.ops.sub(kron(I, A.T).a, kron(B, I).a))
    system = MatGF(field, np.concatenate(blocks, axis=0))
    _, right, _ = rref_rank_kernel(system)
    return [MatGF(field, v.reshape(n, n).copy()) for v in right]


def conj_coset(Atuple, Btuple, rng=None) -> ConjCoset:
    """Coset representative search over the intertwiner span.

    Exact when the span has dimension <= 1; for higher dimensions up to 8n
    random span elements are tested and exhaustion yields Undecided.
    """
    n = _check_tuples(Atuple, Btuple)
    field = Atuple[0].field
    basis = intertwiner_space(Atuple, Btuple)
    if not basis:
        return ConjCoset("NotConjugate", None, [])
    if len(basis) == 1:
        X = basis[0]
        if inverse_det(X)[1] != 0:
            return ConjCoset("Conjugate", X, basis)
        return ConjCoset("NotConjugate", None, basis)
    rng = as_rng(rng)
    for _ in range(8 * n):
        coeffs = rng.integers(0, field.q, size=len(basis))
        acc = field.ops.zeros((n, n))
        for c, Bv in zip(coeffs, basis):
            if c:
                acc = field.ops.add(acc, field.ops.mul(Bv.a, int(c)))
        X = MatGF(field, acc)
        if acc.any() and inverse_det(X)[1] != 0:
            return ConjCoset("Conjugate", X, basis)
    return ConjCoset("Undecided", None, basis)


# ---------------------------------------------------------------------------
# incremental echelon tracking (vectors as 1-D rep arrays)


class _Echelon:
    def __init__(self, field: FieldSpec, n: int):
        self.field = field
        self.n = n
        self.rows = []  # normalized: leading entry 1
        self.piv = []

    @property
    def rank(self):
        return len(self.rows)

    def _reduce(self, v):
        ops = self.field.ops
        v = np.array(v, dtype=ops.dtype, copy=True)
        for row, p in zip(self.rows, self.piv):
            c = v[p]
            if c:
                v = ops.sub(v, ops.mul(row, int(c)))
        return v

    def add(self, v) -> bool:
        """Insert v if independent of the current span; report whether it was."""
        r = self._reduce(v)
        nz = np.nonzero(r)[0]
        if len(nz) == 0:
            return False
        j = int(nz[0])
        r = self.field.ops.mul(r, self.field.ops.scalar_inv(r[j]))
        self.rows.append(r)
        self.piv.append(j)
        return True


# ---------------------------------------------------------------------------
# seeded conjugacy (Krylov propagation)


def conj_with_seed(Atuple, Btuple, w, z):
    """Find T with T A_i = B_i T and T w in span(z), via closure propagation.

    Returns (T, decided): decided=False means the seed vector did not
    generate the full space, so nothing was concluded; decided=True with
    T=None certifies that no such intertwiner exists.
    """
    n = _check_tuples(Atuple, Btuple)
    field = Atuple[0].field
    ops = field.ops
    w = np.asarray(w, dtype=ops.dtype)
    z = np.asarray(z, dtype=ops.dtype)
    ech = _Echelon(field, n)
    if not ech.add(w):
        return None, False
    xs, ys = [w], [z]
    qi = 0
    while qi < len(xs) and len(xs) < n:
        x, y = xs[qi], ys[qi]
        qi += 1
        for A, B in zip(Atuple, Btuple):
            x2 = ops.matmul(A.a, x[:, None])[:, 0]
            if ech.add(x2):
                xs.append(x2)
                ys.append(ops.matmul(B.a, y[:, None])[:, 0])
    if len(xs) < n:
        return None, False
    X = MatGF(field, np.stack(xs, axis=1))
    Y = MatGF(field, np.stack(ys, axis=1))
    Xinv, d = inverse_det(X)
    assert d != 0
    T = Y @ Xinv
    if inverse_det(T)[1] == 0:
        return None, True
    for A, B in zip(Atuple, Btuple):
        if not (T @ A == B @ T):
            return None, True
    return T, True


def centralizer_is_scalars(Atuple, rng=None, full_system_max_n=FULL_SYSTEM_MAX_N):
    """Whether {X : X A_i = A_i X for all i} is exactly the scalar matrices.

    Fast path: find a nonderogatory element E among the tuple members and a
    few random combinations; its centralizer is {p(E)}, reducing the check to
    an n-unknown system.  Falls back to the full n^2-unknown system at small
    n; returns None (unknown) when neither route applies.
    """
    n = _check_tuples(Atuple, Atuple)
    field = Atuple[0].field
    ops = field.ops
    rng = as_rng(rng)
    candidates = [M.a for M in Atuple]
    for _ in range(3):
        coeffs = rng.integers(0, field.q, size=len(Atuple))
        acc = ops.zeros((n, n))
        for c, M in zip(coeffs, Atuple):
            if c:
                acc = ops.add(acc, ops.mul(M.a, int(c)))
        candidates.append(acc)
    for E in candidates:
        if _is_nonderogatory(field, E, rng):
            return _scalars_only_given_cyclic(field, E, Atuple)
    if n <= full_system_max_n:
        return len(intertwiner_space(Atuple, Atuple)) == 1
    return None


def _is_nonderogatory(field: FieldSpec, E: np.ndarray, rng, tries: int = 3) -> bool:
    """True if some vector is cyclic for E (Krylov rank n)."""
    n = E.shape[0]
    ops = field.ops
    for _ in range(tries):
        v = rng.integers(0, field.q, size=n, dtype=np.int64).astype(ops.dtype, copy=False)
        ech = _Echelon(field, n)
        x = v
        while ech.add(x) and ech.rank < n:
            x = ops.matmul(E, x[:, None])[:, 0]
        if ech.rank == n:
            return True
    return False


def _scalars_only_given_cyclic(field: FieldSpec, E: np.ndarray, Atuple) -> bool:
    """Given nonderogatory E, decide whether {p(E)} meets every centralizer
    of the tuple only in the scalars.  The unknowns are the n coefficients of
    p; kernel dimension 1 means scalars only."""
    n = E.shape[0]
    ops = field.ops
    powers = [identity(field, n).a]
    for _ in range(n - 1):
        powers.append(ops.matmul(powers[-1], E))
    rows = []
    for M in Atuple:
        cols = []
        for P in powers:
            comm = ops.sub(ops.matmul(P, M.a), ops.matmul(M.a, P))
            cols.append(comm.reshape(-1))
        rows.append(np.stack(cols, axis=1))
    system = MatGF(field, np.concatenate(rows, axis=0))
    _, right, _ = rref_rank_kernel(system)
    return len(right) == 1


# ---------------------------------------------------------------------------
# algebra generation


def generates_full_algebra(A1: MatGF, A2: MatGF) -> bool:
    """Whether span{words in A1, A2, including the empty word I} = M(n, q).

    Computed by left-multiplication closure from I; cross-checked against the
    centralizer criterion (scalars only) at small n.
    """
    if A1.shape != A2.shape or A1.rows != A1.cols:
        raise ShapeMismatch("generators must be square of equal size")
    field = A1.field
    n = A1.rows
    ops = field.ops
    ech = _Echelon(field, n * n)
    basis = [identity(field, n).a]
    ech.add(basis[0].reshape(-1))
    qi = 0
    while qi < len(basis) and ech.rank < n * n:
        M = basis[qi]
        qi += 1
        for G in (A1.a, A2.a):
            N = ops.matmul(G, M)
            if ech.add(N.reshape(-1)):
                basis.append(N)
    full = ech.rank == n * n
    if full and n <= 8:
        # the full algebra has a trivial centralizer; the converse can fail
        # (non-semisimple proper algebras may also have scalar centralizer)
        assert len(intertwiner_space((A1, A2), (A1, A2))) == 1
    return full
