"""Dense linear algebra over F_q.

Matrices wrap numpy arrays of canonical field reps.  Prime fields run on
vectorized int64 modular arithmetic (object dtype above the overflow
threshold); extension fields go through the table-driven ops in
:mod:`tiso.gf`.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSimpleEigenvalue, ShapeMismatch
from .gf import FieldSpec
from .poly import Poly, poly, poly_divmod, poly_eval, roots_in_Fq


@dataclass
class MatGF:
    """Immutable-by-convention dense matrix over a finite field."""

    field: FieldSpec
    a: np.ndarray  # 2-D array of canonical reps

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def __eq__(self, other):
        return (isinstance(other, MatGF) and self.field == other.field
                and self.a.shape == other.a.shape and bool((self.a == other.a).all()))

    def __add__(self, other):
        return MatGF(self.field, self.field.ops.add(self.a, other.a))

    def __sub__(self, other):
        return MatGF(self.field, self.field.ops.sub(self.a, other.a))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ShapeMismatch("matmul shape mismatch")
        return MatGF(self.field, self.field.ops.matmul(self.a, other.a))

    def scale(self, c: int):
        return MatGF(self.field, self.field.ops.mul(self.a, c))

    @property
    def T(self):
        return MatGF(self.field, self.a.T.copy())

    def copy(self):
        return MatGF(self.field, self.a.copy())

    def tolist(self):
        return [[int(x) for x in row] for row in self.a]

    def __repr__(self):
        return f"MatGF({self.tolist()} over {self.field})"


def mat(field: FieldSpec, rows) -> MatGF:
    ops = field.ops
    arr = np.array([[field.check(int(x)) for x in r] for r in rows], dtype=ops.dtype)
    if arr.ndim != 2:
        raise ShapeMismatch("expected a 2-D matrix")
    return MatGF(field, arr)


def zeros(field: FieldSpec, r: int, c: int) -> MatGF:
    return MatGF(field, field.ops.zeros((r, c)))


def identity(field: FieldSpec, n: int) -> MatGF:
    a = field.ops.zeros((n, n))
    for i in range(n):
        a[i, i] = 1
    return MatGF(field, a)


# ---------------------------------------------------------------------------
# elimination


def rref(field: FieldSpec, M: np.ndarray, pivot_cols_limit=None):
    """Reduced row-echelon form of M (a raw rep array).

    Returns (R, pivot_cols).  Row operations span the full width, pivots are
    searched only in the first `pivot_cols_limit` columns (for augmented
    systems).
    """
    ops = field.ops
    R = np.array(M, dtype=ops.dtype, copy=True)
    rows, cols = R.shape
    limit = cols if pivot_cols_limit is None else pivot_cols_limit
    pivots = []
    r = 0
    for c in range(limit):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        inv = ops.scalar_inv(R[r, c])
        R[r] = ops.mul(R[r], inv)
        other = np.nonzero(R[:, c])[0]
        other = other[other != r]
        if len(other):
            R[other] = ops.sub(R[other], ops.mul(R[other, c][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rref_rank_kernel(A: MatGF):
    """(rank, right kernel basis, left kernel basis), kernels canonical.

    Right-kernel elements are column vectors (1-D arrays), left-kernel
    elements are row vectors.
    """
    field = A.field
    R, pivots = rref(field, A.a)
    rank = len(pivots)
    right = _kernel_from_rref(field, R, pivots, A.cols)
    Rt, pivots_t = rref(field, A.a.T)
    left = _kernel_from_rref(field, Rt, pivots_t, A.rows)
    return rank, right, left


def _kernel_from_rref(field, R, pivots, ncols):
    ops = field.ops
    free = [c for c in range(ncols) if c not in set(pivots)]
    if not free:
        return []
    basis = ops.zeros((len(free), ncols))
    basis[np.arange(len(free)), free] = 1
    if pivots:
        # standard basis off the reduced echelon form: vector for free column
        # f has -R[i, f] at pivot column i.  This basis is canonical (it is a
        # function of the kernel as a subspace, via the canonical echelon form
        # of the orthogonal row space).
        basis[:, list(pivots)] = ops.neg(R[: len(pivots), free].T)
    return [basis[i] for i in range(len(free))]


def solve_linear(A: MatGF, b: np.ndarray, side: str = "right"):
    """Solve A x = b (right) or x A = b (left).

    Returns (particular, kernel_basis) or None when inconsistent.
    """
    field = A.field
    if side == "left":
        res = solve_linear(A.T, np.asarray(b), side="right")
        return res
    ops = field.ops
    b = np.asarray(b).reshape(-1)
    if b.shape[0] != A.rows:
        raise ShapeMismatch("rhs length mismatch")
    aug = np.concatenate([A.a, b[:, None].astype(A.a.dtype, copy=False)], axis=1)
    R, pivots = rref(field, aug, pivot_cols_limit=A.cols)
    # inconsistent iff a nonzero entry remains in the last column below pivots
    for i in range(len(pivots), A.rows):
        if R[i, A.cols] != 0:
            return None
    x = ops.zeros((A.cols,))
    for i, pc in enumerate(pivots):
        x[pc] = R[i, A.cols]
    _, right, _ = rref_rank_kernel(A)
    return x, right


def inverse_det(A: MatGF):
    """(inverse or None, determinant)."""
    field = A.field
    ops = field.ops
    n = A.rows
    if n != A.cols:
        raise ShapeMismatch("inverse of non-square matrix")
    R = np.concatenate([A.a, identity(field, n).a], axis=1).astype(ops.dtype)
    det = 1
    for c in range(n):
        nz = np.nonzero(R[c:, c])[0]
        if len(nz) == 0:
            return None, 0
        pr = c + int(nz[0])
        if pr != c:
            R[[c, pr]] = R[[pr, c]]
            det = field.neg(det)
        piv = int(R[c, c])
        det = field.mul(det, piv)
        R[c] = ops.mul(R[c], ops.scalar_inv(piv))
        other = np.nonzero(R[:, c])[0]
        other = other[other != c]
        if len(other):
            R[other] = ops.sub(R[other], ops.mul(R[other, c][:, None], R[c][None, :]))
    return MatGF(field, R[:, n:].copy()), det


def det(A: MatGF) -> int:
    return inverse_det(A)[1]


# ---------------------------------------------------------------------------
# characteristic polynomial via Hessenberg reduction


def _hessenberg(field: FieldSpec, M: np.ndarray) -> np.ndarray:
    ops = field.ops
    H = np.array(M, dtype=ops.dtype, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        nz = np.nonzero(H[k + 1:, k])[0]
        if len(nz) == 0:
            continue
        pr = k + 1 + int(nz[0])
        if pr != k + 1:
            H[[k + 1, pr]] = H[[pr, k + 1]]
            H[:, [k + 1, pr]] = H[:, [pr, k + 1]]
        inv = ops.scalar_inv(H[k + 1, k])
        factors = ops.mul(H[k + 2:, k], inv)
        if factors.shape[0]:
            H[k + 2:, :] = ops.sub(H[k + 2:, :], ops.mul(factors[:, None], H[k + 1, :][None, :]))
            # inverse similarity on columns: col_{k+1} += sum_i factor_i * col_i
            contrib = ops.matmul(H[:, k + 2:], factors[:, None])[:, 0]
            H[:, k + 1] = ops.add(H[:, k + 1], contrib)
    return H


def charpoly(A: MatGF) -> Poly:
    """Monic characteristic polynomial det(tI - A), O(n^3) field ops."""
    field = A.field
    n = A.rows
    if n != A.cols:
        raise ShapeMismatch("charpoly of non-square matrix")
    if n == 0:
        return poly(field, [1])
    H = _hessenberg(field, A.a)
    if field.m == 1:
        return _charpoly_hessenberg_prime(field, H)
    return _charpoly_hessenberg_generic(field, H)


def _charpoly_hessenberg_prime(field: FieldSpec, H: np.ndarray) -> Poly:
    p = field.p
    n = H.shape[0]
    dtype = H.dtype
    P = np.zeros((n + 1, n + 1), dtype=dtype)
    P[0, 0] = 1
    sub = np.zeros(n + 1, dtype=dtype)  # sub[i] = prod of subdiagonal h_{j,j-1}, j=i+1..k
    for k in range(1, n + 1):
        pk = np.zeros(n + 1, dtype=dtype)
        pk[1:] = P[k - 1, :-1]  # t * p_{k-1}
        pk = (pk - H[k - 1, k - 1] * P[k - 1]) % p
        if k > 1:
            s = H[k - 1, k - 2]
            sub[1:k - 1] = sub[1:k - 1] * s % p
            sub[k - 1] = s
            w = H[0:k - 1, k - 1] * sub[1:k] % p
            if w.any():
                pk = (pk - w @ P[0:k - 1]) % p
        P[k] = pk
    return poly(field, [int(c) for c in P[n]])


def _charpoly_hessenberg_generic(field: FieldSpec, H: np.ndarray) -> Poly:
    n = H.shape[0]
    ps = [poly(field, [1])]
    for k in range(1, n + 1):
        prev = ps[k - 1]
        coeffs = [0] + list(prev.coeffs)
        pk = poly(field, coeffs)
        pk = _poly_axpy(pk, field.neg(int(H[k - 1, k - 1])), prev)
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = field.mul(prod, int(H[i, i - 1]))
            w = field.mul(int(H[i - 1, k - 1]), prod)
            if w:
                pk = _poly_axpy(pk, field.neg(w), ps[i - 1])
        ps.append(pk)
    return ps[n]


def _poly_axpy(f: Poly, c: int, g: Poly) -> Poly:
    F = f.field
    out = list(f.coeffs) + [0] * max(0, len(g.coeffs) - len(f.coeffs))
    for i, b in enumerate(g.coeffs):
        out[i] = F.add(out[i], F.mul(c, b))
    return poly(F, out)


def poly_at_matrix(f: Poly, A: MatGF) -> MatGF:
    """Evaluate f(A) by Horner's rule (deg f matrix multiplications)."""
    field = A.field
    n = A.rows
    acc = zeros(field, n, n)
    for c in reversed(f.coeffs):
        acc = acc @ A
        if c:
            for i in range(n):
                acc.a[i, i] = field.add(int(acc.a[i, i]), c)
    return acc


# ---------------------------------------------------------------------------
# spectral primitives


def eigen_profile(A: MatGF, rng=None):
    """List of (lambda, algebraic multiplicity) over F_q, sorted by rep."""
    return roots_in_Fq(charpoly(A), rng)


def _normalize_first_nonzero(field: FieldSpec, v: np.ndarray) -> np.ndarray:
    nz = np.nonzero(v)[0]
    inv = field.ops.scalar_inv(v[nz[0]])
    return field.ops.mul(v, inv)


def unique_simple_eigenvalue(A: MatGF, require_nonzero: bool = False, rng=None):
    """(lambda, left eigvec, right eigvec) when the profile is exactly [(λ,1)].

    Eigenvectors are normalized so their first nonzero coordinate is 1.
    Returns None when the profile condition (or the nonzero flag) fails.
    """
    profile = eigen_profile(A, rng)
    if len(profile) != 1 or profile[0][1] != 1:
        return None
    lam = profile[0][0]
    if require_nonzero and lam == 0:
        return None
    field = A.field
    n = A.rows
    shifted = A - identity(field, n).scale(lam)
    _, right, left = rref_rank_kernel(shifted)
    assert len(right) == 1 and len(left) == 1
    v = _normalize_first_nonzero(field, left[0])
    w = _normalize_first_nonzero(field, right[0])
    return lam, v, w


def primary_split_basis(A: MatGF, lam: int, rng=None) -> MatGF:
    """Change of basis P with P A P^{-1} = block-diag(lam, A_0), mult(lam)=1.

    The complement E_0 (kernel of the eigenvalue-free cofactor of the
    characteristic polynomial) equals the column space of A - lam*I when
    mult(lam) = 1, which is what we compute.
    """
    field = A.field
    n = A.rows
    cp = charpoly(A)
    lin = poly(field, [field.neg(lam), 1])
    quo, rem = poly_divmod(cp, lin)
    if not rem.is_zero() or poly_eval(quo, lam) == 0:
        raise NotSimpleEigenvalue(f"{lam} is not a simple eigenvalue")
    shifted = A - identity(field, n).scale(lam)
    # column space of (A - lam I) = row space of its transpose
    Rt, pivots = rref(field, shifted.a.T)
    if len(pivots) != n - 1:
        raise NotSimpleEigenvalue("unexpected rank of A - lam*I")
    _, right, _ = rref_rank_kernel(shifted)
    w = right[0]
    M = np.concatenate([w[:, None], Rt[: n - 1].T], axis=1)
    Minv, d = inverse_det(MatGF(field, M))
    assert d != 0, "eigenvector unexpectedly inside the complement"
    return Minv


def trace_of_square(A: MatGF) -> int:
    """Tr(A^2) = sum_ij A(i,j) A(j,i), computed without forming A^2."""
    field = A.field
    if A.rows != A.cols:
        raise ShapeMismatch("trace_of_square of non-square matrix")
    prod = field.ops.mul(A.a, A.a.T)
    if field.m == 1:
        return int(prod.sum() % field.p)
    total = 0
    pk = 1
    for _ in range(field.m):
        total += int((prod // pk % field.p).sum() % field.p) * pk
        pk *= field.p
    return total


def trace(A: MatGF) -> int:
    acc = 0
    for i in range(A.rows):
        acc = A.field.add(acc, int(A.a[i, i]))
    return acc


# ---------------------------------------------------------------------------
# sampling


def random_matrix(spec: FieldSpec, rows: int, cols: int, rng) -> MatGF:
    a = rng.integers(0, spec.q, size=(rows, cols), dtype=np.int64)
    return MatGF(spec, a.astype(spec.ops.dtype, copy=False))


def random_invertible(spec: FieldSpec, n: int, rng) -> MatGF:
    while True:
        A = random_matrix(spec, n, n, rng)
        inv, d = inverse_det(A)
        if d != 0:
            return A


def random_vector(spec: FieldSpec, n: int, rng) -> np.ndarray:
    v = rng.integers(0, spec.q, size=n, dtype=np.int64)
    return v.astype(spec.ops.dtype, copy=False)
