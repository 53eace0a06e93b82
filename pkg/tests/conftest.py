"""Shared test helpers.

The `deep_slices` constructor below engineers instances that survive the
solvers' early gates: n-1 uniform slices plus one matrix X chosen inside
their trace-orthogonal complement with Tr(X^2) = 0 and a unique simple
nonzero eigenvalue.  The resulting n-dimensional code has X in its hull, so
a solver run on such an instance exercises the spectral and conjugacy
stages instead of stopping at the hull gate.
"""

import numpy as np

from tiso import codes, matgf
from tiso.matgf import (MatGF, random_matrix, rref_rank_kernel,
                        trace_of_square, unique_simple_eigenvalue)
from tiso.poly import poly, roots_in_Fq


def rand_comb(field, vecs, rng, n) -> MatGF:
    """Random dense linear combination of flattened kernel vectors.

    Dense combinations matter: individual canonical kernel basis vectors
    are sparse and give nearly nilpotent matrices that never pass the
    spectral gates.
    """
    K = np.stack(vecs, axis=0)
    co = rng.integers(0, field.q, size=len(vecs)).astype(K.dtype, copy=False)
    return MatGF(field, field.ops.matmul(co[None, :], K)[0].reshape(n, n).copy())


def deep_slices(field, n, rng):
    """n slice matrices whose span has a 1-dimensional hull with a spectrally
    generic spanner: n-1 uniform matrices plus an engineered self-dual X."""
    while True:
        mats = [random_matrix(field, n, n, rng) for _ in range(n - 1)]
        # X must satisfy Tr(X M_i) = 0 for all i: a linear system on vec(X)
        rows = np.stack([M.a.T.reshape(-1) for M in mats], axis=0)
        _, right, _ = rref_rank_kernel(MatGF(field, rows))
        if len(right) != n * n - (n - 1):
            continue
        found = None
        for _ in range(40):
            V1 = rand_comb(field, right, rng, n)
            V2 = rand_comb(field, right, rng, n)
            # Tr((V1 + c V2)^2) = 0 is a quadratic in c
            a0 = trace_of_square(V1)
            cross = field.add(matgf.trace(V1 @ V2), matgf.trace(V2 @ V1))
            a2 = trace_of_square(V2)
            f = poly(field, [a0, cross, a2])
            if f.degree < 1:
                continue
            rts = roots_in_Fq(f, rng)
            if not rts:
                continue
            X = V1 + V2.scale(rts[0][0])
            if not X.a.any() or trace_of_square(X) != 0:
                continue
            if unique_simple_eigenvalue(X, require_nonzero=True, rng=rng) is None:
                continue
            found = X
            break
        if found is None:
            continue
        C = codes.code_from_matrices(field, mats + [found], n)
        if C.dim != n:
            continue
        H = codes.hull(C)
        if H.dim != 1:
            continue
        if unique_simple_eigenvalue(H.basis()[0], require_nonzero=True,
                                    rng=rng) is None:
            continue
        return mats + [found]
