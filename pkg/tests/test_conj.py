"""Intertwiner spaces, tuple conjugacy, centralizers, algebra generation."""

import numpy as np
import pytest

from tiso.conj import (centralizer_is_scalars, conj_coset, conj_with_seed,
                       generates_full_algebra, intertwiner_space)
from tiso.errors import ShapeMismatch
from tiso.gf import field_create
from tiso.matgf import (MatGF, identity, inverse_det, random_invertible,
                        random_matrix, unique_simple_eigenvalue)

F5 = field_create(5)
F3 = field_create(3)


def _conjugate_tuple(Atuple, T):
    Tinv, d = inverse_det(T)
    assert d != 0
    return tuple(T @ A @ Tinv for A in Atuple)


def test_intertwiner_space_of_self_contains_identity():
    rng = np.random.default_rng(0)
    A = (random_matrix(F5, 4, 4, rng), random_matrix(F5, 4, 4, rng))
    basis = intertwiner_space(A, A)
    assert len(basis) >= 1
    C = MatGF(F5, sum(b.a.astype(np.int64) for b in basis) % 5)
    # I is in the span: solving is overkill, just check each basis member
    # commutes with the tuple
    for X in basis:
        for M in A:
            assert X @ M == M @ X


def test_conj_coset_on_planted_conjugates():
    rng = np.random.default_rng(1)
    for _ in range(10):
        A = (random_matrix(F5, 4, 4, rng), random_matrix(F5, 4, 4, rng))
        T = random_invertible(F5, 4, rng)
        B = _conjugate_tuple(A, T)
        cc = conj_coset(A, B, rng)
        assert cc.kind == "Conjugate"
        X = cc.representative
        for M, N in zip(A, B):
            assert X @ M == N @ X


def test_conj_coset_not_conjugate():
    rng = np.random.default_rng(2)
    # tuples with different invariant (identity vs nilpotent) cannot be
    # conjugate; the intertwiner space may still be nonzero but contains no
    # invertible element
    A = (identity(F5, 3),)
    N = MatGF(F5, np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]],
                           dtype=F5.ops.dtype))
    cc = conj_coset(A, (N,), rng)
    assert cc.kind == "NotConjugate"


def test_conj_with_seed_matched_eigenvectors():
    rng = np.random.default_rng(3)
    done = 0
    while done < 10:
        A1 = random_matrix(F5, 5, 5, rng)
        A2 = random_matrix(F5, 5, 5, rng)
        res = unique_simple_eigenvalue(A1, rng=rng)
        if res is None:
            continue
        T = random_invertible(F5, 5, rng)
        B1, B2 = _conjugate_tuple((A1, A2), T)
        resB = unique_simple_eigenvalue(B1, rng=rng)
        assert resB is not None
        # right eigenvectors: T maps A-side to B-side up to scale
        w = res[2]
        z = resB[2]
        X, decided = conj_with_seed((A1, A2), (B1, B2), w, z)
        if not decided:
            continue
        assert X is not None
        for M, N in zip((A1, A2), (B1, B2)):
            assert X @ M == N @ X
        done += 1


def test_conj_with_seed_certifies_nonexistence():
    rng = np.random.default_rng(4)
    done = 0
    while done < 5:
        A1 = random_matrix(F5, 5, 5, rng)
        A2 = random_matrix(F5, 5, 5, rng)
        res = unique_simple_eigenvalue(A1, rng=rng)
        if res is None:
            continue
        # B-side: unrelated tuple sharing A1's eigenvector seed shape
        B1 = random_matrix(F5, 5, 5, rng)
        B2 = random_matrix(F5, 5, 5, rng)
        X, decided = conj_with_seed((A1, A2), (B1, B2), res[2],
                                    rng.integers(0, 5, size=5).astype(F5.ops.dtype))
        if decided:
            assert X is None or all((X @ M == N @ X)
                                    for M, N in zip((A1, A2), (B1, B2)))
            done += 1


def test_centralizer_is_scalars_random_pair():
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(20):
        A = (random_matrix(F3, 5, 5, rng), random_matrix(F3, 5, 5, rng))
        if centralizer_is_scalars(A, rng):
            hits += 1
    assert hits >= 15  # overwhelmingly scalar for random pairs


def test_centralizer_not_scalars_for_polynomial_tuple():
    rng = np.random.default_rng(6)
    A = random_matrix(F5, 4, 4, rng)
    # (A, A^2) commutes with every polynomial in A: centralizer dim >= 4 > 1
    assert centralizer_is_scalars((A, A @ A), rng) is False


def test_centralizer_matches_full_system_on_small_n():
    rng = np.random.default_rng(7)
    for _ in range(15):
        A = (random_matrix(F5, 3, 3, rng), random_matrix(F5, 3, 3, rng))
        fast = centralizer_is_scalars(A, rng)
        exact = len(intertwiner_space(A, A)) == 1
        assert fast == exact


def test_generates_full_algebra():
    rng = np.random.default_rng(8)
    hits = 0
    for _ in range(40):
        A1 = random_matrix(F3, 5, 5, rng)
        A2 = random_matrix(F3, 5, 5, rng)
        if generates_full_algebra(A1, A2):
            hits += 1
    assert hits >= 33  # empirical rate ~0.98 at n = 5, q = 3
    # a pair of commuting matrices never generates for n >= 2
    D = identity(F3, 4)
    assert not generates_full_algebra(D, D.scale(2))


def test_shape_mismatch_raises():
    rng = np.random.default_rng(9)
    A = random_matrix(F5, 3, 3, rng)
    B = random_matrix(F5, 4, 4, rng)
    with pytest.raises(ShapeMismatch):
        intertwiner_space((A,), (B,))
    with pytest.raises(ShapeMismatch):
        intertwiner_space((), ())
