"""Field arithmetic: axioms, encoding, tables, characters."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiso.errors import BadParams, DivideByZero, NotPrime, ReducibleModulus
from tiso.gf import (absolute_trace, additive_character, arith, field_create,
                     is_prime)

FIELDS = [field_create(2), field_create(5), field_create(2, 3),
          field_create(3, 2), field_create(7, 2)]


@pytest.mark.parametrize("spec", FIELDS, ids=lambda s: f"GF({s.q})")
def test_field_axioms_exhaustive(spec):
    els = list(spec.elements())
    assert len(els) == spec.q
    for a in els:
        assert spec.add(a, 0) == a
        assert spec.mul(a, 1) == a
        assert spec.add(a, spec.neg(a)) == 0
        if a != 0:
            assert spec.mul(a, spec.inv(a)) == 1
    # distributivity on a spot grid
    for a in els[:8]:
        for b in els[:8]:
            for c in els[:8]:
                lhs = spec.mul(a, spec.add(b, c))
                rhs = spec.add(spec.mul(a, b), spec.mul(a, c))
                assert lhs == rhs


@given(st.integers(0, 48), st.integers(0, 48), st.integers(0, 48))
def test_gf49_ring_axioms(a, b, c):
    spec = field_create(7, 2)
    assert spec.mul(a, b) == spec.mul(b, a)
    assert spec.add(a, b) == spec.add(b, a)
    assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))


def test_table_mul_matches_slow_path():
    spec = field_create(2, 4)
    for a in spec.elements():
        for b in spec.elements():
            assert spec.mul(a, b) == spec._mul_slow(a, b)


def test_pow_and_order():
    spec = field_create(3, 2)
    for a in spec.elements():
        if a:
            assert spec.pow(a, spec.q - 1) == 1
        assert spec.pow(a, 0) == 1


def test_div_by_zero():
    spec = field_create(5)
    with pytest.raises(DivideByZero):
        spec.inv(0)
    with pytest.raises(DivideByZero):
        spec.div(3, 0)


def test_encoding_round_trip():
    spec = field_create(3, 3)
    for a in spec.elements():
        assert spec.from_digits(spec.digits(a)) == a


def test_bad_parameters():
    with pytest.raises(NotPrime):
        field_create(6)
    with pytest.raises(NotPrime):
        field_create(999999999999)
    with pytest.raises(ReducibleModulus):
        field_create(2, 2, (0, 0, 1))  # x^2 is reducible
    assert is_prime((1 << 20) + 7)
    assert not is_prime(1 << 20)


def test_arith_dispatcher():
    spec = field_create(7)
    assert arith(spec, 3, 5, "add") == 1
    assert arith(spec, 3, 5, "mul") == 1
    with pytest.raises(BadParams):
        arith(spec, 3, 5, "frobnicate")


def test_absolute_trace_is_linear_into_prime_field():
    spec = field_create(2, 3)
    for a in spec.elements():
        assert absolute_trace(spec, a) < spec.p
        for b in spec.elements():
            s = absolute_trace(spec, spec.add(a, b))
            assert s == (absolute_trace(spec, a) + absolute_trace(spec, b)) % spec.p


@pytest.mark.parametrize("spec", [field_create(3), field_create(2, 2),
                                  field_create(5), field_create(3, 2)],
                         ids=lambda s: f"GF({s.q})")
def test_character_orthogonality(spec):
    # sum_a psi_b(a) = q if b = 0 else 0
    for b in spec.elements():
        total = sum(additive_character(spec, b, a) for a in spec.elements())
        target = spec.q if b == 0 else 0.0
        assert abs(total - target) < 1e-9


def test_character_multiplicativity_in_argument():
    spec = field_create(5)
    for a in spec.elements():
        for b in spec.elements():
            lhs = additive_character(spec, 1, spec.add(a, b))
            rhs = additive_character(spec, 1, a) * additive_character(spec, 1, b)
            assert abs(lhs - rhs) < 1e-12


def test_vectorized_ops_match_scalar():
    spec = field_create(3, 2)
    ops = spec.ops
    rng = np.random.default_rng(0)
    x = rng.integers(0, spec.q, size=50)
    y = rng.integers(0, spec.q, size=50)
    for i in range(50):
        assert int(ops.add(x, y)[i]) == spec.add(int(x[i]), int(y[i]))
        assert int(ops.mul(x, y)[i]) == spec.mul(int(x[i]), int(y[i]))
        assert int(ops.neg(x)[i]) == spec.neg(int(x[i]))


def test_large_prime_field():
    p = (1 << 20) + 7
    spec = field_create(p)
    a, b = 123456, 987654
    assert spec.mul(a, spec.inv(a)) == 1
    assert spec.add(a, spec.neg(a)) == 0
    assert spec.mul(a, b) == a * b % p
