"""Univariate polynomials over F_q and F_q-root extraction.

Coefficients are canonical field reps, low-to-high, trailing zeros stripped.
Root finding isolates the linear-factor part via gcd(f, t^q - t) and then
either evaluates exhaustively (q <= 2^12) or applies randomized equal-degree
splitting (odd q: quadratic-residue split; even q: trace-map split).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivideByZero, FieldMismatch, RetryExhausted, ZeroPolynomial
from .gf import FieldSpec

_EXHAUSTIVE_LIMIT = 1 << 12


@dataclass(frozen=True)
class Poly:
    field: FieldSpec
    coeffs: tuple  # low-to-high, trimmed

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"Poly({list(self.coeffs)} over {self.field})"


def poly(field: FieldSpec, coeffs) -> Poly:
    cs = [field.check(int(c)) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return Poly(field, tuple(cs))


def _same_field(f: Poly, g: Poly):
    if f.field != g.field:
        raise FieldMismatch("polynomials over different fields")


def poly_add(f: Poly, g: Poly) -> Poly:
    _same_field(f, g)
    F = f.field
    n = max(len(f.coeffs), len(g.coeffs))
    out = []
    for i in range(n):
        a = f.coeffs[i] if i < len(f.coeffs) else 0
        b = g.coeffs[i] if i < len(g.coeffs) else 0
        out.append(F.add(a, b))
    return poly(F, out)


def poly_neg(f: Poly) -> Poly:
    return poly(f.field, [f.field.neg(c) for c in f.coeffs])


def poly_sub(f: Poly, g: Poly) -> Poly:
    return poly_add(f, poly_neg(g))


def poly_mul(f: Poly, g: Poly) -> Poly:
    _same_field(f, g)
    F = f.field
    if f.is_zero() or g.is_zero():
        return poly(F, [])
    out = [0] * (len(f.coeffs) + len(g.coeffs) - 1)
    for i, a in enumerate(f.coeffs):
        if a:
            for j, b in enumerate(g.coeffs):
                if b:
                    out[i + j] = F.add(out[i + j], F.mul(a, b))
    return poly(F, out)


def poly_scale(f: Poly, c: int) -> Poly:
    return poly(f.field, [f.field.mul(a, c) for a in f.coeffs])


def poly_divmod(f: Poly, g: Poly):
    _same_field(f, g)
    if g.is_zero():
        raise DivideByZero("polynomial division by zero")
    F = f.field
    rem = list(f.coeffs)
    dg = g.degree
    inv_lead = F.inv(g.coeffs[-1])
    quo = [0] * max(len(rem) - dg, 0)
    while len(rem) - 1 >= dg and rem:
        c = F.mul(rem[-1], inv_lead)
        k = len(rem) - 1 - dg
        quo[k] = c
        for j, b in enumerate(g.coeffs):
            rem[k + j] = F.sub(rem[k + j], F.mul(c, b))
        while rem and rem[-1] == 0:
            rem.pop()
    return poly(F, quo), poly(F, rem)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    _same_field(f, g)
    while not g.is_zero():
        f, g = g, poly_divmod(f, g)[1]
    if not f.is_zero():
        f = poly_scale(f, f.field.inv(f.coeffs[-1]))
    return f


def poly_eval(f: Poly, a: int) -> int:
    F = f.field
    acc = 0
    for c in reversed(f.coeffs):
        acc = F.add(F.mul(acc, a), c)
    return acc


def poly_arith(f: Poly, g: Poly, op: str):
    if op == "add":
        return poly_add(f, g)
    if op == "mul":
        return poly_mul(f, g)
    if op == "divmod":
        return poly_divmod(f, g)
    if op == "gcd":
        return poly_gcd(f, g)
    raise ValueError(f"unknown op {op!r}")


def powmod(base: Poly, e: int, modulus: Poly) -> Poly:
    if modulus.degree < 1:
        raise DivideByZero("powmod modulus must be nonconstant")
    F = base.field
    acc = poly(F, [1])
    b = poly_divmod(base, modulus)[1]
    while e:
        if e & 1:
            acc = poly_divmod(poly_mul(acc, b), modulus)[1]
        b = poly_divmod(poly_mul(b, b), modulus)[1]
        e >>= 1
    return acc


def linear_factor_part(f: Poly) -> Poly:
    """gcd(f, t^q - t): the product of (t - lambda) over distinct F_q-roots."""
    F = f.field
    t = poly(F, [0, 1])
    tq = powmod(t, F.q, f)
    return poly_gcd(f, poly_sub(tq, t))


def _split_equal_degree(g: Poly, rng) -> list:
    """Split a monic product of distinct linear factors into its roots."""
    F = g.field
    if g.degree == 0:
        return []
    if g.degree == 1:
        # monic t + c0 -> root -c0
        return [F.neg(g.coeffs[0])]
    budget = max(8, 4 * int(math.log2(F.q)) + 4)
    for _ in range(budget):
        c1 = int(rng.integers(1, F.q))
        c0 = int(rng.integers(0, F.q))
        a = poly(F, [c0, c1])
        if F.p != 2:
            h = powmod(a, (F.q - 1) // 2, g)
            h = poly_sub(h, poly(F, [1]))
        else:
            e = F.m  # q = 2^m
            h = poly(F, [])
            term = poly_divmod(a, g)[1]
            for _ in range(e):
                h = poly_add(h, term)
                term = poly_divmod(poly_mul(term, term), g)[1]
        d = poly_gcd(h, g)
        if 0 < d.degree < g.degree:
            rest = poly_divmod(g, d)[0]
            return _split_equal_degree(d, rng) + _split_equal_degree(rest, rng)
    raise RetryExhausted("equal-degree splitting retry budget exhausted")


def roots_in_Fq(f: Poly, rng=None):
    """Distinct F_q-roots of f with exact multiplicities, sorted by rep."""
    if f.is_zero():
        raise ZeroPolynomial("roots of the zero polynomial")
    F = f.field
    g = linear_factor_part(f)
    if g.degree <= 0:
        return []
    if F.q <= _EXHAUSTIVE_LIMIT:
        roots = [a for a in F.elements() if poly_eval(g, a) == 0]
    else:
        if rng is None:
            rng = np.random.default_rng(0xC0FFEE)
        roots = sorted(_split_equal_degree(g, rng))
    out = []
    for lam in sorted(roots):
        lin = poly(F, [F.neg(lam), 1])
        mult = 0
        h = f
        while True:
            quo, rem = poly_divmod(h, lin)
            if not rem.is_zero():
                break
            mult += 1
            h = quo
        out.append((lam, mult))
    return out
