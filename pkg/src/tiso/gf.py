"""Finite field arithmetic for F_q with q = p^m.

Elements are canonical integers in [0, q): the integer's base-p digit vector
is the coefficient vector (low-to-high) of the residue-class polynomial.
For prime fields (m = 1) this is just the usual integer residue.

A :class:`FieldSpec` carries the scalar arithmetic; :class:`FieldOps`
(``spec.ops``) exposes vectorized numpy counterparts used by the dense
linear-algebra layer.
"""

from __future__ import annotations

import cmath
import math
import random
from functools import cached_property

import numpy as np

from .errors import (
    BadParams,
    DegreeMismatch,
    DivideByZero,
    FieldMismatch,
    NotPrime,
    ReducibleModulus,
)

_MAX_P = 1 << 31
_MAX_Q = 1 << 62
_TABLE_LIMIT = 1 << 16  # build log/antilog tables for extension fields up to here


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# small helpers: polynomial arithmetic over the prime field F_p, used only for
# modulus validation / construction.  Coefficient lists are low-to-high.


def _pp_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pp_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _pp_trim(out)


def _pp_divmod(f, g, p):
    f = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    q = [0] * max(len(f) - dg, 0)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv_lead % p
        k = len(f) - 1 - dg
        q[k] = c
        for j, b in enumerate(g):
            f[k + j] = (f[k + j] - c * b) % p
        _pp_trim(f)
    return q, f


def _pp_mulmod(f, g, mod, p):
    return _pp_divmod(_pp_mul(f, g, p), mod, p)[1]


def _pp_powmod(f, e, mod, p):
    acc = [1]
    base = _pp_divmod(f, mod, p)[1]
    while e:
        if e & 1:
            acc = _pp_mulmod(acc, base, mod, p)
        base = _pp_mulmod(base, base, mod, p)
        e >>= 1
    return acc


def _pp_sub(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p
           for i in range(n)]
    return _pp_trim(out)


def _pp_gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, _pp_divmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], p - 2, p)
        f = [c * inv % p for c in f]
    return f


def _is_irreducible(f, p: int) -> bool:
    """Rabin irreducibility test for monic f of degree m over F_p."""
    m = len(f) - 1
    if m < 1:
        return False
    x = [0, 1]
    # x^(p^m) == x mod f
    xp = _pp_powmod(x, p ** m, f, p)
    if _pp_sub(xp, x, p):
        return False
    for ell in set(_prime_factors(m)):
        xpe = _pp_powmod(x, p ** (m // ell), f, p)
        if len(_pp_gcd(_pp_sub(xpe, x, p), f, p)) > 1:
            return False
    return True


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _exhaustive_irreducible_check(f, p: int) -> bool:
    """Trial division by every lower-degree monic polynomial (tiny fields)."""
    m = len(f) - 1
    for d in range(1, m // 2 + 1):
        for idx in range(p ** d):
            g = []
            t = idx
            for _ in range(d):
                g.append(t % p)
                t //= p
            g.append(1)
            if not _pp_divmod(f, g, p)[1]:
                return False
    return True


class FieldSpec:
    """Immutable description of F_q, q = p^m, with scalar arithmetic.

    Attributes:
        p: prime characteristic.
        m: extension degree.
        modulus: monic irreducible of degree m over F_p as a low-to-high
            coefficient tuple; empty tuple when m = 1.
        q: field order p^m.
    """

    __slots__ = ("p", "m", "modulus", "q", "__dict__")

    def __init__(self, p: int, m: int, modulus: tuple):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.q = p ** m

    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus))

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    # -- element <-> digit conversion --------------------------------------

    def digits(self, a: int):
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return out

    def from_digits(self, ds):
        a = 0
        for c in reversed(ds):
            a = a * self.p + (c % self.p)
        return a

    def check(self, a: int):
        if not (0 <= a < self.q):
            raise FieldMismatch(f"element {a} out of range for {self}")
        return a

    # -- scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([(x + y) % self.p
                                 for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        tab = self._tables
        if tab is not None:
            log, exp = tab
            return int(exp[(log[a] + log[b]) % (self.q - 1)])
        return self._mul_slow(a, b)

    def _mul_slow(self, a: int, b: int) -> int:
        prod = _pp_mul(self.digits(a), self.digits(b), self.p)
        rem = _pp_divmod(prod, list(self.modulus), self.p)[1]
        return self.from_digits(rem + [0] * (self.m - len(rem)))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return pow(a, e, self.p)
        acc, base = 1, a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZero("inverse of zero")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        tab = self._tables
        if tab is not None:
            log, exp = tab
            return int(exp[(-log[a]) % (self.q - 1)])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self):
        return range(self.q)

    # -- tables -------------------------------------------------------------

    @cached_property
    def _tables(self):
        """(log, exp) arrays via a multiplicative generator, or None."""
        if self.m == 1 or self.q > _TABLE_LIMIT:
            return None
        q = self.q
        g = self._find_generator()
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = self._mul_slow(acc, g)
        return log, exp

    def _find_generator(self) -> int:
        q = self.q
        factors = set(_prime_factors(q - 1))

        def pow_slow(a, e):
            acc, base = 1, a
            while e:
                if e & 1:
                    acc = self._mul_slow(acc, base)
                base = self._mul_slow(base, base)
                e >>= 1
            return acc

        for g in range(2, q):
            if all(pow_slow(g, (q - 1) // ell) != 1 for ell in factors):
                return g
        raise BadParams("no multiplicative generator found")  # pragma: no cover

    @cached_property
    def ops(self) -> "FieldOps":
        return FieldOps(self)

    def to_json(self) -> dict:
        d = {"p": self.p, "m": self.m}
        if self.m > 1:
            d["modulus"] = list(self.modulus)
        return d


def field_create(p: int, m: int = 1, modulus=None) -> FieldSpec:
    """Construct and validate a FieldSpec for F_{p^m}.

    When m > 1 and no modulus is given, a default irreducible is found by a
    seeded randomized search (deterministic for fixed (p, m)).
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p >= _MAX_P:
        raise BadParams(f"p must be < 2^31, got {p}")
    if m < 1 or m > 8:
        raise BadParams(f"extension degree must be in [1, 8], got {m}")
    if p ** m >= _MAX_Q:
        raise BadParams("field order must be < 2^62")
    if m == 1:
        if modulus:
            raise DegreeMismatch("prime field takes no modulus")
        return FieldSpec(p, 1, ())
    if modulus is None:
        modulus = _default_modulus(p, m)
    modulus = tuple(int(c) % p for c in modulus)
    if len(modulus) != m + 1 or modulus[-1] != 1:
        raise DegreeMismatch(f"modulus must be monic of degree {m}")
    f = list(modulus)
    if any(_pp_eval(f, a, p) == 0 for a in range(min(p, 1 << 12))):
        raise ReducibleModulus("modulus has a root in F_p")
    if not _is_irreducible(f, p):
        raise ReducibleModulus("modulus is reducible")
    if m <= 4 and p ** m <= (1 << 12) and not _exhaustive_irreducible_check(f, p):
        raise ReducibleModulus("modulus failed exhaustive factor search")
    return FieldSpec(p, m, modulus)


def _pp_eval(f, a, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * a + c) % p
    return acc


def _default_modulus(p: int, m: int):
    rng = random.Random(f"tiso-modulus-{p}-{m}")
    while True:
        f = [rng.randrange(p) for _ in range(m)] + [1]
        if _is_irreducible(f, p):
            return f


def arith(spec: FieldSpec, a: int, b, op: str) -> int:
    """Uniform dispatch used by tests and the CLI."""
    spec.check(a)
    if op in ("add", "sub", "mul", "div"):
        spec.check(b)
        return getattr(spec, op)(a, b)
    if op == "neg":
        return spec.neg(a)
    if op == "inv":
        return spec.inv(a)
    if op == "pow":
        return spec.pow(a, b)
    raise BadParams(f"unknown op {op!r}")


def absolute_trace(spec: FieldSpec, a: int) -> int:
    """Tr_{F_q/F_p}(a) = a + a^p + ... + a^{p^{m-1}}, an element of F_p."""
    spec.check(a)
    acc, t = a, a
    for _ in range(spec.m - 1):
        t = spec.pow(t, spec.p)
        acc = spec.add(acc, t)
    # the result lies in the prime subfield, i.e. only the low digit survives
    assert acc < spec.p, "trace left the prime subfield"
    return acc


def additive_character(spec: FieldSpec, b: int, a: int) -> complex:
    """psi_b(a) = exp(2*pi*i/p * Tr(b*a))."""
    t = absolute_trace(spec, spec.mul(b, a))
    return cmath.exp(2j * math.pi * t / spec.p)


# ---------------------------------------------------------------------------
# vectorized arithmetic


class FieldOps:
    """Vectorized (numpy) arithmetic over a FieldSpec.

    Arrays hold canonical integer reps.  Prime fields use int64 modular
    arithmetic (object dtype above the overflow threshold); extension fields
    use log/antilog tables for multiplication and digitwise addition.
    """

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = spec.p
        self.q = spec.q
        self.prime = spec.m == 1
        # int64 matmul is safe while k*(p-1)^2 < 2^63 for inner dimension k
        self.big = self.prime and spec.p > (1 << 25)
        self.dtype = object if self.big else np.int64
        if not self.prime and spec._tables is None:
            self._mul_ufunc = np.frompyfunc(spec.mul, 2, 1)
        else:
            self._mul_ufunc = None

    def asarray(self, x):
        return np.asarray(x, dtype=self.dtype)

    def zeros(self, shape):
        return np.zeros(shape, dtype=self.dtype)

    def add(self, x, y):
        if self.prime:
            return (x + y) % self.p
        if self.p == 2:
            return x ^ y
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        pk = 1
        for _ in range(self.spec.m):
            out += (((x // pk) + (y // pk)) % self.p) * pk
            pk *= self.p
        return out

    def neg(self, x):
        if self.prime:
            return (-x) % self.p
        if self.p == 2:
            return np.array(x, copy=True)
        out = np.zeros(np.asarray(x).shape, dtype=np.int64)
        pk = 1
        for _ in range(self.spec.m):
            out += ((-(x // pk)) % self.p) * pk
            pk *= self.p
        return out

    def sub(self, x, y):
        if self.prime:
            return (x - y) % self.p
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.prime:
            return (x * y) % self.p
        if self._mul_ufunc is not None:
            return self._mul_ufunc(x, y).astype(np.int64)
        log, exp = self.spec._tables
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        xb, yb = np.broadcast_arrays(x, y)
        out = np.zeros(xb.shape, dtype=np.int64)
        mask = (xb != 0) & (yb != 0)
        out[mask] = exp[(log[xb[mask]] + log[yb[mask]]) % (self.q - 1)]
        return out

    def scalar_inv(self, a: int) -> int:
        return self.spec.inv(int(a))

    def matmul(self, A, B):
        if self.prime:
            k = A.shape[-1]
            if not self.big and k * (self.p - 1) ** 2 < (1 << 62):
                return (A @ B) % self.p
            return (A.astype(object) @ B.astype(object)) % self.p
        # extension field: accumulate rank-1 outer products with field ops
        A = np.asarray(A)
        B = np.asarray(B)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            col = A[:, k]
            if not col.any():
                continue
            out = self.add(out, self.mul(col[:, None], B[None, k, :]))
        return out
