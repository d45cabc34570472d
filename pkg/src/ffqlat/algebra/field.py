"""Finite fields F_q, q = p^e with p odd.

Elements are plain ints in ``range(q)``.  For an extension field the int
``c_0 + c_1 p + ... + c_{e-1} p^{e-1}`` stands for ``c_0 + c_1 a + ... +
c_{e-1} a^{e-1}`` where ``a`` is a root of the configured monic modulus.
The canonical ordering of elements is the integer ordering, i.e.
lexicographic on ``(c_{e-1}, ..., c_0)``.

A :class:`GF` instance is the explicit field context; nothing is global.
Instances are interned, so ``GF(3) is GF(3)``.
"""

import functools
import itertools

import numpy as np

from ..errors import FieldMismatch

# monic, ascending coefficients (Conway polynomials)
BUILTIN_MODULI = {
    (3, 2): (2, 2, 1),
    (5, 2): (2, 4, 1),
    (3, 3): (1, 2, 0, 1),
    (7, 2): (3, 6, 1),
}


def _is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


def _fp_polymod(a, m, p):
    # remainder of a modulo the monic m over F_p; lists ascending
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    a = [c % p for c in a[:dm]]
    return a


def _fp_irreducible(m, p):
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    d = len(m) - 1
    for k in range(1, d // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            div = list(tail) + [1]
            if not any(_fp_polymod(m, div, p)):
                return False
    return True


class GF:
    """The finite field with ``p**e`` elements."""

    _cache = {}

    def __new__(cls, p, e=1, modulus=None):
        if modulus is None and e > 1:
            try:
                modulus = BUILTIN_MODULI[(p, e)]
            except KeyError:
                raise ValueError(
                    f"no built-in modulus for q={p}^{e}; pass modulus=") from None
        if e == 1:
            modulus = None
        key = (p, e, tuple(modulus) if modulus is not None else None)
        self = cls._cache.get(key)
        if self is None:
            self = super().__new__(cls)
            self._setup(*key)
            cls._cache[key] = self
        return self

    def __getnewargs__(self):
        return (self.p, self.e, self.modulus)

    def _setup(self, p, e, modulus):
        if not _is_prime(p) or p == 2:
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is not None:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree e")
            if not _fp_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.q = p ** e
        self.modulus = modulus
        q = self.q
        if e == 1:
            self._add = None
            self._mul = None
            self._inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]
        else:
            vecs = [self.to_vector(a) for a in range(q)]
            add = [[0] * q for _ in range(q)]
            mul = [[0] * q for _ in range(q)]
            for a in range(q):
                va = vecs[a]
                for b in range(a, q):
                    vb = vecs[b]
                    s = self.from_vector([(x + y) % p for x, y in zip(va, vb)])
                    prod = [0] * (2 * e - 1)
                    for i, x in enumerate(va):
                        if x:
                            for j, y in enumerate(vb):
                                prod[i + j] += x * y
                    m = self.from_vector(_fp_polymod(prod, modulus, p))
                    add[a][b] = add[b][a] = s
                    mul[a][b] = mul[b][a] = m
            self._add = add
            self._mul = mul
            inv = [0] * q
            for a in range(1, q):
                for b in range(1, q):
                    if mul[a][b] == 1:
                        inv[a] = b
                        break
            self._inv = inv
        self._neg = [self._neg_slow(a) for a in range(q)]
        squares = {self.mul(a, a) for a in range(1, q)}
        self._psi = [0] + [1 if a in squares else -1 for a in range(1, q)]
        self.delta = min(a for a in range(1, q) if self._psi[a] == -1)
        self._trace = [self._trace_slow(a) for a in range(q)]
        self._sqrt = {}
        for a in range(q):
            self._sqrt.setdefault(self.mul(a, a), a)

    # -- representation -------------------------------------------------
    def to_vector(self, a):
        p = self.p
        out = []
        for _ in range(self.e):
            out.append(a % p)
            a //= p
        return out

    def from_vector(self, v):
        a = 0
        for c in reversed(list(v)):
            a = a * self.p + int(c) % self.p
        return a

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (GF, (self.p, self.e, self.modulus))

    def to_json(self):
        return {"p": self.p, "e": self.e,
                "modulus": list(self.modulus) if self.modulus else None}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["p"]), int(d.get("e", 1)), d.get("modulus"))

    @classmethod
    def from_order(cls, q, modulus=None):
        for p in range(3, q + 1, 2):
            if _is_prime(p) and q % p == 0:
                e, r = 0, q
                while r % p == 0:
                    r //= p
                    e += 1
                if r != 1:
                    break
                return cls(p, e, modulus)
        raise ValueError(f"{q} is not an odd prime power")

    def check(self, other):
        if other is not self:
            raise FieldMismatch(f"{self!r} vs {other!r}")

    # -- arithmetic -----------------------------------------------------
    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def add(self, a, b):
        if self._add is None:
            return (a + b) % self.p
        return self._add[a][b]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def neg(self, a):
        return self._neg[a]

    def _neg_slow(self, a):
        return self.from_vector([(-c) % self.p for c in self.to_vector(a)])

    def mul(self, a, b):
        if self._mul is None:
            return (a * b) % self.p
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        return self._inv[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        r = 1
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def from_int(self, n):
        """Image of the rational integer n."""
        return self.from_vector([n % self.p])

    # -- quadratic character, trace, Frobenius ---------------------------
    def psi(self, a):
        """Quadratic character: 1 on nonzero squares, -1 on non-squares, 0 at 0."""
        return self._psi[a]

    def is_square(self, a):
        return self._psi[a] >= 0

    def sqrt(self, a):
        return self._sqrt.get(a)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def _trace_slow(self, a):
        s, x = 0, a
        for _ in range(self.e):
            s = self.add(s, x)
            x = self.pow(x, self.p)
        v = self.to_vector(s)
        assert all(c == 0 for c in v[1:]), "trace must land in F_p"
        return v[0]

    def trace(self, a):
        """Absolute trace F_q -> F_p, returned as an int in range(p)."""
        return self._trace[a]

    @functools.cached_property
    def half_units(self):
        """One representative of each pair {c, -c} of units (the smaller int)."""
        return tuple(c for c in range(1, self.q) if c < self._neg[c])

    # -- numpy tables for vectorised kernels ----------------------------
    @functools.cached_property
    def add_table(self):
        if self._add is None:
            r = np.arange(self.q)
            return (r[:, None] + r[None, :]) % self.p
        return np.array(self._add, dtype=np.int64)

    @functools.cached_property
    def mul_table(self):
        if self._mul is None:
            r = np.arange(self.q)
            return (r[:, None] * r[None, :]) % self.p
        return np.array(self._mul, dtype=np.int64)

    @functools.cached_property
    def trace_table(self):
        return np.array(self._trace, dtype=np.int64)

    @functools.cached_property
    def neg_table(self):
        return np.array(self._neg, dtype=np.int64)

    @functools.cached_property
    def digit_table(self):
        """(q, e) array: base-p digits of each element."""
        return np.array([self.to_vector(a) for a in range(self.q)], dtype=np.int64)

    @functools.cached_property
    def mul_matrices(self):
        """(q, e, e) array: row j of entry c holds the digits of c * a^j."""
        e, p = self.e, self.p
        out = np.zeros((self.q, e, e), dtype=np.int64)
        basis = [p ** j for j in range(e)]
        for c in range(self.q):
            for j, b in enumerate(basis):
                out[c, j] = self.to_vector(self.mul(c, b))
        return out
