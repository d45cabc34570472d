"""Exact arithmetic in the cyclotomic ring Z[zeta_p], p an odd prime.

Values are stored in the power basis zeta^0 .. zeta^(p-2); the relation
1 + zeta + ... + zeta^(p-1) = 0 eliminates zeta^(p-1).  Equality is
coefficient-wise.  Floats appear only in :meth:`CycValue.to_complex`.
"""

import cmath
import math

from ..errors import FieldMismatch


class CycValue:
    __slots__ = ("p", "coeffs")

    def __init__(self, p, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != p - 1:
            raise ValueError(f"need {p - 1} coefficients for Z[zeta_{p}]")
        self.p = p
        self.coeffs = coeffs

    @classmethod
    def from_counts(cls, p, counts):
        """sum_j counts[j] zeta^j for j in range(p) (extra length reduced mod p)."""
        full = [0] * p
        for j, c in enumerate(counts):
            full[j % p] += int(c)
        top = full[p - 1]
        return cls(p, [c - top for c in full[: p - 1]])

    @classmethod
    def integer(cls, p, n):
        return cls(p, [n] + [0] * (p - 2))

    @classmethod
    def zeta(cls, p, k=1):
        counts = [0] * p
        counts[k % p] = 1
        return cls.from_counts(p, counts)

    def _full(self):
        return list(self.coeffs) + [0]

    def _check(self, other):
        if isinstance(other, int):
            return CycValue.integer(self.p, other)
        if not isinstance(other, CycValue):
            return NotImplemented
        if other.p != self.p:
            raise FieldMismatch(f"Z[zeta_{self.p}] vs Z[zeta_{other.p}]")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CycValue(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycValue(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycValue(self.p, [a * other for a in self.coeffs])
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.p
        a, b = self._full(), other._full()
        out = [0] * p
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return CycValue.from_counts(p, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = CycValue.integer(self.p, 1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def conj(self):
        """Complex conjugation zeta -> zeta^-1."""
        p = self.p
        full = self._full()
        out = [0] * p
        for j, c in enumerate(full):
            out[(-j) % p] += c
        return CycValue.from_counts(p, out)

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycValue.integer(self.p, other)
        if not isinstance(other, CycValue):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def is_integer(self):
        return not any(self.coeffs[1:])

    def to_int(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def to_complex(self):
        w = cmath.exp(2j * math.pi / self.p)
        return sum(c * w ** j for j, c in enumerate(self.coeffs))

    def __abs__(self):
        return abs(self.to_complex())

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z^{j}")
        return f"CycValue(p={self.p}: {' + '.join(terms) or '0'})"

    def to_json(self):
        return {"p": self.p, "coeffs": list(self.coeffs)}


def cyc_arith(a, b, op):
    """Dispatch helper: op in {'add', 'mul', 'eq', 'conj'} (conj ignores b)."""
    if op == "conj":
        return a.conj()
    if a.p != b.p:
        raise FieldMismatch(f"Z[zeta_{a.p}] vs Z[zeta_{b.p}]")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown op {op!r}")


class ScaledCycValue:
    """The number ``sum / q**(k/2)`` with ``sum`` in Z[zeta_p]."""

    __slots__ = ("sum", "q", "k")

    def __init__(self, sum, q, k=0):
        self.sum = sum
        self.q = q
        self.k = k

    def __mul__(self, other):
        if other.q != self.q:
            raise FieldMismatch("different q")
        return ScaledCycValue(self.sum * other.sum, self.q, self.k + other.k)

    def __pow__(self, n):
        return ScaledCycValue(self.sum ** n, self.q, self.k * n)

    def to_complex(self):
        return self.sum.to_complex() / self.q ** (self.k / 2)

    def __abs__(self):
        return abs(self.to_complex())

    def log_q_abs(self):
        a = abs(self.sum.to_complex())
        if a == 0:
            return float("-inf")
        return math.log(a, self.q) - self.k / 2

    def equals(self, other, tol=1e-9):
        if (self.k - other.k) % 2 == 0:
            d = self.k - other.k
            qd = self.q ** (abs(d) // 2)
            # a / q^(k/2) == b / q^(k'/2)  <=>  a * q^((k'-k)/2) == b
            if d >= 0:
                return self.sum == other.sum * qd
            return self.sum * qd == other.sum
        return abs(self.to_complex() - other.to_complex()) < tol

    def __repr__(self):
        return f"ScaledCycValue({self.sum!r} / {self.q}^({self.k}/2))"
