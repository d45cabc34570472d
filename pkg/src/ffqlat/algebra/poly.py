"""Polynomials in A = F_q[t].

A :class:`Poly` is immutable: a field context plus a tuple of coefficients
in ascending powers of t with nonzero last entry.  The zero polynomial has
the empty tuple and degree ``NEG_INF``, which compares below every int.
"""

import itertools
import re

from ..errors import FieldMismatch

NEG_INF = float("-inf")


class Poly:
    __slots__ = ("F", "c", "_hash")

    def __init__(self, F, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.F = F
        self.c = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, F, c):
        # c already trimmed
        self = object.__new__(cls)
        self.F = F
        self.c = c
        self._hash = None
        return self

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, F):
        return cls._raw(F, ())

    @classmethod
    def one(cls, F):
        return cls._raw(F, (1,))

    @classmethod
    def const(cls, F, a):
        return cls._raw(F, (a,) if a else ())

    @classmethod
    def t(cls, F):
        return cls._raw(F, (0, 1))

    @classmethod
    def monomial(cls, F, k, a=1):
        if not a:
            return cls.zero(F)
        return cls._raw(F, (0,) * k + (a,))

    @classmethod
    def from_ints(cls, F, ints):
        """Integer coefficient list (little-endian); ints reduced into F."""
        if F.e == 1:
            return cls(F, [int(x) % F.p for x in ints])
        out = []
        for x in ints:
            if isinstance(x, (list, tuple)):
                out.append(F.from_vector(x))
            else:
                x = int(x)
                if not 0 <= x < F.q:
                    raise ValueError(f"element code {x} out of range for q={F.q}")
                out.append(x)
        return cls(F, out)

    def to_ints(self):
        return list(self.c)

    # -- basic properties ----------------------------------------------
    @property
    def deg(self):
        return len(self.c) - 1 if self.c else NEG_INF

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def coeff(self, i):
        return self.c[i] if 0 <= i < len(self.c) else 0

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c and self.F is other.F
        if isinstance(other, int):
            return self.c == ((other,) if other else ())
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def sort_key(self):
        """Canonical ordering: by degree, then coefficients from the top."""
        return (len(self.c), self.c[::-1])

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.F is not self.F:
                raise FieldMismatch(f"{self.F!r} vs {other.F!r}")
            return other
        if isinstance(other, int):
            return Poly.const(self.F, self.F.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.F
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        if F.e == 1:
            p = F.p
            c = [(x + y) % p for x, y in zip(a, b)] + list(a[len(b):])
        else:
            add = F._add
            c = [add[x][y] for x, y in zip(a, b)] + list(a[len(b):])
        while c and c[-1] == 0:
            c.pop()
        return Poly._raw(F, tuple(c))

    __radd__ = __add__

    def __neg__(self):
        neg = self.F._neg
        return Poly._raw(self.F, tuple(neg[x] for x in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.c, other.c
        if not a or not b:
            return Poly._raw(self.F, ())
        F = self.F
        if F.e == 1:
            p = F.p
            if len(b) == 1:
                y = b[0]
                return Poly._raw(F, tuple(x * y % p for x in a))
            if len(a) == 1:
                x = a[0]
                return Poly._raw(F, tuple(x * y % p for y in b))
            c = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        c[i + j] += x * y
            return Poly._raw(F, tuple(v % p for v in c))
        add, mul = F._add, F._mul
        c = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                mx = mul[x]
                for j, y in enumerate(b):
                    c[i + j] = add[c[i + j]][mx[y]]
        return Poly._raw(F, tuple(c))  # lc(a)*lc(b) != 0

    __rmul__ = __mul__

    def scale(self, a):
        """Multiply by the field element a."""
        if not a:
            return Poly._raw(self.F, ())
        mul = self.F.mul
        return Poly._raw(self.F, tuple(mul(x, a) for x in self.c))

    def shift(self, k):
        """Multiply by t^k (k >= 0)."""
        if not self.c:
            return self
        return Poly._raw(self.F, (0,) * k + self.c)

    def __pow__(self, k):
        r = Poly.one(self.F)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __floordiv__(self, other):
        return poly_divmod(self, other)[0]

    def __mod__(self, other):
        return poly_divmod(self, other)[1]

    def monic(self):
        if not self.c:
            return self
        return self.scale(self.F.inv(self.lc))

    def __call__(self, x):
        F = self.F
        r = 0
        for a in reversed(self.c):
            r = F.add(F.mul(r, x), a)
        return r

    def derivative(self):
        F = self.F
        return Poly(F, [F.mul(F.from_int(i), a) for i, a in enumerate(self.c)][1:])

    # -- text -----------------------------------------------------------
    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            coef = _elem_str(self.F, a)
            if i == 0:
                terms.append(coef)
            else:
                mon = "t" if i == 1 else f"t^{i}"
                terms.append(mon if a == 1 else f"{coef}{mon}" if self.F.e == 1 else f"({coef})*{mon}")
        return " + ".join(terms)


def _elem_str(F, a):
    if F.e == 1:
        return str(a)
    v = F.to_vector(a)
    parts = []
    for i, c in enumerate(v):
        if c:
            mon = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
            parts.append(f"{c}{mon}" if (c != 1 or i == 0) else mon)
    return "+".join(reversed(parts)) or "0"


def poly_divmod(a, b):
    """Euclidean division: a = quot*b + rem with deg rem < deg b."""
    if not isinstance(b, Poly):
        b = a._coerce(b)
    if b.F is not a.F:
        raise FieldMismatch(f"{a.F!r} vs {b.F!r}")
    if not b.c:
        raise ZeroDivisionError("polynomial division by zero")
    F = a.F
    db = len(b.c) - 1
    r = list(a.c)
    if len(r) <= db:
        return Poly.zero(F), a
    inv_lc = F.inv(b.c[-1])
    qc = [0] * (len(r) - db)
    bc = b.c
    if F.e == 1:
        p = F.p
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] * inv_lc % p
            if c:
                qc[i - db] = c
                base = i - db
                for j in range(db + 1):
                    r[base + j] = (r[base + j] - c * bc[j]) % p
    else:
        add, mul, neg = F._add, F._mul, F._neg
        for i in range(len(r) - 1, db - 1, -1):
            c = mul[r[i]][inv_lc]
            if c:
                qc[i - db] = c
                nc = neg[c]
                base = i - db
                for j in range(db + 1):
                    r[base + j] = add[r[base + j]][mul[nc][bc[j]]]
    return Poly(F, qc), Poly(F, r[:db])


def gcd(a, b):
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def xgcd(a, b):
    """Return (g, s, u) with g = s*a + u*b monic."""
    F = a.F
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    u0, u1 = Poly.zero(F), Poly.one(F)
    while r1:
        qt, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        u0, u1 = u1, u0 - qt * u1
    if not r0:
        return r0, s0, u0
    k = F.inv(r0.lc)
    return r0.scale(k), s0.scale(k), u0.scale(k)


def inverse_mod(a, m):
    g, s, _ = xgcd(a % m, m)
    if g != 1:
        raise ZeroDivisionError(f"{a} is not invertible modulo {m}")
    return s % m


def powmod(a, k, m):
    r = Poly.one(a.F) % m
    b = a % m
    while k:
        if k & 1:
            r = (r * b) % m
        b = (b * b) % m
        k >>= 1
    return r


def is_irreducible(f):
    """Ben-Or style test: gcd(f, t^(q^k) - t) = 1 for k <= deg f / 2."""
    if not f or f.deg < 1:
        return False
    F = f.F
    n = f.deg
    if n == 1:
        return True
    t = Poly.t(F)
    h = t % f
    for _ in range(n // 2):
        h = powmod(h, F.q, f)
        if gcd(f, h - t) != 1:
            return False
    return True


def monic_polys(F, d):
    """All monic polynomials of degree exactly d, in canonical order."""
    for tail in itertools.product(range(F.q), repeat=d):
        yield Poly._raw(F, tail[::-1] + (1,))


_IRRED_CACHE = {}


def monic_irreducibles(F, d):
    key = (F, d)
    if key not in _IRRED_CACHE:
        _IRRED_CACHE[key] = [f for f in monic_polys(F, d) if is_irreducible(f)]
    return _IRRED_CACHE[key]


def factor(f):
    """Factor a nonzero polynomial: returns (unit, {monic irreducible: exponent}).

    Trial division by monic irreducibles of increasing degree; whatever is
    left once d > deg/2 is itself irreducible.
    """
    if not f:
        raise ValueError("cannot factor 0")
    F = f.F
    unit = f.lc
    g = f.monic()
    out = {}
    d = 1
    while g.deg >= 2 * d:
        for pi in monic_irreducibles(F, d):
            while True:
                qt, r = poly_divmod(g, pi)
                if r:
                    break
                out[pi] = out.get(pi, 0) + 1
                g = qt
            if g.deg < 2 * d:
                break
        d += 1
    if g.deg >= 1:
        out[g] = out.get(g, 0) + 1
    return unit, dict(sorted(out.items(), key=lambda kv: kv[0].sort_key()))


def valuation(f, pi):
    """Exponent of the prime pi in the nonzero polynomial f."""
    if not f:
        raise ValueError("valuation of 0")
    v = 0
    while True:
        qt, r = poly_divmod(f, pi)
        if r:
            return v
        f = qt
        v += 1


_TERM = re.compile(r"^([+-]?)\s*(\d*)\s*\*?\s*(t(?:\s*\^\s*(\d+))?)?$")


def parse_poly(F, text):
    """Parse prime-field polynomials written like ``2t^3 + t - 1``."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    coeffs = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m or (not m.group(2) and not m.group(3)):
            raise ValueError(f"cannot parse term {piece!r} in {text!r}")
        sign, num, mon, exp = m.groups()
        c = int(num) if num else 1
        if sign == "-":
            c = -c
        k = 0 if not mon else (int(exp) if exp else 1)
        coeffs[k] = coeffs.get(k, 0) + c
    n = max(coeffs) + 1
    return Poly.from_ints(F, [coeffs.get(i, 0) % F.p for i in range(n)])
