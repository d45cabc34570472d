"""Truncated Laurent series in 1/t, i.e. elements of K_inf = F_q((1/t)).

A series is ``sum_i c_i t^i`` with finitely many exponents above any bound
and coefficients known exactly for every exponent ``>= prec``.  Exact
elements (images of polynomials, Laurent polynomials) carry
``prec = -inf``.  Asking for a coefficient below ``prec`` raises
:class:`InsufficientPrecision` instead of returning zero.
"""

import math

from ..errors import InsufficientPrecision
from .poly import NEG_INF, Poly

EXACT = NEG_INF


class LaurentSeries:
    __slots__ = ("F", "terms", "prec")

    def __init__(self, F, terms, prec=EXACT):
        self.F = F
        self.prec = prec
        self.terms = {k: v for k, v in terms.items() if v and k >= prec}

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_poly(cls, f, shift=0):
        """f * t^shift, exactly."""
        return cls(f.F, {i + shift: a for i, a in enumerate(f.c) if a})

    @classmethod
    def monomial(cls, F, k, a=1):
        return cls(F, {k: a})

    @classmethod
    def from_ratfunc(cls, r, prec):
        """Expansion of num/den at infinity, correct down to exponent prec."""
        if not r.num:
            return cls(r.F, {})
        if r.den.deg == 0:
            return cls.from_poly(r.num).scale(r.F.inv(r.den.lc))
        return cls.from_poly(r.num) * laurent_invert(cls.from_poly(r.den), prec - r.num.deg)

    # -- inspection -----------------------------------------------------
    @property
    def top(self):
        """Highest exponent with nonzero coefficient (-v_inf); NEG_INF for zero."""
        return max(self.terms) if self.terms else NEG_INF

    def is_zero(self):
        """True when no nonzero coefficient is known (may be zero only to precision)."""
        return not self.terms

    def coeff(self, i):
        if i < self.prec:
            raise InsufficientPrecision(f"coefficient of t^{i} requested, precision is {self.prec}")
        return self.terms.get(i, 0)

    def lc(self):
        return self.terms[self.top]

    def is_exact(self):
        return self.prec == EXACT

    def __repr__(self):
        items = sorted(self.terms.items(), reverse=True)
        body = " + ".join(f"{a}*t^{k}" for k, a in items) or "0"
        tail = "" if self.prec == EXACT else f" + O(t^{self.prec - 1})"
        return f"Laurent({body}{tail})"

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.F is other.F and self.prec == other.prec and self.terms == other.terms

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        F = self.F
        prec = max(self.prec, other.prec)
        out = {k: v for k, v in self.terms.items() if k >= prec}
        for k, v in other.terms.items():
            if k >= prec:
                out[k] = F.add(out.get(k, 0), v)
        return LaurentSeries(F, out, prec)

    def __neg__(self):
        return LaurentSeries(self.F, {k: self.F.neg(v) for k, v in self.terms.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return LaurentSeries(self.F, {k: self.F.mul(v, a) for k, v in self.terms.items()}, self.prec)

    def shift(self, k):
        """Multiply by t^k."""
        return LaurentSeries(self.F, {i + k: v for i, v in self.terms.items()}, self.prec + k)

    def __mul__(self, other):
        if isinstance(other, Poly):
            other = LaurentSeries.from_poly(other)
        F = self.F
        # coefficient at e is exact iff no unknown coefficient can contribute
        prec = max(_add(self.prec, other.top), _add(other.prec, self.top))
        if not self.terms or not other.terms:
            if prec == NEG_INF:
                prec = max(self.prec, other.prec)
            return LaurentSeries(F, {}, prec)
        out = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = i + j
                if k >= prec:
                    out[k] = F.add(out.get(k, 0), F.mul(a, b))
        return LaurentSeries(F, out, prec)

    __rmul__ = __mul__


def _add(a, b):
    # NEG_INF + NEG_INF style bookkeeping without nan
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def laurent_invert(x, target_precision):
    """Inverse of a nonzero series, correct down to exponent target_precision.

    Raises InsufficientPrecision when the input is not known precisely enough
    to determine the requested coefficients.
    """
    if not x.terms:
        raise ZeroDivisionError("inverse of zero (or of a series known only to be 0)")
    F = x.F
    d = x.top
    sound = x.prec - 2 * d if x.prec != EXACT else EXACT
    if target_precision < sound:
        raise InsufficientPrecision(
            f"input precision {x.prec} only determines the inverse down to t^{sound}")
    inv_lc = F.inv(x.terms[d])
    top = -d
    y = {top: inv_lc}
    xs = sorted(((d - i, a) for i, a in x.terms.items() if i < d))  # (gap j, x_{d-j})
    for e in range(top - 1, math.floor(target_precision) - 1, -1):
        s = 0
        for j, a in xs:
            if e + j > top:
                break
            yv = y.get(e + j)
            if yv:
                s = F.add(s, F.mul(a, yv))
        if s:
            y[e] = F.neg(F.mul(inv_lc, s))
    return LaurentSeries(F, y, target_precision)
