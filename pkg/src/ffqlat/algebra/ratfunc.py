"""Elements of K = F_q(t) as reduced fractions with monic denominator."""

from .poly import Poly, gcd, inverse_mod, poly_divmod, valuation


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, RatFunc):
            if den is not None:
                raise TypeError("den given with RatFunc numerator")
            self.num, self.den = num.num, num.den
            return
        F = num.F
        if den is None:
            den = Poly.one(F)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = gcd(num, den)
        if g.deg > 0:
            num = num // g
            den = den // g
        k = F.inv(den.lc)
        self.num = num.scale(k)
        self.den = den.scale(k)

    @property
    def F(self):
        return self.num.F

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    @property
    def deg(self):
        """deg(num) - deg(den); minus v_inf."""
        return self.num.deg - self.den.deg

    @property
    def lc(self):
        """Leading coefficient at infinity (den is monic)."""
        return self.num.lc

    def is_poly(self):
        return self.den.deg == 0

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (Poly, int)):
            return self.den.deg == 0 and self.num == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def _c(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, int):
            return RatFunc(Poly.const(self.F, self.F.from_int(other)))
        return NotImplemented

    def __add__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of 0")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._c(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def v_pi(self, pi):
        """Valuation at the finite prime pi."""
        if not self.num:
            raise ValueError("valuation of 0")
        return valuation(self.num, pi) - valuation(self.den, pi)

    def unit_part(self, pi):
        """(v, u) with self = pi^v * u and u a pi-unit."""
        v = self.v_pi(pi)
        if v >= 0:
            return v, RatFunc(self.num // (pi ** v), self.den)
        return v, RatFunc(self.num, self.den // (pi ** (-v)))

    def residue_mod(self, pi):
        """Image of a pi-integral element in A/pi, as a Poly of degree < deg pi."""
        if not self.den % pi:
            raise ValueError(f"{self} is not integral at {pi}")
        return (self.num % pi) * inverse_mod(self.den, pi) % pi

    def __repr__(self):
        if self.den.deg == 0:
            return f"RatFunc({self.num})"
        return f"RatFunc(({self.num})/({self.den}))"

    __str__ = __repr__


def as_ratfunc(x):
    return x if isinstance(x, RatFunc) else RatFunc(x)


__all__ = ["RatFunc", "as_ratfunc", "poly_divmod"]
