"""Theta series on SL_2(K_inf)/SL_2(O_inf).

A point is carried as the pair (y, x) of the upper triangular representative
[[y, x y^-1], [0, y^-1]].  Canonical points have y = t^-m and x a Laurent
polynomial in t^(1-2m) A.  With Psi the indicator of O_inf,

    theta_L(z) = sum_w Psi(t^2 y^2 Q(w)) e{t^2 x Q(w)},

so only deg y matters for the cutoff deg Q(w) <= -2 - 2 deg y, and the
character needs the coefficients of x down to t^(-1 - cutoff).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .algebra import CycValue, LaurentSeries, Poly, RatFunc, laurent_invert
from .errors import BudgetExceeded, InsufficientBound, InsufficientPrecision
from .fieldsums import FqQuadSpace, gauss_sum
from .localdata import weil_gamma
from .qform import adjoint, diagonalize_over_k, reduce
from .spectrum import DEFAULT_BUDGET, _plan

# above this many coefficient vectors theta sums switch to the Gauss-sum route
VECTOR_LIMIT = 200_000


def _reduced(L):
    return L if L.reduced else reduce(L)[0]


@dataclass(frozen=True)
class ThetaPoint:
    y: LaurentSeries
    x: LaurentSeries

    @classmethod
    def canonical(cls, F, m, x, shift=0):
        """y = t^-m and x = (poly) * t^shift, which must lie in t^(1-2m) A."""
        xs = LaurentSeries.from_poly(x, shift) if isinstance(x, Poly) else x
        if xs.terms and min(xs.terms) < 1 - 2 * m:
            raise ValueError(f"x must lie in t^{1 - 2 * m} A for y = t^-{m}")
        return cls(LaurentSeries.monomial(F, -m), xs)

    @property
    def F(self):
        return self.y.F

    @property
    def deg_y(self):
        return self.y.top

    def cutoff(self):
        """Largest deg Q(w) with Psi(t^2 y^2 Q(w)) = 1."""
        return -2 - 2 * self.deg_y

    def right_translate(self, u, b):
        """z * [[u, b], [0, u^-1]] for u in O_inf^x, b in O_inf: (y u, x + y^2 u b)."""
        return ThetaPoint(self.y * u, self.x + self.y * self.y * u * b)


def s_transform(z: ThetaPoint, target_precision: int) -> ThetaPoint:
    """S z = (y x^-1, -x^-1), with x^-1 known down to t^target_precision."""
    if not z.x.terms:
        raise ZeroDivisionError("S-transform needs x != 0")
    inv = laurent_invert(z.x, target_precision)
    return ThetaPoint(z.y * inv, -inv)


def _char_vector(x: LaurentSeries, cutoff: int):
    """r_i = coefficient of t^(-1-i) in x for i = 0..cutoff, so that the
    t^-1 coefficient of x*a is sum_i a_i r_i."""
    need = -1 - cutoff
    if x.prec > need:
        raise InsufficientPrecision(
            f"x known down to t^{x.prec}, theta needs t^{need}")
    return [x.terms.get(-1 - i, 0) for i in range(cutoff + 1)]


def _basis(L, c):
    """F_q-basis (i, d) of L_c: the vectors t^d v_i with 2d + mu_i <= c."""
    return [(i, d) for i, mu in enumerate(L.minima) if mu <= c
            for d in range((c - mu) // 2 + 1)]


def _functional(F, r, f, shift):
    """l(t^shift f) with l(a) = sum_i a_i r_i."""
    v = 0
    for j, a in enumerate(f.c):
        if a and r[j + shift]:
            v = F.add(v, F.mul(a, r[j + shift]))
    return v


def _sum_gauss(L, r, c):
    """sum over L_c of zeta^Tr(l(Q(w))) as the Gauss sum of the F_q-form l o Q."""
    F = L.F
    basis = _basis(L, c)
    M = [[_functional(F, r, L.gram[min(i, j), max(i, j)], d + e) for (j, e) in basis]
         for (i, d) in basis]
    return gauss_sum(FqQuadSpace(F, M), method="closed")


def _sum_vectors(L, r, c, budget):
    """Same sum, vector by vector."""
    F = L.F
    plan = _plan(F, L.minima, c)
    if plan.size() > budget:
        raise BudgetExceeded(plan.size(), budget, "theta enumeration")
    counts = np.zeros(F.p, dtype=np.int64)
    counts[0] += 1  # w = 0
    if plan.K:
        Cm = plan.coefficient_matrix(L.gram)
        mul, add, tr = F.mul_table, F.add_table, F.trace_table
        for X in plan.blocks():
            # coefficients of Q(w), one row per vector
            if F.e == 1:
                V = ((X[:, plan.A] * X[:, plan.B]) @ Cm) % F.p
            else:
                P = F.digit_table[mul[X[:, plan.A], X[:, plan.B]]].reshape(len(X), -1)
                D = (P @ Cm) % F.p
                V = (D.reshape(len(X), c + 1, F.e) * (F.p ** np.arange(F.e))).sum(axis=2)
            s = np.zeros(len(X), dtype=np.int64)
            for i in range(c + 1):
                if r[i]:
                    s = add[s, mul[V[:, i], r[i]]]
            # w and -w give the same value
            counts += 2 * np.bincount(tr[s], minlength=F.p)
    return CycValue.from_counts(F.p, counts.tolist())


def _theta_sum(L, r, c, method, budget):
    if c < 0:
        return CycValue.integer(L.F.p, 1)
    if method == "auto":
        method = "vectors" if _plan(L.F, L.minima, c).size() <= VECTOR_LIMIT else "gauss"
    if method == "gauss":
        return _sum_gauss(L, r, c)
    if method == "vectors":
        return _sum_vectors(L, r, c, budget)
    raise ValueError(f"unknown method {method!r}")


def theta_eval(L, z: ThetaPoint, method="auto", budget=DEFAULT_BUDGET) -> CycValue:
    """theta_L(z), exactly.

    ``vectors`` sums over L_cutoff directly; ``gauss`` evaluates the same sum
    as the Gauss sum of the F_q-quadratic form w -> (t^-1 coefficient of x Q(w))
    on L_cutoff.
    """
    L = _reduced(L)
    c = z.cutoff()
    r = _char_vector(z.x, c) if c >= 0 else []
    return _theta_sum(L, r, c, method, budget)


def theta_from_spectrum(S, z: ThetaPoint) -> CycValue:
    """sum_{deg a <= cutoff} R(L, a) e{t^2 x a} from a Spectrum."""
    F = S.F
    c = z.cutoff()
    if c < 0:
        return CycValue.integer(F.p, 1)
    if S.bound < c:
        raise InsufficientBound(f"spectrum bound {S.bound} below cutoff {c}")
    r = _char_vector(z.x, c)
    counts = [0] * F.p
    for a, n in S.counts.items():
        if a.deg <= c:
            counts[F.trace(_functional(F, r, a, 0))] += n
    return CycValue.from_counts(F.p, counts)


def theta_dual(L, z: ThetaPoint, method="auto", budget=DEFAULT_BUDGET) -> CycValue:
    """theta_{L#}(z) for L# with Gram M^-1, evaluated on the adjoint (values D Q#)."""
    L = _reduced(L)
    ad = _reduced(adjoint(L))
    D = L.det
    c = z.cutoff() + int(D.deg)
    if c < 0:
        return CycValue.integer(L.F.p, 1)
    if not z.x.terms:
        return _theta_sum(ad, [0] * (c + 1), c, method, budget)
    # t^-1 coefficient of x a / D for deg a <= c
    xd = z.x * laurent_invert(LaurentSeries.from_poly(D), -1 - c - z.x.top)
    return _theta_sum(ad, _char_vector(xd, c), c, method, budget)


def functional_equation_sides(L, z: ThetaPoint, method="auto", budget=DEFAULT_BUDGET):
    """Both sides of theta_L(z) = |D|^-1/2 |x|^-n/2 gamma_inf(x Q) theta_{L#}(S z), as complex numbers."""
    if not z.x.terms:
        raise ValueError("x = 0 is excluded from the functional equation")
    L = _reduced(L)
    F = L.F
    dD = int(L.det.deg)
    dx = int(z.x.top)
    lhs = theta_eval(L, z, method, budget).to_complex()
    # S z has deg y' = deg y - deg x; theta_dual then reads x' / D down to
    # t^(-1 - cutoff' - deg D), so x' = -1/x is needed down to t^(-1 - cutoff')
    cut = -2 - 2 * (int(z.deg_y) - dx)
    sz = s_transform(z, -1 - cut)
    rhs = theta_dual(L, sz, method, budget).to_complex()
    xr = _laurent_to_ratfunc(z.x)
    g = weil_gamma([d * xr for d in diagonalize_over_k(L)], None).to_complex()
    return lhs, F.q ** (-dD / 2) * F.q ** (-L.n / 2 * dx) * g * rhs


def functional_equation_residual(L, z: ThetaPoint, method="auto", budget=DEFAULT_BUDGET) -> float:
    lhs, rhs = functional_equation_sides(L, z, method, budget)
    return abs(lhs - rhs)


def _laurent_to_ratfunc(x: LaurentSeries):
    if not x.is_exact():
        raise InsufficientPrecision("x must be an exact Laurent polynomial")
    F = x.F
    lo = min(x.terms)
    shift = min(0, lo)
    num = Poly(F, [x.terms.get(i + shift, 0) for i in range(max(x.terms) - shift + 1)])
    return RatFunc(num, Poly.monomial(F, -shift))


def random_canonical_point(F, m, max_deg, rng: random.Random, low=None):
    """Random z = (t^-m, x) with x a nonzero Laurent polynomial in t^low A of degree <= max_deg.

    ``low`` defaults to 1 - 2m (the full coset domain)."""
    low = 1 - 2 * m if low is None else low
    while True:
        terms = {k: rng.randrange(F.q) for k in range(low, max_deg + 1)}
        x = LaurentSeries(F, terms)
        if x.terms:
            return ThetaPoint(LaurentSeries.monomial(F, -m), x)
