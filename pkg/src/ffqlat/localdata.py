"""Local invariants of lattices over A = F_q[t].

Places are the monic irreducibles pi of A plus the infinite place.  The
canonical character at pi is chi_pi(f) = zeta_p^Tr(Res_pi f); the residue is
read off as the t^-1 coefficient of the expansion at infinity, which is valid
once f has been brought to the form g / pi^k (the residue theorem with pi
and infinity the only poles).  At infinity the character is e{x} =
zeta_p^Tr(x_1), x_1 the coefficient of t^1.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

from .algebra import (CycValue, LaurentSeries, Poly, RatFunc, ScaledCycValue,
                      factor, inverse_mod, is_irreducible, laurent_invert, smith_normal_form,
                      valuation)
from .errors import BudgetExceeded, PoleAtOtherPrime, SingularForm
from .fieldsums import FqQuadSpace, gauss_sum
from .qform import NONSQUARE, SQUARE, determinant_class, diagonalize_over_k, hilbert_infinity

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class Place:
    """A finite place (monic irreducible ``pi``) or the infinite place (``pi`` None)."""

    pi: Poly | None = None

    def __post_init__(self):
        if self.pi is not None and (self.pi.lc != 1 or not is_irreducible(self.pi)):
            raise ValueError(f"{self.pi} is not a monic irreducible polynomial")

    @classmethod
    def finite(cls, pi):
        return cls(pi)

    @classmethod
    def infinity(cls):
        return cls(None)

    @property
    def is_infinite(self):
        return self.pi is None

    @property
    def deg(self):
        return 1 if self.pi is None else self.pi.deg

    def __str__(self):
        return "inf" if self.pi is None else str(self.pi)


def _place(pi):
    if isinstance(pi, Place):
        return pi
    return Place(pi)


# -- characters ----------------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def _inverse_series(P, depth):
    """Coefficients of 1/P at infinity down to t^(-deg P - depth)."""
    s = laurent_invert(LaurentSeries.from_poly(P), -P.deg - depth)
    return s


def residue_coeff(g, P):
    """Coefficient of t^-1 in the expansion of g / P at infinity (deg g < deg P fine or not)."""
    F = g.F
    if not g:
        return 0
    # t^-1 coefficient of g * (1/P): needs 1/P down to t^(-1 - deg g)
    depth = max(0, int(g.deg) + 1 - P.deg)
    inv = _inverse_series(P, depth)
    s = 0
    for i, c in enumerate(g.c):
        if c:
            v = inv.terms.get(-1 - i, 0)
            if v:
                s = F.add(s, F.mul(c, v))
    return s


def _split_at(f, pi):
    """Write f = g / (pi^k h) with gcd(h, pi) = 1; returns (g, k, h)."""
    f = f if isinstance(f, RatFunc) else RatFunc(f)
    den = f.den
    k = 0
    while True:
        qt, r = divmod(den, pi)
        if r:
            break
        den = qt
        k += 1
    return f.num, k, den


def chi_residue(f, pi, *, absorb=True):
    """Res_pi(f) in F_q, for f whose only finite pole (after absorption) is pi."""
    g, k, h = _split_at(f, pi)
    if k == 0:
        if h.deg > 0 and not absorb:
            raise PoleAtOtherPrime(f"{f} has poles away from {pi}")
        return 0
    if h.deg > 0:
        if not absorb:
            raise PoleAtOtherPrime(f"{f} has a pole away from {pi}")
    P = pi ** k
    # 1/h is a pi-unit; replacing it by its inverse mod pi^k changes f by an element of A_pi
    g = (g * inverse_mod(h, P)) % P
    return residue_coeff(g, P)


def chi_pi(f, pi, *, absorb=True) -> CycValue:
    """The canonical character chi_pi(f) = zeta_p^Tr(Res_pi f)."""
    pi = _place(pi).pi
    F = pi.F
    return CycValue.zeta(F.p, F.trace(chi_residue(f, pi, absorb=absorb)))


def e_char(x: LaurentSeries) -> CycValue:
    """e{x} = zeta_p^Tr(x_1)."""
    F = x.F
    return CycValue.zeta(F.p, F.trace(x.coeff(1)))


# -- Hilbert symbols -------------------------------------------------------------------

def _eta(u, pi):
    """Quadratic character of the residue field A/pi at the nonzero class u."""
    F = pi.F
    e = (F.q ** pi.deg - 1) // 2
    r = pow_mod(u % pi, e, pi)
    if r == 1:
        return 1
    if r == Poly.const(F, F.neg(1)):
        return -1
    raise ValueError(f"{u} is not a unit modulo {pi}")


def pow_mod(a, k, m):
    r = Poly.one(a.F) % m
    b = a % m
    while k:
        if k & 1:
            r = (r * b) % m
        b = (b * b) % m
        k >>= 1
    return r


def _ratfunc(x):
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x)


def hilbert_symbol(a, b, v) -> int:
    """Tame Hilbert symbol (a, b)_v for nonzero a, b in K = F_q(t)."""
    a, b = _ratfunc(a), _ratfunc(b)
    if not a or not b:
        raise ValueError("Hilbert symbol of 0")
    v = _place(v)
    if v.is_infinite:
        return hilbert_infinity(a.F, a, b)
    pi = v.pi
    va, ua = a.unit_part(pi)
    vb, ub = b.unit_part(pi)
    x = ua ** vb * ub ** (-va)
    if va * vb % 2:
        x = -x
    return _eta(x.residue_mod(pi), pi)


def relevant_places(*xs):
    """Finite places where some x has odd or nonzero valuation, plus infinity."""
    primes = {}
    for x in xs:
        x = _ratfunc(x)
        for part in (x.num, x.den):
            if part.deg > 0:
                primes.update(factor(part)[1])
    out = [Place(pi) for pi in sorted(primes, key=lambda p: p.sort_key())]
    return out + [Place.infinity()]


def hilbert_product(a, b):
    s = 1
    for v in relevant_places(a, b):
        s *= hilbert_symbol(a, b, v)
    return s


# -- Jordan decomposition -----------------------------------------------------------

@dataclass(frozen=True)
class JordanSymbol:
    """components: tuple of (scale nu, rank m, residue det class) with nu increasing."""

    pi: Poly
    components: tuple

    def scales(self):
        return tuple(c[0] for c in self.components)

    def to_json(self):
        return {"pi": self.pi.to_ints(), "components": [list(c) for c in self.components]}


def local_diagonal(L, pi):
    """Diagonal entries (as RatFunc) of an orthogonal basis of L over A_(pi)."""
    n = L.n
    M = [[RatFunc(L.gram[i, j]) for j in range(n)] for i in range(n)]
    live = list(range(n))
    out = []

    def val(x):
        return x.v_pi(pi) if x else math.inf

    while live:
        best = min((val(M[i][j]), 0 if i == j else 1, i, j) for i in live for j in live if i <= j)
        v, off, i, j = best
        if v == math.inf:
            raise SingularForm("degenerate form")
        if off:
            # v_i <- v_i + v_j: Q(v_i + v_j) = m_ii + 2 m_ij + m_jj has valuation v
            for r in range(n):
                M[r][i] = M[r][i] + M[r][j]
            for c in range(n):
                M[i][c] = M[i][c] + M[j][c]
        k = i
        piv = M[k][k]
        out.append(piv)
        live.remove(k)
        for j2 in live:
            if M[k][j2]:
                c = M[k][j2] / piv
                for r in range(n):
                    M[r][j2] = M[r][j2] - c * M[r][k]
                for cc in range(n):
                    M[j2][cc] = M[j2][cc] - c * M[k][cc]
    return out


def jordan_decompose(L, pi) -> JordanSymbol:
    pi = _place(pi).pi
    groups = {}
    for d in local_diagonal(L, pi):
        v, u = d.unit_part(pi)
        groups.setdefault(v, []).append(u)
    comps = []
    for v in sorted(groups):
        us = groups[v]
        prod = us[0]
        for u in us[1:]:
            prod = prod * u
        cls = SQUARE if _eta(prod.residue_mod(pi), pi) == 1 else NONSQUARE
        comps.append((v, len(us), cls))
    return JordanSymbol(pi, tuple(comps))


def predicted_log_mu(sym: JordanSymbol, k: int) -> float:
    """log_q |mu(L, pi^-k Q, chi_pi)| = -sum m_i deg(pi)/2 max(0, k - nu_i)."""
    d = sym.pi.deg
    return -sum(m * d * max(0, k - nu) for nu, m, _ in sym.components) / 2


# -- averages mu(L, pi^-k Q, chi_pi) -----------------------------------------------------

def _quotient_layout(L, pi, k):
    """SNF data for L / {y : M y = 0 mod pi^k}: list of (column of V, c_i)."""
    D, U, V = smith_normal_form(L.gram)
    cols = []
    for i in range(L.n):
        c = max(0, k - valuation(D[i, i], pi))
        if c:
            cols.append(([V[r, i] for r in range(L.n)], c))
    return cols


def _bilinear_poly(L, x, y):
    s = Poly.zero(L.F)
    for i in range(L.n):
        for j in range(L.n):
            if x[i] and y[j] and L.gram[i, j]:
                s = s + x[i] * y[j] * L.gram[i, j]
    return s


def _local_quadratic_form(L, pi, k):
    """The F_q-quadratic form z -> Res_pi(pi^-k Q(V z)) on the quotient, as a matrix."""
    F = L.F
    cols = _quotient_layout(L, pi, k)
    basis = []  # (column index, power of t)
    for ci, (_, c) in enumerate(cols):
        for j in range(c * pi.deg):
            basis.append((ci, j))
    P = pi ** k
    prods = {}
    for a in range(len(cols)):
        for b in range(a, len(cols)):
            prods[a, b] = _bilinear_poly(L, cols[a][0], cols[b][0]) % P
    N = len(basis)
    mat = [[0] * N for _ in range(N)]
    t = Poly.t(F)
    for s in range(N):
        for r in range(s, N):
            (a, ja), (b, jb) = basis[s], basis[r]
            h = prods[min(a, b), max(a, b)]
            val = residue_coeff((h * t ** (ja + jb)) % P, P) if h else 0
            mat[s][r] = mat[r][s] = val
    return mat, N


def mu_average(L, pi, k, *, method="auto", budget=DEFAULT_BUDGET) -> ScaledCycValue:
    """mu(L, pi^-k Q, chi_pi): exact average of chi_pi(pi^-k Q(x)) over L / (L cap pi^k L#)."""
    pi = _place(pi).pi
    F = L.F
    if k <= 0:
        return ScaledCycValue(CycValue.integer(F.p, 1), F.q, 0)
    mat, N = _local_quadratic_form(L, pi, k)
    size = F.q ** N
    if method == "auto":
        method = "brute" if size <= budget else "gauss"
    if method == "brute":
        if size > budget:
            raise BudgetExceeded(size, budget, "local quotient")
        total = gauss_sum(FqQuadSpace(F, mat), "direct", budget=max(budget, size))
    else:
        total = gauss_sum(FqQuadSpace(F, mat), "closed")
    return ScaledCycValue(total, F.q, 2 * N)


def mu_average_direct(L, pi, k, budget=DEFAULT_BUDGET):
    """Same average computed straight from chi_pi on quotient representatives (slow oracle)."""
    pi = _place(pi).pi
    F = L.F
    if k <= 0:
        return ScaledCycValue(CycValue.integer(F.p, 1), F.q, 0)
    cols = _quotient_layout(L, pi, k)
    N = sum(c * pi.deg for _, c in cols)
    if F.q ** N > budget:
        raise BudgetExceeded(F.q ** N, budget, "local quotient")
    P = pi ** k
    counts = [0] * F.p
    zero = Poly.zero(F)
    ranges = [itertools.product(range(F.q), repeat=c * pi.deg) for _, c in cols]
    for zs in itertools.product(*[list(r) for r in ranges]):
        x = [zero] * L.n
        for (col, _), z in zip(cols, zs):
            zp = Poly(F, z)
            x = [xi + zp * vi for xi, vi in zip(x, col)]
        val = L.value(x)
        counts[F.trace(chi_residue(RatFunc(val, P), pi))] += 1
    return ScaledCycValue(CycValue.from_counts(F.p, counts), F.q, 2 * N)


# -- Weil indices -------------------------------------------------------------------------

def _gamma_entry(a, place):
    a = _ratfunc(a)
    F = a.F
    if place.is_infinite:
        v = -int(a.deg)
    else:
        v = a.v_pi(place.pi)
    j = (-v) // 2
    s = -v - 2 * j  # 0 or 1
    if s == 0:
        return ScaledCycValue(CycValue.integer(F.p, 1), F.q, 0)
    counts = [0] * F.p
    if place.is_infinite:
        b = a * RatFunc(Poly.one(F), Poly.monomial(F, 2 * j)) if j >= 0 else a * Poly.monomial(F, -2 * j)
        # b has degree 1: e{b y^2} = zeta^Tr(y^2 lc(b))
        c1 = b.lc
        for y in range(F.q):
            counts[F.trace(F.mul(c1, F.mul(y, y)))] += 1
        return ScaledCycValue(CycValue.from_counts(F.p, counts), F.q, 1)
    pi = place.pi
    scale = RatFunc(pi) ** (2 * j)
    b = a * scale  # valuation -1
    d = pi.deg
    for ys in itertools.product(range(F.q), repeat=d):
        y = Poly(F, ys)
        counts[F.trace(chi_residue(b * (y * y), pi))] += 1
    return ScaledCycValue(CycValue.from_counts(F.p, counts), F.q, d)


def weil_gamma(entries, v) -> ScaledCycValue:
    """Weil index of the diagonal form <a_1, ..., a_n> over K_v (product of 1-dim indices)."""
    v = _place(v)
    entries = list(entries)
    if not entries:
        raise ValueError("empty form")
    out = None
    for a in entries:
        if not a:
            raise SingularForm("degenerate form")
        g = _gamma_entry(a, v)
        out = g if out is None else out * g
    return out


def weil_gamma_form(L, v, scale=None):
    """Weil index of (L, scale * Q) at v via a diagonalization over K."""
    diag = local_diagonal(L, v.pi) if not _place(v).is_infinite else _k_diagonal(L)
    if scale is not None:
        diag = [d * scale for d in diag]
    return weil_gamma(diag, v)


def _k_diagonal(L):
    d = diagonalize_over_k(L)
    if d is None:
        # isotropic vector: use the local routine which handles zero diagonals
        return local_diagonal(L, Poly.t(L.F))
    return d


# -- genus ---------------------------------------------------------------------------------

def hasse_infinity(L):
    diag = _k_diagonal(L)
    h = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            h *= hilbert_infinity(L.F, diag[i], diag[j])
    return h


def infinity_invariants(L):
    from .qform import SquareClassAtInfinity, is_definite

    dc = SquareClassAtInfinity.of(L.det)
    return (is_definite(L), hasse_infinity(L), dc.parity, dc.unit_square)


def genus_symbol(L):
    """(monic det, unit class, Jordan symbols at pi | det, invariants at infinity)."""
    monic, cls = determinant_class(L)
    syms = []
    if monic.deg > 0:
        for pi in factor(monic)[1]:
            syms.append(jordan_decompose(L, pi))
    return (monic, cls, tuple(syms), infinity_invariants(L))


def same_genus(L, L2) -> bool:
    if L.n != L2.n:
        raise ValueError("rank mismatch")
    return genus_symbol(L) == genus_symbol(L2)


def genus_hash(L):
    monic, cls, syms, inf = genus_symbol(L)
    return (tuple(monic.c), cls, tuple((tuple(s.pi.c), s.components) for s in syms), inf)


# -- audibility ---------------------------------------------------------------------------

def audibility_experiment(L, pi, k_max, *, budget=DEFAULT_BUDGET, tol=1e-9):
    """Measure mu_k for k = 0..k_max and recover the Jordan symbol at pi from them."""
    place = _place(pi)
    pi = place.pi
    F = L.F
    d = pi.deg
    sym = jordan_decompose(L, pi)
    mus = [mu_average(L, pi, k, budget=budget) for k in range(k_max + 1)]
    measured = [m.log_q_abs() for m in mus]
    predicted = [predicted_log_mu(sym, k) for k in range(k_max + 1)]
    magnitude_ok = all(abs(a - b) <= tol for a, b in zip(measured, predicted))

    # g(k) = sum_i m_i max(0, k - nu_i); its second difference gives the ranks
    g = [round(-2 * x / d) for x in measured]
    first = [g[k + 1] - g[k] for k in range(k_max)]  # = sum of m_i with nu_i <= k
    ranks = {}
    for nu in range(k_max):
        m = first[nu] - (first[nu - 1] if nu else 0)
        if m:
            ranks[nu] = m
    # det classes from the phases: at k = nu + 1 the new component contributes
    # gamma(<pi^-1>)^m * eta(det) and older ones with k - nu_i odd are known
    gpi = weil_gamma([RatFunc(Poly.one(F), pi)], place).to_complex()
    classes = {}
    for nu in sorted(ranks):
        k = nu + 1
        z = mus[k].to_complex()
        phase = z / abs(z)
        known = 1
        for nu2, m2 in ranks.items():
            if nu2 < nu and (k - nu2) % 2:
                known *= gpi ** m2 * classes[nu2]
        eps = phase / (known * gpi ** ranks[nu])
        classes[nu] = 1 if abs(eps - 1) < 1e-6 else (-1 if abs(eps + 1) < 1e-6 else None)
    recovered = tuple((nu, ranks[nu], SQUARE if classes[nu] == 1 else NONSQUARE)
                      for nu in sorted(ranks))
    complete = sum(ranks.values()) == L.n
    return {
        "pi": str(pi),
        "k": list(range(k_max + 1)),
        "measured_log_q_abs": measured,
        "predicted_log_q_abs": predicted,
        "magnitudes_match": magnitude_ok,
        "jordan": [list(c) for c in sym.components],
        "recovered": [list(c) for c in recovered],
        "complete": complete,
        "symbol_match": complete and recovered == sym.components,
        "mu": [[m.sum.coeffs, m.k] for m in mus],
    }


def local_outputs(L, pi, k_max, budget=DEFAULT_BUDGET):
    """Exact mu values for k <= k_max: the audible local data at pi."""
    return tuple((m.sum.coeffs, m.k) for m in (mu_average(L, pi, k, budget=budget)
                                               for k in range(k_max + 1)))

