"""Quadratic lattices over A = F_q[t] given by Gram matrices.

The Gram matrix stores m_ij = B(v_i, v_j)/2, so Q(x) = x^T M x and
m_ii = Q(v_i).  A Gram matrix is *reduced* when

    deg m_ii <= deg m_jj  (i <= j)   and   deg m_ij < deg m_ii  (i < j),

and the diagonal degrees of a reduced Gram are the successive minima.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .algebra import GF, NEG_INF, Poly, PolyMatrix, RatFunc, poly_divmod
from .errors import FieldMismatch, NotDefinite, SingularForm

SQUARE, NONSQUARE = "square", "nonsquare"


# -- square classes at infinity ----------------------------------------------

@dataclass(frozen=True)
class SquareClassAtInfinity:
    """Class of a nonzero element of K_inf modulo squares.

    ``parity`` is deg mod 2 (equivalently v_inf mod 2) and ``unit_square`` is
    whether the leading coefficient is a square.  Representatives are 1, delta,
    t, delta*t.
    """

    parity: int
    unit_square: bool

    @classmethod
    def of(cls, x):
        """Class of a nonzero Poly or RatFunc."""
        if not x:
            raise ValueError("square class of 0")
        return cls(int(x.deg) % 2, x.F.is_square(x.lc))

    @property
    def unit_class(self):
        return SQUARE if self.unit_square else NONSQUARE

    def __mul__(self, other):
        return SquareClassAtInfinity((self.parity + other.parity) % 2,
                                     self.unit_square == other.unit_square)

    def is_square(self):
        return self.parity == 0 and self.unit_square


def hilbert_infinity(F, a, b):
    """Hilbert symbol (a, b) at infinity from leading data (deg, lc) of a and b.

    a and b are nonzero Poly/RatFunc.  Uniformizer 1/t, so v(a) = -deg a and
    the unit part of a is lc(a).
    """
    va, vb = -int(a.deg), -int(b.deg)
    s = 1
    if va * vb % 2:
        s *= F.psi(F.neg(1))
    if vb % 2:
        s *= F.psi(a.lc)
    if va % 2:
        s *= F.psi(b.lc)
    return s


# -- the lattice type ------------------------------------------------------

def _as_poly(F, e):
    if isinstance(e, Poly):
        if e.F is not F:
            raise FieldMismatch("entry over a different field")
        return e
    if isinstance(e, int):
        return Poly.const(F, F.from_int(e))
    return Poly.from_ints(F, e)


class GramLattice:
    """A free A-lattice of rank n <= 4 with a nondegenerate quadratic form."""

    __slots__ = ("F", "n", "gram", "reduced", "minima", "_det")

    def __init__(self, F, gram, *, reduced=None, check=True):
        if isinstance(gram, PolyMatrix):
            rows = gram.entries
        else:
            rows = [[_as_poly(F, e) for e in r] for r in gram]
        self.F = F
        self.gram = PolyMatrix(F, rows)
        self.n = self.gram.rows
        self._det = None
        if check:
            if not 1 <= self.n <= 4 or not self.gram.is_symmetric():
                raise ValueError("Gram matrix must be symmetric of size 1..4")
            if not self.det:
                raise SingularForm("Gram matrix is singular")
        if reduced is None:
            reduced = is_reduced(self.gram)
        self.reduced = reduced
        self.minima = tuple(int(self.gram[i, i].deg) for i in range(self.n)) if reduced else None

    @classmethod
    def diagonal(cls, F, entries):
        d = [_as_poly(F, e) for e in entries]
        return cls(F, PolyMatrix.diag(F, d))

    @property
    def det(self):
        if self._det is None:
            self._det = self.gram.det()
        return self._det

    def __getitem__(self, ij):
        return self.gram[ij]

    def __eq__(self, other):
        return isinstance(other, GramLattice) and self.F is other.F and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"GramLattice({self.render()})"

    def render(self):
        return "[" + "; ".join(", ".join(str(e) for e in r) for r in self.gram.entries) + "]"

    def value(self, x):
        """Q(x) for a coordinate vector x of Polys (or field ints)."""
        x = [_as_poly(self.F, c) for c in x]
        s = Poly.zero(self.F)
        for i in range(self.n):
            if not x[i]:
                continue
            s = s + x[i] * x[i] * self.gram[i, i]
            for j in range(i + 1, self.n):
                if x[j] and self.gram[i, j]:
                    s = s + (x[i] * x[j] * self.gram[i, j]).scale(self.F.from_int(2))
        return s

    def transform(self, U):
        """Lattice with Gram U^T M U (U a PolyMatrix over A)."""
        return GramLattice(self.F, U.T * self.gram * U)

    def gram_ints(self):
        return [[e.to_ints() for e in r] for r in self.gram.entries]

    def to_json(self):
        return {"field": self.F.to_json(), "gram": self.gram_ints()}

    @classmethod
    def from_json(cls, d, F=None):
        if F is None:
            F = GF.from_json(d["field"])
        return cls(F, [[Poly.from_ints(F, e) for e in r] for r in d["gram"]])

    def content_hash(self):
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:32]

    def key(self):
        """Hashable exact key of the Gram matrix."""
        return tuple(tuple(e.c for e in r) for r in self.gram.entries)


def is_reduced(gram):
    n = gram.rows
    d = [gram[i, i].deg for i in range(n)]
    if any(x == NEG_INF for x in d):
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if d[i] > d[j] or gram[i, j].deg >= d[i]:
                return False
    return True


# -- definiteness ----------------------------------------------------------

def diagonalize_over_k(L):
    """Orthogonal basis over K = F_q(t): list of diagonal RatFunc entries.

    Returns None when a zero pivot shows up, i.e. an isotropic vector was
    found.
    """
    n = L.n
    M = [[RatFunc(L.gram[i, j]) for j in range(n)] for i in range(n)]
    out = []
    for k in range(n):
        piv = M[k][k]
        if not piv:
            # Q(v_k) = 0 for the current (nonzero) basis vector
            return None
        out.append(piv)
        for j in range(k + 1, n):
            if M[k][j]:
                c = M[k][j] / piv
                for r in range(n):
                    M[r][j] = M[r][j] - c * M[r][k]
                for cc in range(n):
                    M[j][cc] = M[j][cc] - c * M[k][cc]
    return out


def _anisotropic_at_infinity(F, diag):
    n = len(diag)
    if n == 1:
        return True
    if n >= 5:
        return False
    if n == 2:
        a, b = diag
        return not SquareClassAtInfinity.of(-(a * b)).is_square()
    if n == 3:
        a, b, c = diag
        return hilbert_infinity(F, -(a * c), -(b * c)) == -1
    d = diag[0] * diag[1] * diag[2] * diag[3]
    if not SquareClassAtInfinity.of(d).is_square():
        return False
    h = 1
    for i in range(4):
        for j in range(i + 1, 4):
            h *= hilbert_infinity(F, diag[i], diag[j])
    return h == -1


def is_definite(L):
    """True iff Q is anisotropic over K_inf = F_q((1/t))."""
    if not L.det:
        raise SingularForm("Gram matrix is singular")
    if L.n >= 5:
        return False
    diag = diagonalize_over_k(L)
    if diag is None:
        return False
    return _anisotropic_at_infinity(L.F, diag)


def reduced_is_definite(F, gram):
    """Definiteness of a Gram already satisfying the reduced conditions.

    Vectors with 2 deg x_i + mu_i maximal share the parity of mu_i, so the top
    coefficient of Q(x) is the diagonal form sum lc(m_ii) c_i^2 over one parity
    class.  The form is definite iff each such F_q-form is anisotropic.
    """
    classes = ([], [])
    for i in range(gram.rows):
        e = gram[i, i]
        classes[int(e.deg) % 2].append(e.lc)
    for cls in classes:
        if len(cls) >= 3:
            return False
        if len(cls) == 2 and F.is_square(F.neg(F.mul(cls[0], cls[1]))):
            return False
    return True


# -- reduction -------------------------------------------------------------

def _diag_key(e):
    return (e.deg, e.c[::-1])


def reduce(L, *, check=True):
    """Reduce a definite lattice: returns (L_red, U) with U^T M U = M_red."""
    F, n = L.F, L.n
    if check and not is_definite(L):
        raise NotDefinite("form is isotropic over K_inf")
    M = [list(r) for r in L.gram.entries]
    U = [list(r) for r in PolyMatrix.identity(F, n).entries]
    maxdeg = max(max((int(e.deg) for e in r if e), default=0) for r in M)
    cap = 64 * n * max(1, maxdeg)
    for _ in range(cap):
        if any(not M[i][i] for i in range(n)):
            raise NotDefinite("basis vector of norm 0")
        order = sorted(range(n), key=lambda i: _diag_key(M[i][i]))
        if order != list(range(n)):
            M = [[M[i][j] for j in order] for i in order]
            U = [[r[j] for j in order] for r in U]
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                if M[i][j].deg < M[i][i].deg:
                    continue
                qt, _ = poly_divmod(M[i][j], M[i][i])
                # v_j <- v_j - qt v_i
                for r in range(n):
                    M[r][j] = M[r][j] - qt * M[r][i]
                for c in range(n):
                    M[j][c] = M[j][c] - qt * M[i][c]
                for r in U:
                    r[j] = r[j] - qt * r[i]
                changed = True
        if not changed and is_reduced(PolyMatrix(F, M)):
            red = GramLattice(F, M, reduced=True, check=False)
            return red, PolyMatrix(F, U)
    raise NotDefinite("reduction did not terminate within the pass cap")


def successive_minima(L):
    if L.reduced:
        return L.minima
    red, _ = reduce(L)
    return red.minima


# -- determinant, dual, adjoint -----------------------------------------------

def determinant_class(L):
    d = L.det
    if not d:
        raise SingularForm("Gram matrix is singular")
    return d.monic(), SQUARE if L.F.is_square(d.lc) else NONSQUARE


def adjoint(L):
    """Adjoint lattice: Gram = reversed adjugate of the Gram of L.

    This is the dual lattice L# (reversed dual basis) with the form scaled by
    D = det L; for reduced ternary L it is again reduced with minima
    (mu1+mu2, mu1+mu3, mu2+mu3).
    """
    if not L.det:
        raise SingularForm("Gram matrix is singular")
    return GramLattice(L.F, L.gram.adjugate().reversed())


# -- random transforms (used by tests and the harness) -------------------------

def random_gl_fq(F, n, rng: random.Random):
    """Uniform random element of GL_n(F_q), as a PolyMatrix of constants."""
    while True:
        rows = [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)]
        U = PolyMatrix(F, [[Poly.const(F, a) for a in r] for r in rows])
        if U.det():
            return U


def random_unimodular(F, n, deg, rng: random.Random, steps=None):
    """Product of random elementary matrices with polynomial entries of degree <= deg,
    a random permutation and a random diagonal unit scaling."""
    steps = steps if steps is not None else 2 * n
    U = [list(r) for r in PolyMatrix.identity(F, n).entries]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            break
        c = Poly(F, [rng.randrange(F.q) for _ in range(deg + 1)])
        for r in U:
            r[j] = r[j] + c * r[i]
    perm = list(range(n))
    rng.shuffle(perm)
    U = [[r[j] for j in perm] for r in U]
    for j in range(n):
        k = rng.randrange(1, F.q)
        for r in U:
            r[j] = r[j].scale(k)
    return PolyMatrix(F, U)
