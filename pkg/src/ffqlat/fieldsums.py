"""Quadratic spaces over F_q, their Gauss sums, and systems of forms.

The additive character is chi(x) = zeta_p^Tr(x).  For a quadratic space
(W, phi) of dimension n and rank r,

    Gamma(W, phi) = sum_w chi(phi(w)) = q^(n-r) psi(det phi_0) G^r,

where phi_0 is phi on a complement of the radical and G = Gamma(F_q, <1>).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import CycValue, Poly
from .errors import BudgetExceeded

DEFAULT_BUDGET = 5_000_000


def _sym(F, matrix):
    n = len(matrix)
    M = [[int(matrix[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise ValueError("matrix is not symmetric")
            if not 0 <= M[i][j] < F.q:
                raise ValueError("entry outside F_q")
    return M


def diagonalize_fq(F, matrix):
    """Nonzero diagonal entries of a diagonalization of a symmetric F_q-matrix."""
    M = [list(r) for r in matrix]
    n = len(M)
    out = []
    k = 0
    live = list(range(n))
    while live:
        piv = next((i for i in live if M[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in live for j in live if i < j and M[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 m_ij != 0
            for r in range(n):
                M[r][i] = F.add(M[r][i], M[r][j])
            for c in range(n):
                M[i][c] = F.add(M[i][c], M[j][c])
            piv = i
        a = M[piv][piv]
        out.append(a)
        live.remove(piv)
        ia = F.inv(a)
        for j in live:
            c = F.mul(M[piv][j], ia)
            if c:
                for r in range(n):
                    M[r][j] = F.sub(M[r][j], F.mul(c, M[r][piv]))
                for cc in range(n):
                    M[j][cc] = F.sub(M[j][cc], F.mul(c, M[piv][cc]))
        k += 1
    return out


@dataclass(frozen=True)
class FqQuadSpace:
    """phi(w) = w^T M w on F_q^n."""

    F: object
    matrix: tuple

    def __init__(self, F, matrix):
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in _sym(F, matrix)))

    @property
    def n(self):
        return len(self.matrix)

    @functools.cached_property
    def _diag(self):
        return diagonalize_fq(self.F, self.matrix)

    @property
    def rank(self):
        return len(self._diag)

    @property
    def radical_dim(self):
        return self.n - self.rank

    def det_class(self):
        """psi(det phi_0) in {1, -1}; 1 for the zero form."""
        d = 1
        for a in self._diag:
            d = self.F.mul(d, a)
        return self.F.psi(d)

    def value(self, w):
        F = self.F
        s = 0
        for i in range(self.n):
            for j in range(self.n):
                if self.matrix[i][j] and w[i] and w[j]:
                    s = F.add(s, F.mul(self.matrix[i][j], F.mul(w[i], w[j])))
        return s

    def values_array(self, budget=DEFAULT_BUDGET):
        """phi(w) for all w in F_q^n in lexicographic order (numpy)."""
        F, n = self.F, self.n
        if F.q ** n > budget:
            raise BudgetExceeded(F.q ** n, budget, "quadratic space enumeration")
        W = _all_vectors(F.q, n)
        out = np.zeros(len(W), dtype=np.int64)
        mul, add = F.mul_table, F.add_table
        for i in range(n):
            for j in range(n):
                c = self.matrix[i][j]
                if c:
                    out = add[out, mul[c, mul[W[:, i], W[:, j]]]]
        return out


def _all_vectors(q, n):
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((q,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def orthogonal_sum(U, V):
    n, m = U.n, V.n
    M = [[0] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            M[i][j] = U.matrix[i][j]
    for i in range(m):
        for j in range(m):
            M[n + i][n + j] = V.matrix[i][j]
    return FqQuadSpace(U.F, M)


@functools.lru_cache(maxsize=64)
def basic_gauss_sum(F):
    """G = sum_{x in F_q} zeta_p^Tr(x^2)."""
    counts = [0] * F.p
    for x in range(F.q):
        counts[F.trace(F.mul(x, x))] += 1
    return CycValue.from_counts(F.p, counts)


@functools.lru_cache(maxsize=256)
def _G_power(F, r):
    return basic_gauss_sum(F) ** r


def gauss_sum(W: FqQuadSpace, method="direct", budget=DEFAULT_BUDGET) -> CycValue:
    """Gamma(W, phi), by direct summation or from (n, r, psi(det phi_0))."""
    F = W.F
    if method == "closed":
        return gauss_sum_closed_form(F, W.n, W.rank, W.det_class())
    vals = W.values_array(budget)
    counts = np.bincount(F.trace_table[vals], minlength=F.p)
    return CycValue.from_counts(F.p, counts.tolist())


def gauss_sum_closed_form(F, n, r, det_class):
    return _G_power(F, r) * (det_class * F.q ** (n - r))


# -- systems of forms ----------------------------------------------------------

class QFSystem:
    """A tuple of quadratic forms (phi_1, ..., phi_m) on a common F_q^n."""

    def __init__(self, F, forms):
        self.F = F
        self.forms = [f if isinstance(f, FqQuadSpace) else FqQuadSpace(F, f) for f in forms]
        if len({f.n for f in self.forms}) > 1:
            raise ValueError("forms of a system must share the dimension")

    @property
    def n(self):
        return self.forms[0].n if self.forms else 0

    @property
    def m(self):
        return len(self.forms)

    def fiber_counts(self, budget=DEFAULT_BUDGET):
        """|Phi^{-1}(y)| for every y, as a dict keyed by the encoded tuple y."""
        F = self.F
        key = np.zeros(F.q ** self.n if F.q ** self.n <= budget else 0, dtype=np.int64)
        if F.q ** self.n > budget:
            raise BudgetExceeded(F.q ** self.n, budget, "fiber counting")
        for f in self.forms:
            key = key * F.q + f.values_array(budget)
        u, c = np.unique(key, return_counts=True)
        return dict(zip(u.tolist(), c.tolist()))

    def combination(self, x):
        F, n = self.F, self.n
        M = [[0] * n for _ in range(n)]
        for xi, f in zip(x, self.forms):
            if xi:
                for i in range(n):
                    for j in range(n):
                        M[i][j] = F.add(M[i][j], F.mul(xi, f.matrix[i][j]))
        return FqQuadSpace(F, M)

    def to_json(self):
        return [[list(r) for r in f.matrix] for f in self.forms]


def gray_code(q, m):
    """Reflected q-ary Gray code: yields (index, new_digit, old_digit) moves
    after the all-zero start; consecutive tuples differ in one place."""
    digits = [0] * m
    direction = [1] * m
    yield None
    for _ in range(q ** m - 1):
        i = 0
        while True:
            nd = digits[i] + direction[i]
            if 0 <= nd < q:
                old = digits[i]
                digits[i] = nd
                yield i, nd, old
                break
            direction[i] = -direction[i]
            i += 1


def carlitz_isospectral(P1: QFSystem, P2: QFSystem, budget=DEFAULT_BUDGET) -> bool:
    """All q^m Gauss sums Gamma(sum x_i phi_i) agree for the two systems."""
    F = P1.F
    if P1.n != P2.n or P1.m != P2.m:
        raise ValueError("systems must have equal n and m")
    if F.q ** P1.m > budget:
        raise BudgetExceeded(F.q ** P1.m, budget, "Carlitz combination loop")
    n = P1.n
    mats = [[np.array(f.matrix, dtype=np.int64) for f in P.forms] for P in (P1, P2)]
    cur = [np.zeros((n, n), dtype=np.int64) for _ in range(2)]
    add, mul = F.add_table, F.mul_table
    neg = F.neg_table
    x = [0] * P1.m
    for move in gray_code(F.q, P1.m):
        if move is not None:
            i, new, old = move
            # field digits follow integer order; delta = new - old in F_q
            d = add[new, neg[old]]
            for s in range(2):
                cur[s] = add[cur[s], mul[d, mats[s][i]]]
            x[i] = new
        g = []
        for s in range(2):
            W = FqQuadSpace(F, cur[s].tolist())
            g.append((W.rank, W.det_class()))
        if g[0] != g[1]:
            return False
    return True


def bruteforce_isospectral(P1: QFSystem, P2: QFSystem, budget=DEFAULT_BUDGET) -> bool:
    return P1.fiber_counts(budget) == P2.fiber_counts(budget)


# -- lemma verifiers ---------------------------------------------------------------

def verify_binary_transitivity(Q0, a) -> bool:
    """Aut(Q0) (constant matrices) acts transitively on {(x, y) in F_q^2 : Q0(x, y) = a}."""
    from .isometry import automorphism_group

    F = Q0.F
    sols = [(x, y) for x in range(F.q) for y in range(F.q)
            if (x or y) and Q0.value([x, y]) == a]
    if not sols:
        return True
    group = automorphism_group(Q0)
    x0 = sols[0]
    orbit = set()
    for U in group:
        img = tuple(F.add(F.mul(U[r][0], x0[0]), F.mul(U[r][1], x0[1])) for r in range(2))
        orbit.add(img)
    return orbit == set(sols)


def verify_squares_proportional(Fp: Poly, Gp: Poly) -> dict:
    """Pointwise square-class agreement of two quadratics vs. F = u^2 G."""
    F = Fp.F
    if Fp.deg != 2 or Gp.deg != 2:
        raise ValueError("both polynomials must have degree 2")
    condition = all(F.psi(Fp(x)) == F.psi(Gp(x)) for x in range(F.q))
    proportional = any(Fp == Gp.scale(F.mul(u, u)) for u in range(1, F.q))
    return {"condition": condition, "proportional": proportional,
            "holds": (not condition) or proportional}


def sweep_squares_proportional(F):
    """Check the implication on all ordered pairs of degree-2 polynomials."""
    polys = [Poly(F, (c0, c1, c2)) for c2 in range(1, F.q)
             for c1 in range(F.q) for c0 in range(F.q)]
    vals = {f: tuple(F.psi(f(x)) for x in range(F.q)) for f in polys}
    pairs = condition_pairs = 0
    counterexamples = []
    for f, g in itertools.product(polys, repeat=2):
        pairs += 1
        if vals[f] != vals[g]:
            continue
        condition_pairs += 1
        if not any(f == g.scale(F.mul(u, u)) for u in range(1, F.q)):
            counterexamples.append((f.to_ints(), g.to_ints()))
    return {"q": F.q, "pairs": pairs, "condition_pairs": condition_pairs,
            "counterexamples": counterexamples}
