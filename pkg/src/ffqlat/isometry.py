"""Isometry testing and automorphism groups of definite lattices.

Any two reduced bases of a definite lattice differ by a matrix with entries
in F_q, so deciding isometry of reduced Grams S, S' is a finite search for
C in GL_n(F_q) with C^T S C = S'.  Columns of C are chosen one at a time
among the constant vectors w with Q(w) = m'_ii, pruned by the partial Gram.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .algebra import Poly, PolyMatrix
from .qform import GramLattice, determinant_class, reduce


class _ConstSpace:
    """All constant coordinate vectors of a reduced lattice and their Q / B values."""

    def __init__(self, L: GramLattice):
        F = L.F
        self.L = L
        self.F = F
        n = L.n
        q = F.q
        self.W = np.indices((q,) * n).reshape(n, -1).T.astype(np.int64)
        self.deg = max(int(L.gram[i, i].deg) for i in range(n))
        K = self.deg + 1
        self.S = np.zeros((n, n, K), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                for k, c in enumerate(L.gram[i, j].c):
                    self.S[i, j, k] = c
        self.pw = np.array([q ** k for k in range(K)], dtype=np.int64)
        mul, add = F.mul_table, F.add_table
        vals = np.zeros((len(self.W), K), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                prod = mul[self.W[:, a], self.W[:, b]]
                for k in range(K):
                    c = self.S[a, b, k]
                    if c:
                        vals[:, k] = add[vals[:, k], mul[prod, c]]
        self.qkeys = vals @ self.pw

    def key(self, f: Poly):
        if f.deg > self.deg:
            return -1
        return sum(c * self.F.q ** k for k, c in enumerate(f.c))

    def bkeys(self, u, idx):
        """Keys of B(W[u], W[i]) / 2 = W[u]^T S W[i] for i in idx."""
        F = self.F
        mul, add = F.mul_table, F.add_table
        n = self.L.n
        wu = self.W[u]
        c = np.zeros((n, self.S.shape[2]), dtype=np.int64)
        for a in range(n):
            if wu[a]:
                c = add[c, mul[wu[a], self.S[a]]]
        Wc = self.W[idx]
        vals = np.zeros((len(idx), self.S.shape[2]), dtype=np.int64)
        for b in range(n):
            for k in range(self.S.shape[2]):
                if c[b, k]:
                    vals[:, k] = add[vals[:, k], mul[Wc[:, b], c[b, k]]]
        return vals @ self.pw

    def decode(self, key):
        digits = []
        key = int(key)
        while key:
            key, d = divmod(key, self.F.q)
            digits.append(d)
        return Poly(self.F, digits)


@functools.lru_cache(maxsize=4096)
def _space(L):
    return _ConstSpace(L)


@dataclass(frozen=True)
class IsometryWitness:
    """C (constant, n x n) with C^T S C = S' for the reduced Grams S, S'.

    ``full`` is a matrix over A taking the original Gram of the first
    lattice to the original Gram of the second.
    """

    U: tuple
    S: GramLattice
    S2: GramLattice
    full: PolyMatrix | None = None

    def matrix(self):
        F = self.S.F
        return PolyMatrix(F, [[Poly.const(F, a) for a in r] for r in self.U])

    def verify(self):
        C = self.matrix()
        return C.T * self.S.gram * C == self.S2.gram


def _reduced(L):
    if L.reduced:
        return L, PolyMatrix.identity(L.F, L.n)
    return reduce(L)


def _search(S: GramLattice, S2: GramLattice, find_all=False):
    sp = _space(S)
    n = S.n
    targets = [sp.key(S2.gram[i, i]) for i in range(n)]
    cands = [np.nonzero(sp.qkeys == k)[0] for k in targets]
    if any(len(c) == 0 for c in cands):
        return []
    bt = {(i, j): sp.key(S2.gram[i, j]) for i in range(n) for j in range(i + 1, n)}
    out = []
    chosen = []

    def rec(i):
        if i == n:
            out.append(tuple(chosen))
            return not find_all
        idx = cands[i]
        for j, u in enumerate(chosen):
            if len(idx) == 0:
                break
            idx = idx[sp.bkeys(u, idx) == bt[j, i]]
        for w in idx:
            chosen.append(int(w))
            if rec(i + 1):
                return True
            chosen.pop()
        return False

    rec(0)
    result = []
    for cols in out:
        C = tuple(tuple(int(sp.W[cols[j]][r]) for j in range(n)) for r in range(n))
        result.append(C)
    return result


def _rank(F, vecs):
    rows = [list(map(int, v)) for v in vecs]
    r = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = F.mul(rows[i][c], inv)
                rows[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def _inverse_unimodular(U):
    d = U.det()
    if not isinstance(d, Poly) or d.deg != 0:
        raise ValueError("matrix is not unimodular")
    k = U.F.inv(d.lc)
    return U.adjugate().map(lambda e: e.scale(k))


def isometric(L, L2, *, genus_check=False):
    """Return an IsometryWitness if L and L2 are isometric over A, else None."""
    if L.n != L2.n or L.F is not L2.F:
        return None
    S, U1 = _reduced(L)
    S2, U2 = _reduced(L2)
    if S.minima != S2.minima or determinant_class(S) != determinant_class(S2):
        return None
    if genus_check:
        from .localdata import same_genus

        if not same_genus(S, S2):
            return None
    found = _search(S, S2)
    if not found:
        return None
    w = IsometryWitness(found[0], S, S2)
    full = U1 * w.matrix() * _inverse_unimodular(U2)
    assert w.verify(), "isometry witness failed verification"
    assert full.T * L.gram * full == L2.gram, "lifted witness failed verification"
    return IsometryWitness(w.U, S, S2, full)


def automorphism_group(L):
    """All C in GL_n(F_q) with C^T S C = S, S the reduced Gram of L (as int tuples)."""
    S, _ = _reduced(L)
    return _search(S, S, find_all=True)


def canonical_form(L) -> GramLattice:
    """Least reduced Gram in the class (entries compared column by column in
    the order m_00, m_01, m_11, m_02, ...; polynomials by sort_key)."""
    S, _ = _reduced(L)
    sp = _space(S)
    n = S.n
    mu = S.minima
    F = S.F
    # integer order of keys is Poly.sort_key order (degree, then top coefficients)
    qk = sp.qkeys
    cands = []
    for i in range(n):
        lo, hi = F.q ** mu[i], F.q ** (mu[i] + 1)
        cands.append(np.nonzero((qk >= lo) & (qk < hi))[0])
    states = [()]
    for i in range(n):
        best = None
        nxt = []
        for st in states:
            idx = cands[i]
            cols = []
            for j, u in enumerate(st):
                bk = sp.bkeys(u, idx)
                # reduced: deg m_ji < mu_j
                ok = bk < F.q ** mu[j]
                idx, bk = idx[ok], bk[ok]
                cols = [c[ok] for c in cols] + [bk]
            diag = qk[idx]
            if len(idx) == 0:
                continue
            # column entries (m_0i, ..., m_{i-1,i}, m_ii) compared lexicographically
            keys = np.stack(cols + [diag], axis=1)
            order = np.lexsort(keys.T[::-1])
            first = tuple(keys[order[0]].tolist())
            if best is not None and first > best:
                continue
            if best is None or first < best:
                best = first
                nxt = []
            for r in order:
                if tuple(keys[r].tolist()) != best:
                    break
                cand = st + (int(idx[r]),)
                if _rank(F, [sp.W[c] for c in cand]) == len(cand):
                    nxt.append(cand)
        states = nxt
    cols = states[0]
    C = PolyMatrix(F, [[Poly.const(F, int(sp.W[cols[j]][r])) for j in range(n)] for r in range(n)])
    return GramLattice(F, C.T * S.gram * C, reduced=True)


def exhaustive_isometric(L, L2):
    """Oracle: scan all of GL_n(F_q) for C with C^T S C = S' (small q, n only)."""
    import itertools

    S, _ = _reduced(L)
    S2, _ = _reduced(L2)
    F = S.F
    n = S.n
    for entries in itertools.product(range(F.q), repeat=n * n):
        C = PolyMatrix(F, [[Poly.const(F, entries[r * n + c]) for c in range(n)] for r in range(n)])
        if not C.det():
            continue
        if C.T * S.gram * C == S2.gram:
            return True
    return False
