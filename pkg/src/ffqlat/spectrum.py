"""Representation numbers R(L, a) and the filtration L_m = {v : deg Q(v) <= m}.

For a reduced definite lattice, deg Q(sum x_i v_i) = max_i (2 deg x_i + mu_i),
so L_m is spanned over F_q by t^d v_i with 2d + mu_i <= m.  Enumeration runs
over those coefficient vectors with numpy: a value Q(x) with coefficients
(c_0, ..., c_m) is encoded as the integer key sum_k c_k q^k (digits base p
for extension fields), and counts are collected with ``np.unique``.
"""

from __future__ import annotations

import functools
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .algebra import Poly
from .errors import BudgetExceeded, InsufficientBound, NotDefinite
from .qform import GramLattice, reduce

DEFAULT_BUDGET = 50_000_000
_CHUNK = 1 << 15


# -- closed forms ------------------------------------------------------------

def closed_form_dims(minima, m):
    """dim L_k for k = 0..m from the series sum_i u^mu_i / ((1 - u^2)(1 - u))."""
    if m < 0:
        return []
    s = [0] * (m + 1)
    for mu in minima:
        if mu <= m:
            s[mu] += 1
    for k in range(2, m + 1):  # divide by (1 - u^2)
        s[k] += s[k - 2]
    for k in range(1, m + 1):  # divide by (1 - u)
        s[k] += s[k - 1]
    return s


def minima_from_dims(dims, n=None):
    """Invert closed_form_dims.  With s_k = dims[k] - dims[k-1], the number
    of minima equal to k is s_k - s_{k-2}."""
    s = [d - (dims[k - 1] if k else 0) for k, d in enumerate(dims)]
    out = []
    for k in range(len(dims)):
        c = s[k] - (s[k - 2] if k >= 2 else 0)
        if c < 0:
            raise InsufficientBound(f"dims {dims} are not of the expected shape")
        out.extend([k] * c)
    if n is not None and len(out) != n:
        raise InsufficientBound(f"bound {len(dims) - 1} recovers only {len(out)} of {n} minima")
    if closed_form_dims(out, len(dims) - 1) != list(dims):
        raise InsufficientBound("dims do not match any minima sequence")
    return tuple(out)


# -- the spectrum value --------------------------------------------------------

@dataclass
class Spectrum:
    """Representation numbers of all a with deg a <= bound.

    ``keys`` is the sorted array of encoded values, ``values`` the matching
    counts (R(L, a) > 0 only).  ``rank`` is the rank of the lattice.
    """

    F: object
    bound: int
    keys: np.ndarray
    values: np.ndarray
    rank: int
    _dict: dict = field(default=None, repr=False, compare=False)

    def _decode(self, key):
        F = self.F
        digits = []
        key = int(key)
        while key:
            key, d = divmod(key, F.q)
            digits.append(d)
        return Poly(F, digits)

    def _encode(self, a):
        return sum(c * self.F.q ** k for k, c in enumerate(a.c))

    @property
    def counts(self):
        """dict Poly -> R(L, a)."""
        if self._dict is None:
            self._dict = {self._decode(k): int(v) for k, v in zip(self.keys, self.values)}
        return self._dict

    def count(self, a):
        if a.deg > self.bound:
            raise InsufficientBound(f"deg {a.deg} exceeds spectrum bound {self.bound}")
        key = self._encode(a)
        i = np.searchsorted(self.keys, key)
        if i < len(self.keys) and self.keys[i] == key:
            return int(self.values[i])
        return 0

    @property
    def dims(self):
        """dim_{F_q} L_k for k = 0..bound."""
        q = self.F.q
        cum = np.cumsum(self.values)
        out = []
        for k in range(self.bound + 1):
            idx = np.searchsorted(self.keys, q ** (k + 1))
            total = int(cum[idx - 1]) if idx else 0
            d = 0
            while q ** d < total:
                d += 1
            if q ** d != total:
                raise ValueError(f"|L_{k}| = {total} is not a power of q")
            out.append(d)
        return out

    def restrict(self, m):
        if m > self.bound:
            raise InsufficientBound(f"cannot extend bound {self.bound} to {m}")
        idx = np.searchsorted(self.keys, self.F.q ** (m + 1))
        return Spectrum(self.F, m, self.keys[:idx], self.values[:idx], self.rank)

    def same_counts(self, other):
        return (self.F is other.F and self.bound == other.bound
                and np.array_equal(self.keys, other.keys)
                and np.array_equal(self.values, other.values))

    def fingerprint(self):
        return (self.bound, self.keys.tobytes(), self.values.tobytes())

    def to_json(self, gram_hash=None):
        counts = [[self._decode(k).to_ints(), int(v)] for k, v in zip(self.keys, self.values)]
        return {"gram_hash": gram_hash, "field": self.F.to_json(), "rank": self.rank,
                "bound": self.bound, "counts": counts}

    @classmethod
    def from_json(cls, d, F):
        keys, vals = [], []
        for ints, c in d["counts"]:
            a = Poly.from_ints(F, ints)
            keys.append(sum(x * F.q ** k for k, x in enumerate(a.c)))
            vals.append(c)
        order = np.argsort(np.array(keys, dtype=np.int64), kind="stable")
        return cls(F, int(d["bound"]), np.array(keys, dtype=np.int64)[order],
                   np.array(vals, dtype=np.int64)[order], int(d["rank"]))


# -- enumeration -------------------------------------------------------------------

class _Plan:
    """Coefficient layout for (field, minima, bound), shared across forms."""

    def __init__(self, F, minima, m):
        self.F, self.minima, self.m = F, minima, m
        self.pos = [(i, d) for i, mu in enumerate(minima) if mu <= m
                    for d in range((m - mu) // 2 + 1)]
        K = self.K = len(self.pos)
        self.pairs = [(a, b) for a in range(K) for b in range(a, K)]
        self.A = np.array([a for a, _ in self.pairs], dtype=np.intp)
        self.B = np.array([b for _, b in self.pairs], dtype=np.intp)
        e, p = F.e, F.p
        self.pw = np.array([p ** (e * k + j) for k in range(m + 1) for j in range(e)], dtype=np.int64)

    def size(self):
        return self.F.q ** self.K

    def blocks(self):
        """Yield (T, K) arrays covering one vector of every pair {x, -x}, x != 0."""
        F, K, q = self.F, self.K, self.F.q
        half = np.array(F.half_units, dtype=np.int64)
        for lead in range(K):
            rest = K - lead - 1
            total = len(half) * q ** rest
            for start in range(0, total, _CHUNK):
                r = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
                X = np.zeros((len(r), K), dtype=np.int64)
                X[:, lead] = half[r // q ** rest]
                rr = r % q ** rest
                for j in range(rest):
                    X[:, K - 1 - j] = rr % q
                    rr //= q
                yield X

    def coefficient_matrix(self, gram):
        """(npairs * e, (m+1) * e) F_p-matrix sending pair products to Q digits."""
        F, m = self.F, self.m
        e = F.e
        two = F.from_int(2)
        C = np.zeros((len(self.pairs), m + 1), dtype=np.int64)
        for s, (a, b) in enumerate(self.pairs):
            (i, d), (j, d2) = self.pos[a], self.pos[b]
            entry = gram[min(i, j), max(i, j)]
            factor = 1 if a == b else two
            for k, c in enumerate(entry.c):
                if c:
                    C[s, k + d + d2] = F.mul(c, factor)
        if e == 1:
            return C
        mm = F.mul_matrices
        big = np.zeros((len(self.pairs), e, m + 1, e), dtype=np.int64)
        for k in range(m + 1):
            big[:, :, k, :] = mm[C[:, k]]
        return big.reshape(len(self.pairs) * e, (m + 1) * e)


@functools.lru_cache(maxsize=256)
def _plan(F, minima, m):
    return _Plan(F, minima, m)


def _require_reduced(L):
    if L.reduced:
        return L
    return reduce(L)[0]


def enumerate_spectrum(L: GramLattice, m: int, budget: int = DEFAULT_BUDGET) -> Spectrum:
    """Exact R(L, a) for every a with deg a <= m."""
    L = _require_reduced(L)
    F = L.F
    plan = _plan(F, L.minima, m)
    if plan.size() > budget:
        raise BudgetExceeded(plan.size(), budget, "spectrum enumeration")
    if plan.K == 0:
        return Spectrum(F, m, np.array([0], dtype=np.int64), np.array([1], dtype=np.int64), L.n)
    Cm = plan.coefficient_matrix(L.gram).astype(np.float64)
    p, e = F.p, F.e
    keys_acc, cnt_acc = [], []
    for X in plan.blocks():
        if e == 1:
            P = (X[:, plan.A] * X[:, plan.B]).astype(np.float64)
        else:
            P = F.digit_table[F.mul_table[X[:, plan.A], X[:, plan.B]]]
            P = P.reshape(len(X), -1).astype(np.float64)
        V = np.rint(P @ Cm).astype(np.int64) % p
        keys = V @ plan.pw
        u, c = np.unique(keys, return_counts=True)
        keys_acc.append(u)
        cnt_acc.append(c)
    keys = np.concatenate(keys_acc)
    cnts = np.concatenate(cnt_acc)
    order = np.argsort(keys, kind="stable")
    keys, cnts = keys[order], cnts[order]
    u, start = np.unique(keys, return_index=True)
    c = np.add.reduceat(cnts, start) * 2
    if len(u) and u[0] == 0:
        raise NotDefinite("a nonzero vector has Q = 0")
    keys = np.concatenate([[0], u]).astype(np.int64)
    vals = np.concatenate([[1], c]).astype(np.int64)
    return Spectrum(F, m, keys, vals, L.n)


def dim_series(L, m, budget=DEFAULT_BUDGET):
    return enumerate_spectrum(L, m, budget).dims


def minima_from_spectrum(S: Spectrum):
    return minima_from_dims(S.dims, S.rank)


def isospectral_up_to(L, L2, m, budget=DEFAULT_BUDGET):
    return enumerate_spectrum(L, m, budget).same_counts(enumerate_spectrum(L2, m, budget))


# -- disk cache -----------------------------------------------------------------------

class SpectrumCache:
    """Spectra on disk, one JSON file per (Gram hash, bound); writes are atomic."""

    def __init__(self, root):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, h, m):
        return os.path.join(self.root, f"{h}-{m}.json")

    def get(self, L, m, budget=DEFAULT_BUDGET):
        L = _require_reduced(L)
        h = L.content_hash()
        path = self._path(h, m)
        if os.path.exists(path):
            with open(path) as fh:
                return Spectrum.from_json(json.load(fh), L.F)
        S = enumerate_spectrum(L, m, budget)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(S.to_json(h), fh)
        os.replace(tmp, path)
        return S
