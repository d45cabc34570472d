"""Exhaustive sweeps over reduced definite forms.

Forms with a fixed minima pattern are enumerated as rows of Gram
coefficients (numpy), normalized so that every diagonal leading coefficient
lies in {1, delta} and the off-diagonal coefficients are least among their
images under sign changes of the basis.  Rows are bucketed by determinant
and by a hash of the spectrum at a low bound.  Colliding rows are reduced to
isometry classes and escalated with exact spectra up to a cap.

For strictly increasing minima the only isometries between reduced Grams
are sign changes, so normalized rows are pairwise non-isometric and the
sweep is stratified by the leading (n-1)-block.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import random
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import GF, Poly, PolyMatrix
from .errors import BudgetExceeded, CheckpointCorrupt
from .isometry import canonical_form, isometric
from .localdata import genus_hash
from .qform import GramLattice, adjoint, reduce
from .spectrum import _plan, enumerate_spectrum

log = logging.getLogger(__name__)

_CHUNK = 1 << 16
_FP_CELLS = 1 << 22


# -- patterns ---------------------------------------------------------------------

def minima_patterns(n, max_mu):
    """Sorted minima sequences of definite rank-n forms with entries <= max_mu.

    At most two minima may share a parity (a form in three variables over
    F_q is isotropic)."""
    for mu in itertools.combinations_with_replacement(range(max_mu + 1), n):
        even = sum(1 for m in mu if m % 2 == 0)
        if even <= 2 and n - even <= 2:
            yield mu


def case_label(mu, q):
    """(label, in_scope, bound) for a ternary minima pattern.

    A strictly increasing pattern with mu_2 = mu_3 mod 2 is sent to case1 by
    passing to the adjoint, whose minima mu_1+mu_2 < mu_1+mu_3 < mu_2+mu_3
    then have equal first two parities."""
    m1, m2, m3 = mu
    if m1 == m2 or m2 == m3:
        return "case2", True, None
    if (m1 - m2) % 2 == 0 or (m2 - m3) % 2 == 0:
        return "case1", True, None
    bound = max(2 + m3 - m2, 2 + m2 - m1)
    return "case3", q > bound, bound


# -- coefficient layout -----------------------------------------------------------

class FormLayout:
    """Coefficient rows of reduced Grams with minima ``mu``.

    Entries are ordered column by column: m_00, m_01, m_11, m_02, ...  A
    diagonal entry m_ii has mu_i + 1 coefficients with leading coefficient
    in {1, delta}; m_ij (i < j) has mu_i coefficients.  Rows are indexed by a
    mixed radix whose most significant digits belong to the leading block.
    """

    def __init__(self, F, mu):
        self.F = F
        self.mu = tuple(mu)
        n = self.n = len(mu)
        self.slots = [(i, j) for j in range(n) for i in range(j + 1)]
        self.cols = {}
        c = 0
        for i, j in self.slots:
            k = mu[i] + 1 if i == j else mu[i]
            self.cols[i, j] = list(range(c, c + k))
            c += k
        self.T = c
        self.lc_cols = [self.cols[i, i][-1] for i in range(n)]
        self.off_cols = [c for (i, j) in self.slots if i < j for c in self.cols[i, j]]
        # mixed radix, most significant first: block columns then the last column
        self.digit_cols = [c for (i, j) in self.slots for c in self.cols[i, j]]
        self.radix = [2 if c in self.lc_cols else F.q for c in self.digit_cols]
        self.block_digits = sum(len(self.cols[i, j]) for (i, j) in self.slots if j < n - 1)
        # column order puts the leading block first, so its columns are a prefix
        self.block_cols = self.block_digits
        self.lc_values = np.array([1, F.delta], dtype=np.int64)

    @property
    def total(self):
        return int(np.prod(self.radix, dtype=object))

    @property
    def per_block(self):
        return int(np.prod(self.radix[self.block_digits:], dtype=object))

    def strictly_increasing(self):
        return all(a < b for a, b in zip(self.mu, self.mu[1:]))

    def decode(self, idx):
        """Coefficient rows (len(idx), T) for mixed-radix indices."""
        idx = np.asarray(idx, dtype=np.int64)
        out = np.zeros((len(idx), self.T), dtype=np.int64)
        r = idx.copy()
        for c, rad in zip(reversed(self.digit_cols), reversed(self.radix)):
            d = r % rad
            r //= rad
            out[:, c] = self.lc_values[d] if c in self.lc_cols else d
        return out

    def gram(self, row):
        F = self.F
        n = self.n
        rows = [[None] * n for _ in range(n)]
        for (i, j), cs in self.cols.items():
            p = Poly(F, [int(row[c]) for c in cs])
            rows[i][j] = rows[j][i] = p
        return GramLattice(F, PolyMatrix(F, rows), reduced=True, check=False)

    def row(self, L):
        out = np.zeros(self.T, dtype=np.int64)
        for (i, j), cs in self.cols.items():
            e = L.gram[i, j]
            for k, c in enumerate(cs):
                out[c] = e.c[k] if k < len(e.c) else 0
        return out

    def entry(self, rows, i, j):
        i, j = min(i, j), max(i, j)
        return rows[:, self.cols[i, j]]


# -- vectorized filters and invariants ------------------------------------------

def definite_mask(layout, rows):
    """Reduced rows are definite iff in each parity class of the minima the
    F_q-form of the leading coefficients is anisotropic."""
    F = layout.F
    psi = np.array([F.psi(a) for a in range(F.q)], dtype=np.int64)
    ok = np.ones(len(rows), dtype=bool)
    for par in (0, 1):
        idx = [i for i, m in enumerate(layout.mu) if m % 2 == par]
        if len(idx) >= 3:
            ok[:] = False
        elif len(idx) == 2:
            a = rows[:, layout.lc_cols[idx[0]]]
            b = rows[:, layout.lc_cols[idx[1]]]
            ok &= psi[F.neg_table[F.mul_table[a, b]]] == -1
    return ok


def _lex_le(A, B):
    """Row-wise A <= B lexicographically."""
    d = B - A
    nz = d != 0
    first = nz.argmax(axis=1)
    val = d[np.arange(len(d)), first]
    return ~nz.any(axis=1) | (val > 0)


def _sign_images(layout, cols):
    """For each sign vector (s_0 = +1), a mask over ``cols`` of negated positions."""
    n = layout.n
    where = {}
    for (i, j), cs in layout.cols.items():
        if i < j:
            for c in cs:
                where[c] = (i, j)
    out = []
    for signs in itertools.product((1, -1), repeat=n - 1):
        s = (1,) + signs
        flip = np.array([s[where[c][0]] * s[where[c][1]] == -1 for c in cols], dtype=bool)
        if flip.any():
            out.append(flip)
    return out


def sign_canonical_mask(layout, rows, cols=None):
    """Rows whose off-diagonal coefficients (in layout order) are least among
    their images under diagonal sign changes."""
    cols = layout.off_cols if cols is None else cols
    ok = np.ones(len(rows), dtype=bool)
    if not cols:
        return ok
    O = rows[:, cols]
    neg = layout.F.neg_table
    for flip in _sign_images(layout, cols):
        img = np.where(flip, neg[O], O)
        ok &= _lex_le(O, img)
    return ok


def _bmul(F, A, B):
    """Batch polynomial product of coefficient arrays (N, da) x (N, db)."""
    N = len(A)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((N, 0), dtype=np.int64)
    out = np.zeros((N, A.shape[1] + B.shape[1] - 1), dtype=np.int64)
    mul, add = F.mul_table, F.add_table
    for i in range(A.shape[1]):
        for j in range(B.shape[1]):
            out[:, i + j] = add[out[:, i + j], mul[A[:, i], B[:, j]]]
    return out


def _badd(F, A, B, negate=False):
    k = max(A.shape[1], B.shape[1])
    a = np.zeros((len(A), k), dtype=np.int64)
    b = np.zeros((len(A), k), dtype=np.int64)
    a[:, :A.shape[1]] = A
    b[:, :B.shape[1]] = F.neg_table[B] if negate else B
    return F.add_table[a, b]


def _perm_sign(p):
    s = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def det_rows(layout, rows):
    """Determinants as coefficient arrays (N, sum(mu) + 1)."""
    F, n = layout.F, layout.n
    D = sum(layout.mu) + 1
    acc = np.zeros((len(rows), D), dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        term = None
        for i in range(n):
            e = layout.entry(rows, i, perm[i])
            term = e if term is None else _bmul(F, term, e)
        if term.shape[1] == 0:
            continue
        term = term[:, :D] if term.shape[1] >= D else np.pad(term, ((0, 0), (0, D - term.shape[1])))
        acc = _badd(F, acc, term, negate=_perm_sign(perm) < 0)
    return acc


def det_class_keys(layout, rows):
    """Key of (monic determinant, square class of its leading coefficient).

    Isometric Grams have determinants differing by a square constant, so
    this is the audible determinant invariant."""
    F = layout.F
    D = det_rows(layout, rows)
    lc = D[:, -1]
    inv = np.array([F.inv(a) if a else 0 for a in range(F.q)], dtype=np.int64)
    monic = F.mul_table[inv[lc][:, None], D]
    psi = np.array([F.psi(a) for a in range(F.q)], dtype=np.int64)
    return encode_rows(F, monic) * 2 + (psi[lc] < 0)


def encode_rows(F, A):
    """Exact int64 key of coefficient rows when it fits, else a 64-bit hash."""
    k = A.shape[1]
    if k == 0:
        return np.zeros(len(A), dtype=np.int64)
    if F.q ** k < 2 ** 60:
        pw = np.array([F.q ** i for i in range(k)], dtype=np.int64)
        return A @ pw
    w = np.random.default_rng(12345).integers(1, 2 ** 63, size=k, dtype=np.uint64)
    return (A.astype(np.uint64) * w).sum(axis=1).view(np.int64)


class SpectrumHasher:
    """Order-free hash of the spectrum at bound b for many rows at once.

    Q-coefficients of every half-space vector of L_b are linear in the Gram
    coefficients, so they are one matrix product per batch (prime fields) or
    table lookups (extension fields).  The hash is the wrapped sum of fixed
    random 64-bit weights of the value keys.
    """

    def __init__(self, layout, b, seed=0):
        self.layout, self.b = layout, b
        F = layout.F
        plan = _plan(F, layout.mu, b)
        self.plan = plan
        self.empty = plan.K == 0
        if self.empty:
            return
        X = np.concatenate(list(plan.blocks()))
        self.N = len(X)
        mul = F.mul_table
        P = mul[X[:, plan.A], X[:, plan.B]]  # (N, npairs) field elements
        two = F.from_int(2)
        # contributions: (pair s, coefficient column c, target exponent k, factor)
        self.terms = []
        for s, (a, bb) in enumerate(plan.pairs):
            (i, d), (j, d2) = plan.pos[a], plan.pos[bb]
            cs = layout.cols[min(i, j), max(i, j)]
            f = 1 if a == bb else two
            for k0, c in enumerate(cs):
                k = k0 + d + d2
                if k <= b:
                    self.terms.append((s, c, k, f))
        self.P = P
        if F.e == 1:
            M = np.zeros((self.N, b + 1, layout.T), dtype=np.float64)
            for s, c, k, f in self.terms:
                M[:, k, c] += (P[:, s] * f) % F.p
            self.M = M.reshape(self.N * (b + 1), layout.T).T.copy()
        self.pw = np.array([F.q ** k for k in range(b + 1)], dtype=np.int64)
        nkeys = F.q ** (b + 1)
        rng = np.random.default_rng(seed)
        if nkeys <= _FP_CELLS:
            self.table = rng.integers(0, 2 ** 63, size=nkeys, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
            self.mult = None
        else:
            self.table = None
            self.mult = np.uint64(rng.integers(1, 2 ** 62) * 2 + 1)

    def __call__(self, rows):
        out = np.zeros(len(rows), dtype=np.uint64)
        if self.empty:
            return out
        F = self.layout.F
        step = max(1, _FP_CELLS // (self.N * (self.b + 1)))
        for s0 in range(0, len(rows), step):
            R = rows[s0:s0 + step]
            if F.e == 1:
                V = np.rint(R.astype(np.float64) @ self.M).astype(np.int64) % F.p
                V = V.reshape(len(R), self.N, self.b + 1)
            else:
                V = np.zeros((len(R), self.N, self.b + 1), dtype=np.int64)
                mul, add = F.mul_table, F.add_table
                for s, c, k, f in self.terms:
                    coef = mul[self.P[:, s], f]
                    V[:, :, k] = add[V[:, :, k], mul[coef[None, :], R[:, c][:, None]]]
            keys = V @ self.pw
            if self.table is not None:
                h = self.table[keys]
            else:
                h = keys.astype(np.uint64) * self.mult
                h ^= h >> np.uint64(29)
            out[s0:s0 + step] = h.sum(axis=1)
        return out


def _groups(keys):
    """Index arrays of rows sharing a key, for keys occurring at least twice."""
    if len(keys) == 0:
        return []
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    cut = np.flatnonzero(k[1:] != k[:-1]) + 1
    parts = np.split(order, cut)
    return [p for p in parts if len(p) > 1]


# -- configuration and records ------------------------------------------------------

@dataclass
class SearchConfig:
    q: int = 3
    rank: int = 3
    max_mu3: int = 2
    patterns: list | None = None
    initial_bound: int | None = None
    cap_extra: int = 2
    budget: int = 20_000_000
    max_forms: int = 50_000_000
    seed: int = 0
    checkpoint: str | None = None
    output: str | None = None
    jobs: int = 1
    field_modulus: list | None = None
    stratify: str = "auto"
    global_limit: int = 4_000_000
    adjoint_checks: int = 1_000_000

    def field(self):
        return GF.from_order(self.q, self.field_modulus)

    def pattern_list(self):
        if self.patterns:
            return [tuple(p) for p in self.patterns]
        return list(minima_patterns(self.rank, self.max_mu3))

    def validate(self):
        if self.rank not in (1, 2, 3, 4):
            raise ValueError("rank must be 1..4")
        if self.max_mu3 < 0 or self.cap_extra < 0 or self.budget <= 0 or self.max_forms <= 0:
            raise ValueError("bounds and budgets must be positive")
        for p in self.pattern_list():
            if len(p) != self.rank or list(p) != sorted(p):
                raise ValueError(f"pattern {p} must be a sorted {self.rank}-tuple")

    def key(self):
        d = asdict(self)
        for k in ("checkpoint", "output", "jobs"):
            d.pop(k)
        return json.dumps(d, sort_keys=True)


@dataclass
class PatternRecord:
    pattern: tuple
    case: str | None
    in_scope: bool
    q_condition: int | None
    forms_total: int
    forms_examined: int = 0
    strata_total: int = 1
    strata_examined: int = 0
    coverage: float = 0.0
    det_buckets: int = 0
    buckets_examined: int = 0
    classes_escalated: int = 0
    isospectral_pairs: int = 0
    non_isometric_isospectral: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    adjoint_checks: int = 0
    adjoint_failures: list = field(default_factory=list)
    separation_bounds: dict = field(default_factory=dict)

    def to_json(self):
        d = asdict(self)
        d["pattern"] = list(self.pattern)
        d["separation_bounds"] = {str(k): v for k, v in sorted(self.separation_bounds.items())}
        return d


# -- per-stratum work -------------------------------------------------------------------

def _escalate(classes, b0, cap, budget):
    """Split isometry-class representatives by exact spectra at bounds b0..cap.

    Returns (groups still together at the cap, [(group, bound)] left
    undecided by the budget, {bound: number of splits})."""
    groups, undecided, seps = [classes], [], {}
    for b in range(b0, cap + 1):
        nxt = []
        for g in groups:
            try:
                fps = [enumerate_spectrum(L, b, budget).fingerprint() for L in g]
            except BudgetExceeded:
                undecided.append((g, b))
                continue
            parts = {}
            for L, fp in zip(g, fps):
                parts.setdefault(fp, []).append(L)
            if len(parts) > 1:
                seps[b] = seps.get(b, 0) + len(parts) - 1
            nxt.extend(p for p in parts.values() if len(p) > 1)
        groups = nxt
        if not groups:
            break
    return groups, undecided, seps


def _adjoint_bound(mu):
    ad = sorted(sum(mu) - m for m in mu)
    return ad[-1] + 1


def _adjoints_agree(pair, bound, budget):
    a, b = (reduce(adjoint(L))[0] for L in pair)
    return enumerate_spectrum(a, bound, budget).same_counts(enumerate_spectrum(b, bound, budget))


def run_stratum(F, mu, start, stop, cfg_budget, b0, cap, seed, adjoint_checks, distinct_only):
    """Process rows with indices in [start, stop).  Returns a JSON-able dict."""
    layout = FormLayout(F, mu)
    rows_all = []
    for s in range(start, stop, _CHUNK):
        rows = layout.decode(np.arange(s, min(stop, s + _CHUNK), dtype=np.int64))
        rows = rows[definite_mask(layout, rows)]
        rows = rows[sign_canonical_mask(layout, rows)]
        rows_all.append(rows)
    rows = np.concatenate(rows_all) if rows_all else np.zeros((0, layout.T), dtype=np.int64)
    res = {"forms": int(len(rows)), "det_buckets": 0, "buckets": 0, "escalated": 0, "iso_pairs": 0,
           "violations": [], "undecided": [], "adjoint_checks": 0, "adjoint_failures": [],
           "seps": {}}
    if len(rows) < 2:
        return res
    dkeys = det_class_keys(layout, rows)
    dgroups = _groups(dkeys)
    res["det_buckets"] = len(dgroups)
    if not dgroups:
        return res
    sel = np.concatenate(dgroups)
    fps = SpectrumHasher(layout, b0, seed)(rows[sel]).view(np.int64)
    order = np.lexsort((fps, dkeys[sel]))
    both = np.stack([dkeys[sel][order], fps[order]], axis=1)
    cut = np.flatnonzero((both[1:] != both[:-1]).any(axis=1)) + 1
    for part in np.split(order, cut):
        if len(part) > 1:
            members = [layout.gram(rows[i]) for i in sel[part]]
            res["buckets"] += 1
            # isometry classes inside the bucket
            if distinct_only:
                classes = [[L] for L in members]
            else:
                by = {}
                for L in members:
                    by.setdefault(canonical_form(L).key(), []).append(L)
                classes = [v for _, v in sorted(by.items())]
            # isometric members are isospectral to every bound
            for c in classes:
                k = len(c)
                res["iso_pairs"] += k * (k - 1) // 2
                if k > 1 and res["adjoint_checks"] < adjoint_checks:
                    res["adjoint_checks"] += 1
                    if not _adjoints_agree(c[:2], _adjoint_bound(mu), cfg_budget):
                        res["adjoint_failures"].append([L.to_json() for L in c[:2]])
            if len(classes) < 2:
                continue
            reps = [c[0] for c in classes]
            res["escalated"] += len(reps)
            together, undecided, seps = _escalate(reps, b0, cap, cfg_budget)
            for b, v in seps.items():
                res["seps"][str(b)] = res["seps"].get(str(b), 0) + v
            for grp2, b in undecided:
                res["undecided"].append({"bound": b, "forms": [L.to_json() for L in grp2]})
            for grp2 in together:
                for L, L2 in itertools.combinations(grp2, 2):
                    res["iso_pairs"] += 1
                    iso = isometric(L, L2) is not None
                    if not iso:
                        res["violations"].append({"bound": cap, "forms": [L.to_json(), L2.to_json()],
                                                  "same_genus": genus_hash(L) == genus_hash(L2)})
                    if iso and res["adjoint_checks"] >= adjoint_checks:
                        continue
                    res["adjoint_checks"] += 1
                    if not _adjoints_agree((L, L2), _adjoint_bound(mu), cfg_budget):
                        res["adjoint_failures"].append([L.to_json(), L2.to_json()])
    return res


def _run_stratum_args(args):
    (p, e, mod), mu, start, stop, budget, b0, cap, seed, adj, distinct = args
    F = GF(p, e, mod)
    return run_stratum(F, mu, start, stop, budget, b0, cap, seed, adj, distinct)


# -- checkpoints ----------------------------------------------------------------------

class Checkpoint:
    """Append-only map of finished strata, rewritten atomically after each update."""

    def __init__(self, path, config_key):
        self.path = path
        self.data = {"config": config_key, "done": {}}
        if path and os.path.exists(path):
            try:
                with open(path) as fh:
                    d = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise CheckpointCorrupt(f"cannot read checkpoint {path}: {exc}") from exc
            if d.get("config") != config_key:
                raise CheckpointCorrupt("checkpoint was written for a different configuration")
            self.data = d

    def get(self, key):
        return self.data["done"].get(key)

    def put(self, key, value):
        self.data["done"][key] = value
        if not self.path:
            return
        d = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(self.data, fh, sort_keys=True)
        os.replace(tmp, self.path)


# -- enumeration API ---------------------------------------------------------------------

def enumerate_reduced_forms(F, n, max_mu, budget=50_000_000, patterns=None):
    """Definite reduced rank-n Grams with all minima <= max_mu, normalized
    (leading coefficients in {1, delta}, sign-least off-diagonal part)."""
    pats = list(patterns) if patterns else list(minima_patterns(n, max_mu))
    total = sum(FormLayout(F, mu).total for mu in pats)
    if total > budget:
        raise BudgetExceeded(total, budget, "form enumeration")
    for mu in pats:
        layout = FormLayout(F, mu)
        for s in range(0, layout.total, _CHUNK):
            rows = layout.decode(np.arange(s, min(layout.total, s + _CHUNK), dtype=np.int64))
            rows = rows[definite_mask(layout, rows)]
            rows = rows[sign_canonical_mask(layout, rows)]
            for r in rows:
                yield layout.gram(r)


def _valid_blocks(layout):
    """Block indices whose block rows are definite and sign-least."""
    nb = layout.total // layout.per_block
    idx = np.arange(nb, dtype=np.int64) * layout.per_block
    rows = layout.decode(idx)
    sub = FormLayout(layout.F, layout.mu[:-1])
    ok = definite_mask(sub, rows) & sign_canonical_mask(
        layout, rows, [c for c in layout.off_cols if c < layout.block_cols])
    return np.flatnonzero(ok)


# -- the sweeps -----------------------------------------------------------------------------

def _pattern_plan(cfg, F, mu):
    layout = FormLayout(F, mu)
    stratified = layout.n >= 3 and layout.strictly_increasing() and (
        cfg.stratify == "always" or (cfg.stratify == "auto" and layout.total > cfg.global_limit))
    if stratified:
        blocks = _valid_blocks(layout)
        C = layout.per_block
        strata = [(int(b) * C, (int(b) + 1) * C) for b in blocks]
    else:
        strata = [(0, layout.total)]
    total_rows = sum(b - a for a, b in strata)
    chosen = list(range(len(strata)))
    if total_rows > cfg.max_forms:
        if not stratified:
            raise BudgetExceeded(total_rows, cfg.max_forms, f"pattern {mu}")
        per = strata[0][1] - strata[0][0]
        k = max(1, cfg.max_forms // per)
        rng = random.Random(f"{cfg.seed}:{mu}")
        chosen = sorted(rng.sample(range(len(strata)), min(k, len(strata))))
    return layout, stratified, strata, chosen


def run_pattern(cfg, mu, ckpt=None, record=None):
    F = cfg.field()
    layout, stratified, strata, chosen = _pattern_plan(cfg, F, mu)
    b0 = cfg.initial_bound if cfg.initial_bound is not None else max(mu)
    cap = sum(mu) + cfg.cap_extra
    if record is None:
        label, scope, bound = case_label(mu, F.q) if len(mu) == 3 else (None, True, None)
        record = PatternRecord(tuple(mu), label, scope, bound, forms_total=0)
    record.strata_total = len(strata)
    fkey = (F.p, F.e, F.modulus)
    todo, results = [], {}
    for si in chosen:
        key = f"{','.join(map(str, mu))}|{si}"
        got = ckpt.get(key) if ckpt else None
        if got is not None:
            results[si] = got
        else:
            a, b = strata[si]
            todo.append((si, key, (fkey, tuple(mu), a, b, cfg.budget, b0, cap, cfg.seed,
                                   cfg.adjoint_checks, layout.strictly_increasing())))
    if cfg.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            outs = ex.map(_run_stratum_args, [t[2] for t in todo])
            for (si, key, _), out in zip(todo, outs):
                results[si] = out
                if ckpt:
                    ckpt.put(key, out)
    else:
        for si, key, args in todo:
            out = _run_stratum_args(args)
            results[si] = out
            if ckpt:
                ckpt.put(key, out)
    for si in sorted(results):
        r = results[si]
        record.forms_examined += r["forms"]
        record.det_buckets += r.get("det_buckets", 0)
        record.buckets_examined += r["buckets"]
        record.classes_escalated += r["escalated"]
        record.isospectral_pairs += r["iso_pairs"]
        record.non_isometric_isospectral.extend(r["violations"])
        record.undecided.extend(r["undecided"])
        record.adjoint_checks += r["adjoint_checks"]
        record.adjoint_failures.extend(r["adjoint_failures"])
        for b, v in r["seps"].items():
            record.separation_bounds[int(b)] = record.separation_bounds.get(int(b), 0) + v
    record.strata_examined = len(results)
    record.forms_total = sum(b - a for a, b in strata)
    record.coverage = (sum(strata[i][1] - strata[i][0] for i in results) / record.forms_total
                       if record.forms_total else 1.0)
    return record


@dataclass
class VerificationReport:
    q: int
    rank: int
    config: dict
    records: list
    # wall seconds per pattern; kept out of to_json so reports stay byte-identical
    timings: dict = field(default_factory=dict)

    @property
    def violations(self):
        """Non-isometric isospectral pairs inside theorem scope."""
        return [(r.pattern, v) for r in self.records if r.in_scope for v in r.non_isometric_isospectral]

    @property
    def findings(self):
        return [(r.pattern, v) for r in self.records for v in r.non_isometric_isospectral]

    def holds(self):
        return not self.violations and all(not r.adjoint_failures for r in self.records)

    def to_json(self):
        return {"q": self.q, "rank": self.rank, "config": self.config,
                "records": [r.to_json() for r in self.records], "holds": self.holds()}

    def findings_jsonl(self):
        lines = []
        for r in self.records:
            for v in r.non_isometric_isospectral:
                lines.append(json.dumps({"kind": "isospectral_non_isometric", "q": self.q,
                                         "pattern": list(r.pattern), "case": r.case,
                                         "in_scope": r.in_scope, **v}, sort_keys=True))
            for v in r.undecided:
                lines.append(json.dumps({"kind": "undecided_budget", "q": self.q,
                                         "pattern": list(r.pattern), **v}, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


def _sweep(cfg, patterns):
    cfg.validate()
    ckpt = Checkpoint(cfg.checkpoint, cfg.key()) if cfg.checkpoint else None
    records, timings = [], {}
    for mu in patterns:
        t0 = time.perf_counter()
        rec = run_pattern(cfg, mu, ckpt)
        timings[tuple(mu)] = time.perf_counter() - t0
        log.info("pattern %s: %d forms, %d buckets, %.1fs", mu, rec.forms_examined,
                 rec.buckets_examined, timings[tuple(mu)])
        records.append(rec)
    d = json.loads(cfg.key())
    return VerificationReport(cfg.q, cfg.rank, d, records, timings)


def verify_theorems(cfg: SearchConfig) -> VerificationReport:
    """Sweep ternary patterns and check that isospectral forms are isometric."""
    if cfg.rank != 3:
        raise ValueError("verify_theorems is for ternary forms; use search_isospectral")
    return _sweep(cfg, cfg.pattern_list())


def search_isospectral(cfg: SearchConfig) -> VerificationReport:
    """Look for non-isometric forms whose spectra agree up to the cap."""
    return _sweep(cfg, cfg.pattern_list())
