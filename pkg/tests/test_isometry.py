import random

import numpy as np
import pytest

from ffqlat.algebra import GF, Poly, PolyMatrix
from ffqlat.isometry import automorphism_group, canonical_form, exhaustive_isometric, isometric
from ffqlat.localdata import same_genus
from ffqlat.qform import random_gl_fq, random_unimodular, reduce
from ffqlat.spectrum import isospectral_up_to

from conftest import diag, lattice, reduced_forms, sample_forms


def planted(L, rng, deg=1):
    F = L.F
    U = random_unimodular(F, L.n, deg, rng) * random_gl_fq(F, L.n, rng)
    return L.transform(U)


def test_examples(F3):
    w = isometric(diag(F3, "1", "1", "t"), diag(F3, "1", "1", "t"))
    assert w is not None and w.verify()
    a, b = lattice(F3, [["1", "0"], ["0", "t"]]), lattice(F3, [["t", "0"], ["0", "1"]])
    w = isometric(a, b)
    assert w is not None and w.full.T * a.gram * w.full == b.gram
    assert isometric(diag(F3, "1", "1", "t"), diag(F3, "1", "1", "2t")) is None
    assert isometric(diag(F3, "1", "1", "t"), diag(F3, "1", "t")) is None


@pytest.mark.parametrize("q", [3, 5])
def test_planted_pairs_are_found_with_verified_witnesses(q):
    F = GF(q)
    rng = random.Random(q)
    for L in sample_forms(F, 25, 40 + q, max_mu=2 if q == 3 else 1):
        M = planted(L, rng)
        w = isometric(L, M)
        assert w is not None and w.verify()
        assert w.full.T * L.gram * w.full == M.gram
        assert w.full.is_unimodular()
        assert same_genus(L, M) and isospectral_up_to(L, M, max(L.minima) + 2)


def test_agrees_with_exhaustive_scan_on_binary_forms(F3):
    forms = reduced_forms(F3, n=2, max_mu=3)
    rng = random.Random(0)
    found = {True: 0, False: 0}
    for _ in range(200):
        a, b = rng.choice(forms), rng.choice(forms)
        if rng.random() < 0.3:
            b = reduce(planted(a, rng))[0]
        res = isometric(a, b) is not None
        assert res == exhaustive_isometric(a, b)
        found[res] += 1
    assert found[True] and found[False]


def test_canonical_form_is_a_class_invariant(F3):
    rng = random.Random(5)
    forms = sample_forms(F3, 40, 8)
    canon = [canonical_form(L) for L in forms]
    for L, C in zip(forms, canon):
        assert canonical_form(planted(L, rng)).gram == C.gram
        assert isometric(L, C) is not None
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            same = canon[i].gram == canon[j].gram
            assert same == (isometric(forms[i], forms[j]) is not None)


def _as_np(U):
    return np.array(U, dtype=np.int64)


def _check_group(L, elems):
    F = L.F
    p = F.p
    S = L if L.reduced else reduce(L)[0]
    G = {tuple(map(tuple, e)) for e in elems}
    assert len(G) == len(elems)
    assert tuple(tuple(int(i == j) for j in range(L.n)) for i in range(L.n)) in G
    for e in elems:
        C = PolyMatrix(F, [[Poly.const(F, a) for a in r] for r in e])
        assert C.T * S.gram * C == S.gram
    for a in elems:
        for b in elems:
            assert tuple(map(tuple, (_as_np(a) @ _as_np(b)) % p)) in G
    return len(G)


def test_automorphism_examples(F3):
    order = _check_group(diag(F3, "1", "1", "t"), automorphism_group(diag(F3, "1", "1", "t")))
    assert order % 8 == 0
    signs = {tuple(tuple(s[i] if i == j else 0 for j in range(3)) for i in range(3))
             for s in [(a, b, c) for a in (1, 2) for b in (1, 2) for c in (1, 2)]}
    assert signs <= {tuple(map(tuple, e)) for e in automorphism_group(diag(F3, "1", "1", "t"))}
    # t (x^2 + y^2): the norm form of F_9, order 2(q + 1)
    assert _check_group(diag(F3, "t", "t"), automorphism_group(diag(F3, "t", "t"))) == 8
    generic = lattice(F3, [["1", "0"], ["0", "t^3+t+1"]])
    assert 4 % len(automorphism_group(generic)) == 0


def test_group_axioms_on_enumerated_forms(F3):
    gl3 = (27 - 1) * (27 - 3) * (27 - 9)
    for L in sample_forms(F3, 15, 9):
        assert gl3 % _check_group(L, automorphism_group(L)) == 0


def test_rejects_determinant_mismatch(F3):
    rng = random.Random(6)
    forms = reduced_forms(F3)
    n = 0
    while n < 50:
        a, b = rng.choice(forms), rng.choice(forms)
        if a.det.monic() == b.det.monic() and a.det.lc == b.det.lc:
            continue
        assert isometric(a, planted(b, rng)) is None
        n += 1
