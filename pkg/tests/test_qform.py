import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffqlat.algebra import GF, Poly, PolyMatrix
from ffqlat.errors import NotDefinite, SingularForm
from ffqlat.isometry import isometric
from ffqlat.qform import (GramLattice, SquareClassAtInfinity, adjoint, determinant_class,
                          is_definite, is_reduced, random_gl_fq, random_unimodular, reduce,
                          reduced_is_definite, successive_minima)

from conftest import P, diag, lattice, sample_forms


def _brute_isotropic(L, max_deg):
    """Oracle: look for a nonzero vector with Q = 0 among coefficients of degree <= max_deg."""
    F = L.F
    polys = [Poly(F, list(c)) for c in itertools.product(range(F.q), repeat=max_deg + 1)]
    for x in itertools.product(polys, repeat=L.n):
        if any(x) and L.value(list(x)).is_zero():
            return True
    return False


# -- examples -------------------------------------------------------------------------------------

def test_reduce_examples(F3):
    L = diag(F3, "1", "1", "t")
    red, U = reduce(L)
    assert red.gram == L.gram and U == PolyMatrix.identity(F3, 3)
    M = lattice(F3, [["1", "t"], ["t", "t^2+t"]])
    red, U = reduce(M)
    assert red.gram == diag(F3, "1", "t").gram
    assert U == PolyMatrix(F3, [[P(F3, "1"), P(F3, "-t")], [Poly.zero(F3), P(F3, "1")]])
    assert U.T * M.gram * U == red.gram
    one = lattice(F3, [["t^3+t+2"]])
    assert reduce(one)[0].gram == one.gram


def test_successive_minima_examples(F3):
    assert successive_minima(diag(F3, "1", "1", "t")) == (0, 0, 1)
    assert successive_minima(diag(F3, "1", "t", "2t^2")) == (0, 1, 2)
    assert successive_minima(lattice(F3, [["1", "t"], ["t", "t^2+t"]])) == (0, 1)


def test_is_definite_examples(F3, F5):
    # over F_3 the least non-square is 2 = -1, so <1, 2> is hyperbolic
    assert F3.delta == 2
    assert not is_definite(diag(F3, "1", "2"))
    assert is_definite(diag(F3, "1", "1"))
    # over F_5, delta = 2 and -delta = 3 is a non-square
    assert is_definite(diag(F5, "1", "2"))
    assert not is_definite(diag(F5, "1", "-1"))
    assert is_definite(diag(F3, "1", "1", "t"))
    assert not _brute_isotropic(diag(F3, "1", "1", "t"), 1)
    assert not is_definite(diag(F3, "1", "2", "t"))
    assert _brute_isotropic(diag(F3, "1", "2", "t"), 0)
    assert not is_definite(diag(F3, "1", "1", "1"))
    with pytest.raises(SingularForm):
        is_definite(lattice(F3, [["1", "1"], ["1", "1"]]))


def test_rank_four_and_five(F3):
    # the quaternary anisotropic form: norm forms of F_9 on t^0 and t^1
    assert is_definite(diag(F3, "1", "1", "t", "t"))
    assert not is_definite(diag(F3, "1", "1", "t", "2t"))
    with pytest.raises(ValueError):
        GramLattice.diagonal(F3, [1, 1, 1, 1, 1])


def test_square_classes_at_infinity(F3):
    reps = {SquareClassAtInfinity.of(P(F3, s)) for s in ["1", "2", "t", "2t", "t^2+1", "2t^3+t"]}
    assert len(reps) == 4


def test_determinant_class_examples(F3):
    assert determinant_class(diag(F3, "1", "1", "t")) == (P(F3, "t"), "square")
    assert determinant_class(diag(F3, "1", "2", "t")) == (P(F3, "t"), "nonsquare")
    assert determinant_class(lattice(F3, [["1", "t"], ["t", "t^2+t"]])) == (P(F3, "t"), "square")


def test_adjoint_examples(F3):
    # diag(a, b, c) -> diag(ab, ac, bc)
    A = adjoint(diag(F3, "1", "t", "t^2+1"))
    assert A.gram == diag(F3, "t", "t^2+1", "t^3+t").gram
    B = adjoint(diag(F3, "1", "2", "t"))
    assert B.gram == diag(F3, "2", "t", "2t").gram
    red = reduce(adjoint(diag(F3, "1", "1", "t")))[0]
    assert red.minima == (0, 1, 1)


# -- properties over enumerated forms --------------------------------------------------------------

@pytest.mark.parametrize("q", [3, 5])
def test_reduction_round_trip_and_idempotence(q):
    F = GF(q)
    rng = random.Random(q)
    for S in sample_forms(F, 40, q, max_mu=2 if q == 3 else 1):
        U = random_unimodular(F, 3, 1, rng)
        L = S.transform(U)
        red, V = reduce(L)
        assert V.is_unimodular()
        assert V.T * L.gram * V == red.gram
        assert is_reduced(red.gram) and red.minima == S.minima
        assert reduce(red)[0].gram == red.gram
        # Gerstein: the two reduced Grams differ by a constant change of basis
        assert isometric(red, S) is not None


@pytest.mark.parametrize("q", [3, 5])
def test_definiteness_filter_agrees_with_symbols(q):
    """Two independent tests: leading-coefficient anisotropy vs Hilbert symbols at infinity."""
    F = GF(q)
    rng = random.Random(100 + q)
    for _ in range(300):
        n = rng.randint(1, 4)
        mu = sorted(rng.randint(0, 3) for _ in range(n))
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = Poly(F, [rng.randrange(q) for _ in range(mu[i])] + [rng.randrange(1, q)])
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = Poly(F, [rng.randrange(q) for _ in range(mu[i])])
        try:
            L = GramLattice(F, rows)
        except SingularForm:
            continue
        assert L.reduced
        assert reduced_is_definite(F, L.gram) == is_definite(L)


def test_definiteness_against_brute_force(F3):
    rng = random.Random(5)
    checked = 0
    while checked < 12:
        a, b, c = (Poly(F3, [rng.randrange(3) for _ in range(rng.randint(1, 2))]) for _ in range(3))
        if not (a and b and c):
            continue
        L = GramLattice.diagonal(F3, [a, b, c])
        if is_definite(L):
            assert not _brute_isotropic(L, 1)
        checked += 1


def test_adjoint_properties(F3):
    for S in sample_forms(F3, 20, 11):
        A = adjoint(S)
        assert A.det == S.det ** 2
        red = reduce(A)[0]
        m1, m2, m3 = S.minima
        assert red.minima == (m1 + m2, m1 + m3, m2 + m3)
        AA = adjoint(A)
        assert AA.gram == S.gram.map(lambda e: e * S.det)


@settings(max_examples=200, deadline=None)
@given(idx=st.integers(0, 10 ** 6), coeffs=st.lists(st.lists(st.integers(0, 2), max_size=4),
                                                     min_size=3, max_size=3))
def test_degree_valuation_law(idx, coeffs):
    F = GF(3)
    forms = sample_forms(F, 200, 0)
    S = forms[idx % len(forms)]
    x = [Poly(F, c) for c in coeffs]
    if not any(x):
        return
    v = S.value(x)
    assert v.deg == max(2 * xi.deg + mu for xi, mu in zip(x, S.minima) if xi)


def test_ternary_minima_parities():
    F = GF(3)
    for S in sample_forms(F, 300, 3):
        assert len({m % 2 for m in S.minima}) == 2


def test_reduce_rejects_indefinite(F3):
    with pytest.raises(NotDefinite):
        reduce(diag(F3, "1", "2", "t"))


def test_lattice_json_round_trip(F3):
    L = lattice(F3, [["1", "t"], ["t", "t^2+t"]])
    assert GramLattice.from_json(L.to_json()) == L
    rng = random.Random(0)
    U = random_gl_fq(F3, 3, rng)
    assert U.det().deg == 0
