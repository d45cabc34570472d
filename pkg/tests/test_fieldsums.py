import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffqlat.algebra import GF, CycValue, Poly
from ffqlat.errors import BudgetExceeded
from ffqlat.fieldsums import (FqQuadSpace, QFSystem, basic_gauss_sum, bruteforce_isospectral,
                              carlitz_isospectral, gauss_sum, gray_code, orthogonal_sum,
                              sweep_squares_proportional, verify_binary_transitivity,
                              verify_squares_proportional)
from ffqlat.qform import GramLattice, is_definite

from conftest import P


def rand_space(F, n, rng):
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            A[i][j] = A[j][i] = rng.randrange(F.q)
    return FqQuadSpace(F, A)


def brute_equivalent(F, A, B):
    """Oracle: search GL_n(F_q) for C with C^T A C = B."""
    n = len(A)
    for ent in itertools.product(range(F.q), repeat=n * n):
        C = [ent[r * n:(r + 1) * n] for r in range(n)]
        ok = True
        for i in range(n):
            for j in range(n):
                s = 0
                for a in range(n):
                    for b in range(n):
                        s = F.add(s, F.mul(C[a][i], F.mul(A[a][b], C[b][j])))
                if s != B[i][j]:
                    ok = False
                    break
            if not ok:
                break
        if ok and _det(F, C):
            return True
    return False


def _det(F, C):
    n = len(C)
    if n == 1:
        return C[0][0]
    return F.sub(F.mul(C[0][0], C[1][1]), F.mul(C[0][1], C[1][0]))


def test_gauss_examples(F3):
    G = gauss_sum(FqQuadSpace(F3, [[1]]))
    assert G == CycValue.integer(3, 1) + CycValue.zeta(3) * 2
    assert G * G == CycValue.integer(3, -3)
    assert gauss_sum(FqQuadSpace(F3, [[0, 0], [0, 0]])) == CycValue.integer(3, 9)
    # <1, delta>: psi(delta) G^2 = 3
    assert gauss_sum(FqQuadSpace(F3, [[1, 0], [0, F3.delta]])) == CycValue.integer(3, 3)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_G_squared(q):
    F = GF.from_order(q)
    G = basic_gauss_sum(F)
    assert G * G == CycValue.integer(F.p, F.psi(F.from_int(-1)) * q)


@pytest.mark.parametrize("q", [3, 5, 9])
def test_closed_form_and_multiplicativity(q):
    F = GF.from_order(q)
    rng = random.Random(q)
    for _ in range(40):
        U = rand_space(F, rng.randint(1, 3), rng)
        V = rand_space(F, rng.randint(1, 2), rng)
        assert gauss_sum(U) == gauss_sum(U, "closed")
        assert gauss_sum(orthogonal_sum(U, V)) == gauss_sum(U) * gauss_sum(V)
        assert U.rank + U.radical_dim == U.n


@pytest.mark.parametrize("q", [3, 5])
def test_gauss_sum_classifies_forms(q):
    F = GF(q)
    rng = random.Random(20 + q)
    for _ in range(40):
        n = rng.randint(1, 2)
        A, B = rand_space(F, n, rng), rand_space(F, n, rng)
        eq = brute_equivalent(F, [list(r) for r in A.matrix], [list(r) for r in B.matrix])
        assert (gauss_sum(A) == gauss_sum(B)) == eq


def test_carlitz_examples(F3):
    d = F3.delta
    a = QFSystem(F3, [[[1, 0], [0, d]]])
    b = QFSystem(F3, [[[d, 0], [0, 1]]])
    assert carlitz_isospectral(a, b) and bruteforce_isospectral(a, b)
    x2 = [[1, 0], [0, 0]]
    a = QFSystem(F3, [x2, [[0, 0], [0, 1]]])
    b = QFSystem(F3, [x2, [[0, 0], [0, d]]])
    assert not carlitz_isospectral(a, b)
    assert not bruteforce_isospectral(a, b)
    # the fibre over (0, 1): 2 points vs none
    assert a.fiber_counts()[0 * 3 + 1] == 2 and 1 not in b.fiber_counts()


def test_carlitz_linear_change(F5):
    rng = random.Random(1)
    for _ in range(10):
        n, m = 3, 2
        forms = [[list(r) for r in rand_space(F5, n, rng).matrix] for _ in range(m)]
        # C^T A C with C a permutation times a unit diagonal
        perm = rng.sample(range(n), n)
        scale = [rng.randrange(1, 5) for _ in range(n)]
        moved = [[[F5.mul(F5.mul(scale[i], scale[j]), A[perm[i]][perm[j]]) for j in range(n)]
                  for i in range(n)] for A in forms]
        assert carlitz_isospectral(QFSystem(F5, forms), QFSystem(F5, moved))


@pytest.mark.parametrize("q", [3, 5])
def test_carlitz_both_directions(q):
    F = GF(q)
    rng = random.Random(q * 11)
    seen = {True: 0, False: 0}
    for _ in range(50):
        n, m = rng.randint(1, 4 if q == 3 else 3), rng.randint(1, 3)
        s1 = QFSystem(F, [rand_space(F, n, rng).matrix for _ in range(m)])
        if rng.random() < 0.5:
            # a nearby system that is often, not always, isospectral
            perm = rng.sample(range(n), n)
            s2 = QFSystem(F, [[[f.matrix[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
                              for f in s1.forms])
            if rng.random() < 0.5:
                i = rng.randrange(m)
                mats = [list(map(list, f.matrix)) for f in s2.forms]
                mats[i][0][0] = F.mul(mats[i][0][0], F.delta)
                s2 = QFSystem(F, mats)
        else:
            s2 = QFSystem(F, [rand_space(F, n, rng).matrix for _ in range(m)])
        c = carlitz_isospectral(s1, s2)
        assert c == bruteforce_isospectral(s1, s2)
        seen[c] += 1
    assert seen[True] and seen[False]


def test_budget(F3):
    s = QFSystem(F3, [[[1]]] * 4)
    with pytest.raises(BudgetExceeded):
        carlitz_isospectral(s, s, budget=10)


@settings(max_examples=30, deadline=None)
@given(q=st.sampled_from([3, 5]), m=st.integers(1, 3))
def test_gray_code_visits_everything(q, m):
    digits = [0] * m
    seen = {tuple(digits)}
    for move in gray_code(q, m):
        if move is None:
            continue
        i, new, old = move
        assert digits[i] == old and abs(new - old) == 1
        digits[i] = new
        seen.add(tuple(digits))
    assert len(seen) == q ** m


def _binary_instances(q, rng, count):
    F = GF(q)
    out = []
    while len(out) < count:
        mu = rng.randint(0, 2)
        a = Poly(F, [rng.randrange(q) for _ in range(mu)] + [rng.randrange(1, q)])
        c = Poly(F, [rng.randrange(q) for _ in range(mu)] + [rng.randrange(1, q)])
        b = Poly(F, [rng.randrange(q) for _ in range(mu)])
        L = GramLattice(F, [[a, b], [b, c]], check=False)
        if not L.det or not is_definite(L):
            continue
        x, y = rng.randrange(q), rng.randrange(q)
        if not (x or y):
            continue
        out.append((L, L.value([x, y])))
    return out


def test_binary_transitivity(F3):
    Q0 = GramLattice(F3, [[P(F3, "t"), Poly.zero(F3)], [Poly.zero(F3), P(F3, "t")]])
    assert verify_binary_transitivity(Q0, P(F3, "t"))
    rng = random.Random(2)
    for q in (3, 5, 7):
        for L, a in _binary_instances(q, rng, 10):
            assert verify_binary_transitivity(L, a)


def test_squares_proportional(F3, F5):
    f = P(F3, "t^2+t+2")
    assert verify_squares_proportional(f, f)["holds"]
    g = P(F5, "t^2+3t+1")
    r = verify_squares_proportional(g.scale(4), g)
    assert r["condition"] and r["proportional"]
    for F in (F3, F5):
        rep = sweep_squares_proportional(F)
        assert rep["counterexamples"] == []
        assert rep["pairs"] == ((F.q - 1) * F.q ** 2) ** 2
