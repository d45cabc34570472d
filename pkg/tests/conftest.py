import random

import pytest

from ffqlat.algebra import GF, Poly, PolyMatrix
from ffqlat.algebra.poly import parse_poly
from ffqlat.qform import GramLattice


def P(F, text):
    return parse_poly(F, text)


def lattice(F, rows):
    """GramLattice from rows of polynomial strings or ints."""
    return GramLattice(F, [[P(F, e) if isinstance(e, str) else Poly.const(F, F.from_int(e))
                            for e in r] for r in rows])


def diag(F, *entries):
    n = len(entries)
    return lattice(F, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def rand_poly(F, rng, max_deg):
    d = rng.randint(-1, max_deg)
    return Poly(F, [rng.randrange(F.q) for _ in range(d + 1)])


def rand_unimodular(F, n, rng, steps=4, deg=1):
    U = PolyMatrix.identity(F, n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        E = [[Poly.one(F) if a == b else Poly.zero(F) for b in range(n)] for a in range(n)]
        E[i][j] = rand_poly(F, rng, deg)
        U = U * PolyMatrix(F, E)
    return U


@pytest.fixture
def F3():
    return GF(3)


@pytest.fixture
def F5():
    return GF(5)


@pytest.fixture
def rng():
    return random.Random(12345)


_FORM_CACHE = {}


def reduced_forms(F, n=3, max_mu=2, patterns=None):
    """All normalized definite reduced forms (cached list)."""
    from ffqlat.harness import enumerate_reduced_forms

    key = (F.q, n, max_mu, tuple(patterns) if patterns else None)
    if key not in _FORM_CACHE:
        _FORM_CACHE[key] = list(enumerate_reduced_forms(F, n, max_mu, patterns=patterns))
    return _FORM_CACHE[key]


def sample_forms(F, k, seed, n=3, max_mu=2, patterns=None):
    forms = reduced_forms(F, n, max_mu, patterns)
    return random.Random(seed).sample(forms, min(k, len(forms)))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = []


def record_criterion(num, ok, detail):
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append((num, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
