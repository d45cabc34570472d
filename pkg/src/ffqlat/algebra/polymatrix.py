"""Small dense matrices over A = F_q[t] (also usable over F_q(t)).

Entries are any ring elements supporting +, -, * (Poly or RatFunc).  The
Smith and Hermite normal forms need Euclidean division and so are only
defined for Poly entries.
"""

from .poly import NEG_INF, Poly, poly_divmod


class PolyMatrix:
    __slots__ = ("F", "rows", "cols", "entries")

    def __init__(self, F, entries):
        self.F = F
        self.entries = tuple(tuple(r) for r in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, F, n):
        one, zero = Poly.one(F), Poly.zero(F)
        return cls(F, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, F, r, c):
        z = Poly.zero(F)
        return cls(F, [[z] * c for _ in range(r)])

    @classmethod
    def diag(cls, F, d):
        n = len(d)
        z = Poly.zero(F)
        return cls(F, [[d[i] if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_ints(cls, F, rows):
        return cls(F, [[Poly.from_ints(F, e) if isinstance(e, (list, tuple)) else Poly.const(F, F.from_int(e))
                        for e in row] for row in rows])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"PolyMatrix([{body}])"

    def to_lists(self):
        return [list(r) for r in self.entries]

    def transpose(self):
        return PolyMatrix(self.F, list(zip(*self.entries)) if self.rows else [])

    T = property(transpose)

    def __mul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.entries))
        out = []
        for r in self.entries:
            row = []
            for c in cols:
                s = r[0] * c[0]
                for a, b in zip(r[1:], c[1:]):
                    s = s + a * b
                row.append(s)
            out.append(row)
        return PolyMatrix(self.F, out)

    def __add__(self, other):
        return PolyMatrix(self.F, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def map(self, fn):
        return PolyMatrix(self.F, [[fn(e) for e in r] for r in self.entries])

    def is_square(self):
        return self.rows == self.cols

    def is_symmetric(self):
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i))

    def minor(self, i, j):
        return PolyMatrix(self.F, [r[:j] + r[j + 1:] for k, r in enumerate(self.entries) if k != i])

    def det(self):
        """Cofactor expansion; intended for the n <= 5 matrices used here."""
        if not self.is_square():
            raise ValueError("det of non-square matrix")
        return _det(self.entries)

    def adjugate(self):
        n = self.rows
        if n == 1:
            return PolyMatrix(self.F, [[_one_like(self.entries[0][0])]])
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                d = self.minor(i, j).det()
                cof[j][i] = d if (i + j) % 2 == 0 else -d
        return PolyMatrix(self.F, cof)

    def is_unimodular(self):
        d = self.det()
        return isinstance(d, Poly) and d.deg == 0

    def reversed(self):
        """Conjugate by the reversal permutation (reverse rows and columns)."""
        return PolyMatrix(self.F, [r[::-1] for r in self.entries[::-1]])


def _one_like(e):
    if isinstance(e, Poly):
        return Poly.one(e.F)
    return e * 0 + 1


def _det(m):
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        a = m[0][j]
        if not a:
            continue
        sub = [r[:j] + r[j + 1:] for r in m[1:]]
        term = a * _det(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return m[0][0] * 0
    return total


# -- normal forms -------------------------------------------------------

def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for r in M:
        r[i], r[j] = r[j], r[i]


def _row_axpy(M, dst, src, c):
    # row dst <- row dst - c * row src
    M[dst] = [a - c * b for a, b in zip(M[dst], M[src])]


def _col_axpy(M, dst, src, c):
    for r in M:
        r[dst] = r[dst] - c * r[src]


def smith_normal_form(M):
    """Return (D, U, V) with U*M*V = D, D diagonal, d_i | d_{i+1}, d_i monic.

    U and V are unimodular over A.  The zero matrix gives D = 0.
    """
    F = M.F
    m, n = M.rows, M.cols
    A = [list(r) for r in M.entries]
    U = [list(r) for r in PolyMatrix.identity(F, m).entries]
    V = [list(r) for r in PolyMatrix.identity(F, n).entries]
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    e = A[i][j]
                    if e and (best is None or e.deg < best[0]):
                        best = (e.deg, i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                _swap_rows(A, i, t)
                _swap_rows(U, i, t)
            if j != t:
                _swap_cols(A, j, t)
                _swap_cols(V, j, t)
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    qt, r = poly_divmod(A[i][t], piv)
                    _row_axpy(A, i, t, qt)
                    _row_axpy(U, i, t, qt)
                    dirty = dirty or bool(r)
            for j in range(t + 1, n):
                if A[t][j]:
                    qt, r = poly_divmod(A[t][j], piv)
                    _col_axpy(A, j, t, qt)
                    _col_axpy(V, j, t, qt)
                    dirty = dirty or bool(r)
            if dirty:
                continue
            # divisibility of the trailing block by the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] and poly_divmod(A[i][j], piv)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if A[t][t]:
            k = F.inv(A[t][t].lc)
            A[t] = [a.scale(k) for a in A[t]]
            U[t] = [a.scale(k) for a in U[t]]
    for i in range(m):
        for j in range(n):
            if i != j:
                assert not A[i][j]
    return PolyMatrix(F, A), PolyMatrix(F, U), PolyMatrix(F, V)


def invariant_factors(M):
    D, _, _ = smith_normal_form(M)
    return [D[i, i] for i in range(min(D.rows, D.cols))]


def hermite_normal_form(M):
    """Row Hermite form: (H, U) with U*M = H, U unimodular.

    H is in row echelon form, pivots monic, and entries above each pivot
    have degree below the pivot's degree.
    """
    F = M.F
    m, n = M.rows, M.cols
    A = [list(r) for r in M.entries]
    U = [list(r) for r in PolyMatrix.identity(F, m).entries]
    row = 0
    for col in range(n):
        if row >= m:
            break
        while True:
            nz = [(A[i][col].deg, i) for i in range(row, m) if A[i][col]]
            if not nz:
                break
            _, i = min(nz)
            if i != row:
                _swap_rows(A, i, row)
                _swap_rows(U, i, row)
            done = True
            for i in range(row + 1, m):
                if A[i][col]:
                    qt, _ = poly_divmod(A[i][col], A[row][col])
                    _row_axpy(A, i, row, qt)
                    _row_axpy(U, i, row, qt)
                    if A[i][col]:
                        done = False
            if done:
                break
        if not A[row][col]:
            continue
        k = F.inv(A[row][col].lc)
        A[row] = [a.scale(k) for a in A[row]]
        U[row] = [a.scale(k) for a in U[row]]
        for i in range(row):
            if A[i][col] and A[i][col].deg >= A[row][col].deg:
                qt, _ = poly_divmod(A[i][col], A[row][col])
                _row_axpy(A, i, row, qt)
                _row_axpy(U, i, row, qt)
        row += 1
    return PolyMatrix(F, A), PolyMatrix(F, U)


__all__ = ["PolyMatrix", "smith_normal_form", "hermite_normal_form", "invariant_factors", "NEG_INF"]
