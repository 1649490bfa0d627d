"""Square matrices over GF(q) and over K[X], with the reference determinants."""

from __future__ import annotations

from itertools import permutations

from ..errors import DomainError
from .field import GF, FieldElement
from .poly import Polynomial


class Matrix:
    __slots__ = ("field", "rows")

    def __init__(self, field: GF, rows):
        q = field.q
        rows = tuple(tuple(int(v) % q for v in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DomainError("matrix must be square")
        self.field = field
        self.rows = rows

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, field: GF, n: int) -> "Matrix":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, field: GF, n: int) -> "Matrix":
        return cls(field, [[0] * n for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and other.field is self.field and other.rows == self.rows

    def __hash__(self):
        return hash((self.field.q, self.rows))

    def _same(self, other):
        if not isinstance(other, Matrix) or other.field is not self.field or other.n != self.n:
            raise DomainError("matrix operands differ in field or size")

    def __add__(self, other):
        self._same(other)
        return Matrix(self.field, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._same(other)
        return Matrix(self.field, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix(self.field, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            c = int(other)
            return Matrix(self.field, [[a * c for a in r] for r in self.rows])
        self._same(other)
        cols = list(zip(*other.rows))
        return Matrix(self.field, [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    __rmul__ = __mul__

    def det(self) -> int:
        return det_reference_field(self)

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.rows]}, q={self.field.q})"


def det_reference_field(A: Matrix) -> int:
    """Gaussian elimination over GF(q), pivoting on the first nonzero entry."""
    F, q, n = A.field, A.field.q, A.n
    m = [list(r) for r in A.rows]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det = det * p % q
        inv_p = F.inv(p)
        for r in range(col + 1, n):
            f = m[r][col] * inv_p % q
            if f:
                row, prow = m[r], m[col]
                for c in range(col, n):
                    row[c] = (row[c] - f * prow[c]) % q
    return det % q


class PolyMatrix:
    """n x n matrix over K[X] with a public degree bound on every entry.

    Dual view: ``coefficient_matrices()`` returns A_0..A_d with
    A(X) = sum_j A_j X^j.
    """

    __slots__ = ("field", "entries", "d_bound")

    def __init__(self, field: GF, entries, d_bound: int | None = None):
        rows = []
        for r in entries:
            rows.append(tuple(e if isinstance(e, Polynomial) else Polynomial(field, e) for e in r))
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DomainError("polynomial matrix must be square")
        top = max((e.degree for r in rows for e in r), default=-1)
        if d_bound is None:
            d_bound = max(top, 0)
        if top > d_bound:
            raise DomainError(f"entry degree {top} exceeds bound {d_bound}")
        self.field = field
        self.entries = tuple(rows)
        self.d_bound = d_bound

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_coefficient_matrices(cls, mats, d_bound: int | None = None) -> "PolyMatrix":
        F = mats[0].field
        n = mats[0].n
        entries = [[Polynomial(F, [M[i, j] for M in mats]) for j in range(n)] for i in range(n)]
        return cls(F, entries, len(mats) - 1 if d_bound is None else d_bound)

    @classmethod
    def constant(cls, M: Matrix) -> "PolyMatrix":
        return cls.from_coefficient_matrices([M], 0)

    def coefficient_matrices(self) -> list[Matrix]:
        n = self.n
        return [
            Matrix(self.field, [[self.entries[i][j].coeff(k) for j in range(n)] for i in range(n)])
            for k in range(self.d_bound + 1)
        ]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and other.field is self.field and other.entries == self.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        return PolyMatrix(
            self.field,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            max(self.d_bound, other.d_bound),
        )

    def __sub__(self, other):
        return PolyMatrix(
            self.field,
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            max(self.d_bound, other.d_bound),
        )

    def __mul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        n = self.n
        zero = Polynomial(self.field)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.field, out, self.d_bound + other.d_bound)

    def __call__(self, alpha) -> Matrix:
        return polymatrix_eval(self, alpha)

    def __repr__(self):
        return f"PolyMatrix({[[list(e.coeffs) for e in r] for r in self.entries]}, d={self.d_bound}, q={self.field.q})"


def polymatrix_eval(A: PolyMatrix, alpha) -> Matrix:
    """Entry-wise Horner evaluation at a public point."""
    return Matrix(A.field, [[e(alpha) for e in r] for r in A.entries])


def berkowitz_charpoly(M, zero, one):
    """Coefficients of det(x I - M), leading first, without divisions.

    ``M`` is a square list-of-lists over any commutative ring whose
    elements support ``+``, ``-`` and ``*``; ``zero``/``one`` are that
    ring's identities. Returns n+1 ring elements c_0 = 1, ..., c_n with
    c_n = (-1)^n det M.
    """
    n = len(M)
    if n == 0:
        return [one]
    vect = [one, zero - M[0][0]]
    for r in range(1, n):
        S = [row[:r] for row in M[:r]]
        R = M[r][:r]
        C = [M[i][r] for i in range(r)]
        a = M[r][r]
        # Q = [1, -a, -R.C, -R.S.C, ..., -R.S^{r-1}.C]
        Q = [one, zero - a]
        v = C
        for _ in range(r):
            acc = zero
            for x, y in zip(R, v):
                acc = acc + x * y
            Q.append(zero - acc)
            nv = []
            for row in S:
                s = zero
                for x, y in zip(row, v):
                    s = s + x * y
                nv.append(s)
            v = nv
        # lower-triangular Toeplitz product: (r+2) x (r+1) times vect
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                acc = acc + Q[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def det_reference_polymat(A: PolyMatrix) -> Polynomial:
    """Exact det A(X) in K[X] via Berkowitz (no truncation)."""
    F = A.field
    zero, one = Polynomial(F), Polynomial(F, (1,))
    cp = berkowitz_charpoly([list(r) for r in A.entries], zero, one)
    d = cp[A.n]
    return -d if A.n % 2 else d


def det_cofactor(entries, zero, one):
    """Leibniz/cofactor expansion over a commutative ring (small n only)."""
    n = len(entries)
    if n == 0:
        return one
    total = zero
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for i, p in enumerate(perm):
            term = term * entries[i][p]
        total = total - term if inv % 2 else total + term
    return total


def det_cofactor_polymat(A: PolyMatrix) -> Polynomial:
    F = A.field
    return det_cofactor([list(r) for r in A.entries], Polynomial(F), Polynomial(F, (1,)))


def lagrange_interpolate(points):
    """Unique interpolant through (x, value) pairs.

    Values are ints/FieldElements (returns a Polynomial) or Matrices
    (returns a PolyMatrix of degree bound len(points) - 1). The field is
    taken from the first value, or from an abscissa given as FieldElement.
    """
    if not points:
        raise DomainError("need at least one point")
    xs = [int(x) for x, _ in points]
    vals = [v for _, v in points]
    F = _field_of(points)
    q = F.q
    xs = [x % q for x in xs]
    if len(set(xs)) != len(xs):
        raise DomainError("duplicate abscissae")
    basis = lagrange_basis(F, xs)
    if isinstance(vals[0], Matrix):
        n = vals[0].n
        if any(v.n != n for v in vals):
            raise DomainError("matrices of different sizes")
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Polynomial(F)
                for l, v in zip(basis, vals):
                    acc = acc + l.scale(v[i, j])
                row.append(acc)
            entries.append(row)
        return PolyMatrix(F, entries, len(points) - 1)
    acc = Polynomial(F)
    for l, v in zip(basis, vals):
        acc = acc + l.scale(int(v))
    return acc


def lagrange_basis(F: GF, xs) -> list[Polynomial]:
    """l_i(X) = prod_{j != i} (X - x_j) / (x_i - x_j)."""
    q = F.q
    out = []
    for i, xi in enumerate(xs):
        num = Polynomial(F, (1,))
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                num = num * Polynomial(F, (-xj, 1))
                den = den * (xi - xj) % q
        out.append(num.scale(F.inv(den)))
    return out


def _field_of(points) -> GF:
    for x, v in points:
        for obj in (v, x):
            if isinstance(obj, (Matrix, FieldElement, Polynomial)):
                return obj.field
    raise DomainError("cannot infer the field: pass FieldElement or Matrix values")
