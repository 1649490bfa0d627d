"""Vectorised ring arithmetic used for shares and revealed values.

Every ring element is a numpy array whose trailing axes are ``ring.shape``;
any leading axes (players, batches) broadcast through the operations.
Moduli up to 24 bits use int64 (products and short sums cannot overflow);
larger moduli fall back to object arrays of Python ints.
"""

from __future__ import annotations

import contextvars
from math import prod

import numpy as np

from .algebra import (
    GF,
    ExtField,
    ExtFieldElement,
    FieldElement,
    Matrix,
    PolyMatrix,
    Polynomial,
    TruncSeries,
)
from .errors import DomainError

INT64_MAX_BITS = 24

_active_counter = contextvars.ContextVar("polydet_field_ops", default=None)


def count_ops(k: int) -> None:
    """Attribute ``k`` GF(q) operations to the meter of the running protocol."""
    c = _active_counter.get()
    if c is not None:
        c.field_ops += int(k)


def dtype_for(q: int):
    return np.int64 if q.bit_length() <= INT64_MAX_BITS else object


class Ring:
    kind = "ring"

    def __init__(self, field: GF):
        self.field = field
        self.q = field.q
        self.dtype = dtype_for(field.q)

    shape: tuple = ()

    @property
    def params(self) -> tuple:
        return ()

    @property
    def key(self) -> tuple:
        return (self.kind,) + self.params

    @property
    def size(self) -> int:
        return prod(self.shape)

    @property
    def product(self) -> "Ring":
        return self

    @property
    def mul_cost(self) -> int:
        return 1

    def __eq__(self, other):
        return type(other) is type(self) and other.q == self.q and other.params == self.params

    def __hash__(self):
        return hash((type(self).__name__, self.q, self.params))

    def __repr__(self):
        return f"{type(self).__name__}{self.params}@{self.q}"

    def array(self, x) -> np.ndarray:
        if self.dtype is object:
            a = np.array(x, dtype=object)
            if not a.size:
                return a
            return np.asarray(np.vectorize(lambda v: int(v) % self.q, otypes=[object])(a), dtype=object)
        return np.asarray(x, dtype=np.int64) % self.q

    def _coerce(self, a) -> np.ndarray:
        """ndarray in this ring's dtype (wide moduli need exact Python ints)."""
        a = np.asarray(a)
        if self.dtype is object and a.dtype != object:
            a = a.astype(object)
        return a

    def zeros(self, lead=()) -> np.ndarray:
        z = np.zeros(tuple(lead) + self.shape, dtype=np.int64)
        return z.astype(object) if self.dtype is object else z

    def one(self) -> np.ndarray:
        raise NotImplementedError

    def random(self, gen, lead=()) -> np.ndarray:
        v = gen.integers(0, self.q, size=tuple(lead) + self.shape, dtype=np.int64)
        return v.astype(object) if self.dtype is object else v

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def mul(self, a, b):
        raise NotImplementedError

    def is_unit(self, a) -> np.ndarray:
        """Boolean unit mask over the leading axes of ``a``."""
        raise DomainError(f"{self!r} has no unit test")

    def inv(self, a):
        """Element-wise inverse of public units (leading axes broadcast)."""
        raise DomainError(f"{self!r} has no public inverse")

    def embed(self, c) -> np.ndarray:
        """Scalars of GF(q) (any leading shape) as constants of this ring."""
        c = self.array(c)
        out = self.zeros(c.shape)
        out[(Ellipsis,) + (0,) * len(self.shape)] = c
        return out

    def where(self, mask, a, b):
        m = np.asarray(mask).reshape(np.shape(mask) + (1,) * len(self.shape))
        return np.where(m, a, b)

    def power(self, a, e: int):
        """Square-and-multiply, element-wise over the leading axes."""
        result = np.broadcast_to(self.one(), a.shape).copy()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def to_value(self, a):
        raise NotImplementedError

    def from_value(self, v) -> np.ndarray:
        raise NotImplementedError


class FieldRing(Ring):
    kind = "field"

    def one(self):
        return self.array(1)

    def mul(self, a, b):
        return (a * b) % self.q

    def is_unit(self, a):
        return np.asarray(a) % self.q != 0

    def inv(self, a):
        a = self._coerce(a)
        if not np.all(self.is_unit(a)):
            raise DomainError("inversion of zero")
        count_ops(2 * self.q.bit_length() * max(a.size, 1))
        return self.power(a, self.q - 2)

    def to_value(self, a) -> FieldElement:
        return self.field(int(a))

    def from_value(self, v):
        return self.array(int(v))


def _conv(a, b, length, q):
    """Coefficient convolution along the last axis, keeping ``length`` terms."""
    lead = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    out = np.zeros(lead + (length,), dtype=np.result_type(a, b))
    kb = b.shape[-1]
    for i in range(min(a.shape[-1], length)):
        w = min(kb, length - i)
        out[..., i : i + w] += a[..., i : i + 1] * b[..., :w]
    return out % q


class SeriesRing(Ring):
    """K[[X]] / X^m, coefficients ascending."""

    kind = "series"

    def __init__(self, field, m: int):
        super().__init__(field)
        if m < 1:
            raise DomainError("series length must be positive")
        self.m = m
        self.shape = (m,)

    @property
    def params(self):
        return (self.m,)

    @property
    def mul_cost(self):
        m = self.m
        return m * m

    def one(self):
        e = self.zeros()
        e[0] = 1
        return e

    def mul(self, a, b):
        return _conv(a, b, self.m, self.q)

    def is_unit(self, a):
        return np.asarray(a)[..., 0] % self.q != 0

    def inv(self, a):
        """Newton iteration g <- g(2 - a g) on whole batches at once."""
        a = self._coerce(a)
        if not np.all(self.is_unit(a)):
            raise DomainError("series with zero constant term is not invertible")
        F = FieldRing(self.field)
        g = self.embed(F.inv(a[..., 0]))
        prec = 1
        two = self.embed(2)
        while prec < self.m:
            prec *= 2
            g = self.mul(g, self.sub(two, self.mul(a, g)))
        count_ops(4 * self.m * self.m * max(a[..., 0].size, 1))
        return g

    def to_value(self, a) -> TruncSeries:
        return TruncSeries(self.field, [int(c) for c in a], self.m)

    def from_value(self, v) -> np.ndarray:
        if isinstance(v, Polynomial):
            v = TruncSeries.from_poly(v, self.m)
        return self.array(list(v.coeffs))


class PolyRing(Ring):
    """Polynomials of degree <= d; the product lands in PolyRing(2d)."""

    kind = "poly"

    def __init__(self, field, d: int):
        super().__init__(field)
        if d < 0:
            raise DomainError("degree bound must be >= 0")
        self.d = d
        self.shape = (d + 1,)

    @property
    def params(self):
        return (self.d,)

    @property
    def product(self):
        return PolyRing(self.field, 2 * self.d)

    @property
    def mul_cost(self):
        return (self.d + 1) ** 2

    def one(self):
        e = self.zeros()
        e[0] = 1
        return e

    def mul(self, a, b):
        return _conv(a, b, a.shape[-1] + b.shape[-1] - 1, self.q)

    def to_value(self, a) -> Polynomial:
        return Polynomial(self.field, [int(c) for c in a])

    def from_value(self, v: Polynomial):
        return self.array(v.padded(self.d + 1))


def _reduce_mod_monic(c, f_low, q):
    """Reduce coefficient vectors (last axis) modulo X^k + f_low."""
    k = len(f_low)
    c = c.copy()
    for t in range(c.shape[-1] - 1, k - 1, -1):
        top = c[..., t : t + 1] % q
        c[..., t - k : t] -= top * f_low
        c[..., t] = 0
    return c[..., :k] % q


class ExtRing(Ring):
    """K[X]/f with f monic irreducible; elements are residues of length deg f."""

    kind = "extfield"

    def __init__(self, field, f: Polynomial):
        super().__init__(field)
        self.ext = ExtField(f, check=False)
        self.f = f
        self.k = f.degree
        self.shape = (self.k,)
        self._f_low = self.array(list(f.coeffs[:-1]))

    @property
    def params(self):
        return tuple(self.f.coeffs)

    @property
    def mul_cost(self):
        return 2 * self.k * self.k

    def one(self):
        e = self.zeros()
        e[0] = 1
        return e

    def mul(self, a, b):
        full = _conv(a, b, 2 * self.k - 1, self.q)
        return _reduce_mod_monic(full, self._f_low, self.q)

    def is_unit(self, a):
        return np.any(np.asarray(a) % self.q != 0, axis=-1)

    def inv(self, a):
        """a^(q^k - 2): Fermat in the extension field, fully vectorised."""
        a = self._coerce(a)
        if not np.all(self.is_unit(a)):
            raise DomainError("inversion of zero in K[X]/f")
        e = self.q**self.k - 2
        count_ops(2 * e.bit_length() * self.mul_cost * max(a[..., 0].size, 1))
        return self.power(a, e)

    def to_value(self, a) -> ExtFieldElement:
        return ExtFieldElement(self.ext, Polynomial(self.field, [int(c) for c in a]))

    def from_value(self, v: ExtFieldElement):
        return self.array(v.residue.padded(self.k))


class MatRing(Ring):
    """n x n matrices over a base ring (field, series, poly or extension field)."""

    _KINDS = {"field": "matrix", "poly": "polymatrix", "series": "seriesmatrix", "extfield": "extmatrix"}

    def __init__(self, base: Ring, n: int):
        super().__init__(base.field)
        if n < 1:
            raise DomainError("matrix dimension must be >= 1")
        self.base = base
        self.n = n
        self.shape = (n, n) + base.shape
        self.kind = self._KINDS[base.kind]

    @property
    def params(self):
        return (self.n,) + self.base.params

    @property
    def product(self):
        if self.base.product == self.base:
            return self
        return MatRing(self.base.product, self.n)

    @property
    def mul_cost(self):
        n = self.n
        return n**3 * self.base.mul_cost + n * n * (n - 1) * self.base.size

    def one(self):
        e = self.zeros()
        for i in range(self.n):
            e[i, i] = self.base.one()
        return e

    def mul(self, a, b):
        q = self.q
        if self.base.kind == "field":
            return np.matmul(a, b) % q
        ka, kb = a.shape[-1], b.shape[-1]
        if self.base.kind == "poly":
            length = ka + kb - 1
        elif self.base.kind == "series":
            length = self.base.m
        else:
            length = ka + kb - 1
        A = np.moveaxis(a, -1, -3)
        B = np.moveaxis(b, -1, -3)
        lead = np.broadcast_shapes(A.shape[:-3], B.shape[:-3])
        out = np.zeros(lead + (length, self.n, self.n), dtype=np.result_type(a, b))
        for s in range(min(ka, length)):
            w = min(kb, length - s)
            out[..., s : s + w, :, :] += np.matmul(A[..., s : s + 1, :, :], B[..., :w, :, :])
        out = np.moveaxis(out % q, -3, -1)
        if self.base.kind == "extfield":
            out = _reduce_mod_monic(out, self.base._f_low, q)
        return out

    def to_value(self, a):
        n = self.n
        if self.base.kind == "field":
            return Matrix(self.field, [[int(a[i, j]) for j in range(n)] for i in range(n)])
        if self.base.kind in ("poly", "series"):
            d = a.shape[-1] - 1
            return PolyMatrix(self.field, [[Polynomial(self.field, [int(c) for c in a[i, j]]) for j in range(n)] for i in range(n)], d)
        return [[self.base.to_value(a[i, j]) for j in range(n)] for i in range(n)]

    def from_value(self, v):
        n = self.n
        if isinstance(v, Matrix):
            if self.base.kind == "field":
                return self.array([list(r) for r in v.rows])
            v = PolyMatrix.constant(v)
        if isinstance(v, PolyMatrix):
            L = self.base.shape[0]
            if v.d_bound + 1 > L and any(e.degree >= L for r in v.entries for e in r):
                raise DomainError("polynomial matrix does not fit the ring's degree bound")
            return self.array([[v[i, j].padded(L) for j in range(n)] for i in range(n)])
        return self.array([[self.base.from_value(v[i][j]) for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------- public helpers


def ring_from_key(field: GF, key: tuple) -> Ring:
    kind, *p = key
    if kind == "field":
        return FieldRing(field)
    if kind == "series":
        return SeriesRing(field, p[0])
    if kind == "poly":
        return PolyRing(field, p[0])
    if kind == "extfield":
        return ExtRing(field, Polynomial(field, p))
    if kind == "matrix":
        return MatRing(FieldRing(field), p[0])
    if kind == "polymatrix":
        return MatRing(PolyRing(field, p[1]), p[0])
    if kind == "seriesmatrix":
        return MatRing(SeriesRing(field, p[1]), p[0])
    if kind == "extmatrix":
        return MatRing(ExtRing(field, Polynomial(field, p[1:])), p[0])
    raise DomainError(f"unknown ring kind {kind!r}")


def gauss_det(ring: MatRing, a) -> np.ndarray:
    """Determinant of one public matrix over a field-like base (GF(q) or K[X]/f)."""
    base, n = ring.base, ring.n
    m = [[a[i, j] for j in range(n)] for i in range(n)]
    det = base.one()
    for col in range(n):
        piv = next((r for r in range(col, n) if base.is_unit(m[r][col])), None)
        if piv is None:
            return base.zeros()
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = base.neg(det)
        p = m[col][col]
        det = base.mul(det, p)
        inv_p = base.inv(p)
        for r in range(col + 1, n):
            f = base.mul(m[r][col], inv_p)
            for c in range(col, n):
                m[r][c] = base.sub(m[r][c], base.mul(f, m[col][c]))
    return det


def det_batch(ring: MatRing, a) -> np.ndarray:
    """Determinants of a batch of public matrices over GF(q) or K[X]/f.

    Elimination runs without pivoting across the whole batch; the rare
    matrices that meet a zero pivot are redone one by one with row swaps.
    """
    base, n = ring.base, ring.n
    a = np.asarray(a)
    lead = a.shape[: a.ndim - len(ring.shape)]
    flat = a.reshape((-1,) + ring.shape)
    M = flat.copy()
    B = M.shape[0]
    det = np.broadcast_to(base.one(), (B,) + base.shape).copy()
    bad = np.zeros(B, dtype=bool)
    one = base.one()
    for col in range(n):
        p = M[:, col, col]
        ok = base.is_unit(p)
        bad |= ~ok
        det = base.mul(det, p)
        if col == n - 1:
            break
        inv_p = base.inv(base.where(ok, p, one))
        f = base.mul(M[:, col + 1 :, col], inv_p[:, None])
        M[:, col + 1 :, col:] = base.sub(M[:, col + 1 :, col:], base.mul(f[:, :, None], M[:, None, col, col:]))
    for b in np.nonzero(bad)[0]:
        det[b] = gauss_det(ring, flat[b])
    count_ops(B * (2 * n**3 // 3 + n) * base.mul_cost)
    return det.reshape(lead + base.shape)


def berkowitz_det(ring: MatRing, a) -> np.ndarray:
    """Division-free determinant of public matrices over a truncated-series base.

    Same recurrence as the reference oracle but on numpy coefficient
    vectors with leading batch axes, so no inverse is ever needed.
    """
    base, n = ring.base, ring.n
    if base.kind != "series":
        raise DomainError("public Berkowitz runs over a truncated-series base")
    a = np.asarray(a)
    zero = base.zeros()
    M = [[a[..., i, j, :] for j in range(n)] for i in range(n)]
    vect = [base.one(), base.neg(M[0][0])]
    muls = 0
    for r in range(1, n):
        R = M[r][:r]
        v = [M[i][r] for i in range(r)]
        Q = [base.one(), base.neg(M[r][r])]
        for _ in range(r):
            acc = zero
            for x, y in zip(R, v):
                acc = acc + base.mul(x, y)
            Q.append(base.neg(acc % ring.q))
            v = [sum((base.mul(M[i][j], v[j]) for j in range(r)), zero) % ring.q for i in range(r)]
            muls += r + r * r
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                acc = acc + base.mul(Q[i - j], vect[j])
            new.append(acc % ring.q)
            muls += min(i, r) + 1
        vect = new
    lead = a.shape[: a.ndim - len(ring.shape)]
    count_ops(muls * base.mul_cost * max(int(np.prod(lead)), 1))
    d = np.broadcast_to(vect[n], lead + base.shape)
    return base.neg(d) if n % 2 else d.copy()
