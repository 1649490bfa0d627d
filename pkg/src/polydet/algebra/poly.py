"""Dense univariate polynomials over GF(q).

Coefficients are stored ascending as a tuple of reduced ints with no
trailing zeros; the zero polynomial is ``()`` and has degree -1.
"""

from __future__ import annotations

from ..errors import DomainError
from .field import GF, FieldElement

KARATSUBA_CUTOFF = 32


def _trim(c: list[int]) -> tuple[int, ...]:
    end = len(c)
    while end and c[end - 1] == 0:
        end -= 1
    return tuple(c[:end])


def _schoolbook(a, b, q):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return [c % q for c in out]


def _add_into(out, src, shift):
    for i, c in enumerate(src):
        out[i + shift] += c


def _karatsuba(a, b, q):
    if min(len(a), len(b)) <= KARATSUBA_CUTOFF:
        return _schoolbook(a, b, q)
    h = max(len(a), len(b)) // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    if not a1 or not b1:
        return _schoolbook(a, b, q)
    z0 = _karatsuba(a0, b0, q)
    z2 = _karatsuba(a1, b1, q)
    sa = [(x + y) for x, y in _zip_pad(a0, a1)]
    sb = [(x + y) for x, y in _zip_pad(b0, b1)]
    z1 = _karatsuba(sa, sb, q)
    for i, c in enumerate(z0):
        z1[i] -= c
    for i, c in enumerate(z2):
        z1[i] -= c
    out = [0] * (len(a) + len(b) - 1)
    _add_into(out, z0, 0)
    _add_into(out, z1[: len(out) - h], h)
    _add_into(out, z2, 2 * h)
    return [c % q for c in out]


def _zip_pad(x, y):
    n = max(len(x), len(y))
    return zip(list(x) + [0] * (n - len(x)), list(y) + [0] * (n - len(y)))


def mul_coeffs(a, b, q: int) -> list[int]:
    """Product of two ascending coefficient sequences mod q (untrimmed)."""
    if not a or not b:
        return []
    return _karatsuba(list(a), list(b), q)


class Polynomial:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: GF, coeffs=()):
        q = field.q
        self.field = field
        self.coeffs = _trim([int(c) % q for c in coeffs])

    @classmethod
    def _raw(cls, field, coeffs):
        p = object.__new__(cls)
        p.field = field
        p.coeffs = _trim(list(coeffs))
        return p

    @classmethod
    def X(cls, field: GF) -> "Polynomial":
        return cls._raw(field, (0, 1))

    @classmethod
    def constant(cls, field: GF, c: int) -> "Polynomial":
        return cls(field, (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def padded(self, length: int) -> list[int]:
        if len(self.coeffs) > length:
            raise DomainError(f"degree {self.degree} does not fit in {length} coefficients")
        return list(self.coeffs) + [0] * (length - len(self.coeffs))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field is not self.field:
                raise DomainError("polynomials over different fields")
            return other
        if isinstance(other, FieldElement):
            return Polynomial(self.field, (other.value,))
        if isinstance(other, int):
            return Polynomial(self.field, (other,))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == _trim([other % self.field.q])
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        q = self.field.q
        return Polynomial._raw(self.field, [(x + y) % q for x, y in _zip_pad(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        q = self.field.q
        return Polynomial._raw(self.field, [-c % q for c in self.coeffs])

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return poly_mul(self, o)

    __rmul__ = __mul__

    def scale(self, c: int) -> "Polynomial":
        q = self.field.q
        return Polynomial._raw(self.field, [x * c % q for x in self.coeffs])

    def __call__(self, x) -> int:
        """Horner evaluation at an int or FieldElement; returns an int."""
        x = int(x)
        q = self.field.q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % q
        return acc

    def __divmod__(self, other: "Polynomial"):
        o = self._lift(other)
        if o.is_zero():
            raise DomainError("polynomial division by zero")
        q = self.field.q
        r = list(self.coeffs)
        inv_lead = self.field.inv(o.coeffs[-1])
        dq = len(r) - len(o.coeffs)
        if dq < 0:
            return Polynomial._raw(self.field, ()), self
        quo = [0] * (dq + 1)
        oc = o.coeffs
        for k in range(dq, -1, -1):
            c = r[k + len(oc) - 1] * inv_lead % q
            quo[k] = c
            if c:
                for j, b in enumerate(oc):
                    r[k + j] = (r[k + j] - c * b) % q
        return Polynomial._raw(self.field, quo), Polynomial._raw(self.field, r[: len(oc) - 1])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def powmod(self, e: int, mod: "Polynomial") -> "Polynomial":
        result = Polynomial._raw(self.field, (1,)) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else (f"{c}X" if i == 1 else f"{c}X^{i}"))
        return " + ".join(terms) + f" (mod {self.field.q})"


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact product in K[X]; schoolbook below 32 coefficients, Karatsuba above."""
    if a.field is not b.field:
        raise DomainError("polynomials over different fields")
    return Polynomial._raw(a.field, mul_coeffs(a.coeffs, b.coeffs, a.field.q))


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Polynomial, b: Polynomial):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Polynomial._raw(F, (1,)), Polynomial._raw(F, ())
    t0, t1 = Polynomial._raw(F, ()), Polynomial._raw(F, (1,))
    while not r1.is_zero():
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if r0.is_zero():
        return r0, s0, t0
    k = F.inv(r0.coeffs[-1])
    return r0.scale(k), s0.scale(k), t0.scale(k)


def is_irreducible(f: Polynomial) -> bool:
    """Ben-Or test: f has no factor of degree i for every i <= deg f / 2."""
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    f = f.monic()
    q = f.field.q
    x = Polynomial.X(f.field)
    xp = x % f
    for _ in range(1, n // 2 + 1):
        xp = xp.powmod(q, f)
        if poly_gcd(f, xp - x).degree > 0:
            return False
    return True


def irreducible_poly(field: GF, degree: int, rng) -> Polynomial:
    """Las Vegas search for a monic irreducible polynomial of the given degree.

    ``rng`` is a ``numpy.random.Generator``; monic candidates are drawn
    uniformly until one passes :func:`is_irreducible`.
    """
    if degree < 1:
        raise DomainError("degree must be >= 1")
    q = field.q
    while True:
        low = [int(c) for c in rng.integers(0, q, size=degree)]
        f = Polynomial(field, low + [1])
        if is_irreducible(f):
            return f
