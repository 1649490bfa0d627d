"""Prime field GF(q) with exact integer arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import DomainError

MAX_BITS = 62

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class GF:
    """Descriptor of the prime field GF(q).

    Instances are cached per modulus, so ``GF(101) is GF(101)``.
    """

    __slots__ = ("q", "bits")

    def __new__(cls, q: int):
        return _gf(int(q))

    @classmethod
    def _create(cls, q: int) -> "GF":
        if q.bit_length() > MAX_BITS:
            raise DomainError(f"modulus {q} exceeds {MAX_BITS} bits")
        if not is_prime(q):
            raise DomainError(f"modulus {q} is not prime")
        self = object.__new__(cls)
        self.q = q
        # bits needed to broadcast one element: ceil(log2 q)
        self.bits = (q - 1).bit_length()
        return self

    def __repr__(self):
        return f"GF({self.q})"

    def __reduce__(self):
        return (GF, (self.q,))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, int(value) % self.q)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise DomainError("inversion of zero in GF(%d)" % self.q)
        return pow(a, self.q - 2, self.q)


@lru_cache(maxsize=None)
def _gf(q: int) -> GF:
    return GF._create(q)


@dataclass(frozen=True)
class FieldElement:
    field: GF
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise DomainError(f"{self.value} not reduced mod {self.field.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise DomainError("operands live in different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self * self.field.inv(b)

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch one of add, sub, mul, inv, neg (``b`` is ignored for the unary ops)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise DomainError(f"unknown field op {op!r}")
