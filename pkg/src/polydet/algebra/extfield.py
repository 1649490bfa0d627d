"""Extension field K[X]/f for a public monic irreducible f."""

from __future__ import annotations

from ..errors import DomainError
from .poly import Polynomial, is_irreducible, poly_xgcd


class ExtField:
    __slots__ = ("f", "base", "k")

    def __init__(self, f: Polynomial, check: bool = True):
        if f.degree < 1 or not f.is_monic():
            raise DomainError("modulus must be monic of degree >= 1")
        if check and not is_irreducible(f):
            raise DomainError(f"{f} is reducible")
        self.f = f
        self.base = f.field
        self.k = f.degree

    def __eq__(self, other):
        return isinstance(other, ExtField) and other.f == self.f

    def __hash__(self):
        return hash(("ext", self.f))

    def __call__(self, residue) -> "ExtFieldElement":
        if not isinstance(residue, Polynomial):
            residue = Polynomial(self.base, residue if isinstance(residue, (list, tuple)) else (residue,))
        return ExtFieldElement(self, residue % self.f)

    def __repr__(self):
        return f"ExtField({self.f})"


class ExtFieldElement:
    __slots__ = ("ext", "residue")

    def __init__(self, ext: ExtField, residue: Polynomial):
        if residue.degree >= ext.k:
            raise DomainError("residue not reduced modulo f")
        self.ext = ext
        self.residue = residue

    def _other(self, other):
        if isinstance(other, ExtFieldElement):
            if other.ext != self.ext:
                raise DomainError("elements of different extension fields")
            return other.residue
        if isinstance(other, int):
            return Polynomial(self.ext.base, (other,))
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, ExtFieldElement) and other.ext == self.ext and other.residue == self.residue

    def __hash__(self):
        return hash(self.residue)

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ExtFieldElement(self.ext, self.residue + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ExtFieldElement(self.ext, self.residue - o)

    def __neg__(self):
        return ExtFieldElement(self.ext, -self.residue)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ExtFieldElement(self.ext, (self.residue * o) % self.ext.f)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.residue.is_zero()

    def inv(self) -> "ExtFieldElement":
        if self.is_zero():
            raise DomainError("inversion of zero in K[X]/f")
        g, s, _ = poly_xgcd(self.residue, self.ext.f)
        if g.degree != 0:
            raise DomainError("element shares a factor with the modulus")
        return ExtFieldElement(self.ext, s % self.ext.f)

    def __repr__(self):
        return f"[{self.residue}] mod f"


def ext_field_arith(a: ExtFieldElement, b: ExtFieldElement | None, op: str) -> ExtFieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise DomainError(f"unknown extension-field op {op!r}")
