"""Truncated power series K[[X]] / X^m."""

from __future__ import annotations

from ..errors import DomainError
from .field import GF
from .poly import Polynomial, mul_coeffs


class TruncSeries:
    __slots__ = ("field", "coeffs", "m")

    def __init__(self, field: GF, coeffs, m: int | None = None):
        coeffs = [int(c) % field.q for c in coeffs]
        if m is None:
            m = len(coeffs)
        if m < 1:
            raise DomainError("series length must be positive")
        # anything at or beyond X^m is discarded
        coeffs = (coeffs + [0] * m)[:m]
        self.field = field
        self.coeffs = tuple(coeffs)
        self.m = m

    @classmethod
    def from_poly(cls, p: Polynomial, m: int) -> "TruncSeries":
        return cls(p.field, p.coeffs[:m], m)

    def to_poly(self) -> Polynomial:
        return Polynomial(self.field, self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0

    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries):
            raise DomainError("expected a TruncSeries operand")
        if other.field is not self.field or other.m != self.m:
            raise DomainError("series operands differ in field or length")

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and other.field is self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __add__(self, other):
        self._check(other)
        q = self.field.q
        return TruncSeries(self.field, [(a + b) % q for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        q = self.field.q
        return TruncSeries(self.field, [(a - b) % q for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TruncSeries(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return TruncSeries(self.field, [c * other for c in self.coeffs])
        self._check(other)
        prod = mul_coeffs(self.coeffs, other.coeffs, self.field.q)
        return TruncSeries(self.field, prod, self.m)

    __rmul__ = __mul__

    def inv(self) -> "TruncSeries":
        """Newton iteration g <- g (2 - a g), doubling precision each step."""
        if not self.is_unit():
            raise DomainError("series with zero constant term is not invertible")
        F, q, m = self.field, self.field.q, self.m
        g = [F.inv(self.coeffs[0])]
        prec = 1
        while prec < m:
            prec = min(2 * prec, m)
            ag = mul_coeffs(self.coeffs[:prec], g, q)[:prec]
            corr = [(-c) % q for c in ag] + [0] * (prec - len(ag))
            corr[0] = (corr[0] + 2) % q
            g = mul_coeffs(g, corr, q)[:prec]
        return TruncSeries(F, g, m)

    def __repr__(self):
        return f"TruncSeries({list(self.coeffs)}, q={self.field.q})"


def series_ops(a: TruncSeries, b: TruncSeries | None, op: str) -> TruncSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise DomainError(f"unknown series op {op!r}")
