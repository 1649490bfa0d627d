"""Additive secret sharing over the vectorised rings.

``Shared`` bundles all N players' shares of one (possibly batched) secret:
``data[p]`` is what player p+1 holds. Axes between the player axis and the
ring's own shape are batch axes, each position an independent secret.
``Share`` is the single-player view.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .algebra import GF, lagrange_basis
from .errors import DomainError
from .rings import FieldRing, MatRing, PolyRing, Ring, count_ops


@dataclass(frozen=True)
class Share:
    owner: int
    value: np.ndarray
    ring: Ring

    @property
    def ring_tag(self) -> tuple:
        return self.ring.key


class Shared:
    __slots__ = ("ring", "data")

    def __init__(self, ring: Ring, data):
        data = np.asarray(data)
        k = len(ring.shape)
        if data.ndim < 1 + k or (k and data.shape[data.ndim - k :] != ring.shape):
            raise DomainError(f"share array of shape {data.shape} does not fit {ring!r}")
        if data.flags.writeable:
            data = data.view()
            data.flags.writeable = False
        self.ring = ring
        self.data = data

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def batch(self) -> tuple:
        return self.data.shape[1 : self.data.ndim - len(self.ring.shape)]

    @property
    def count(self) -> int:
        return prod(self.batch)

    def share(self, player: int) -> Share:
        return Share(player, self.data[player - 1], self.ring)

    def shares(self) -> list[Share]:
        return [self.share(p) for p in range(1, self.N + 1)]

    def reconstruct(self) -> np.ndarray:
        """Local sum of all shares (test harness view; protocols use reveal)."""
        return self.data.sum(axis=0) % self.ring.q

    def _same(self, other: "Shared"):
        if not isinstance(other, Shared):
            raise DomainError("expected shared operand")
        if other.ring != self.ring or other.N != self.N:
            raise DomainError(f"share operands differ: {self.ring!r} vs {other.ring!r}")

    def _count(self, per_elem: int):
        count_ops(per_elem * self.count)

    def __add__(self, other: "Shared") -> "Shared":
        self._same(other)
        self._count(self.ring.size)
        return Shared(self.ring, self.ring.add(self.data, other.data))

    def __sub__(self, other: "Shared") -> "Shared":
        self._same(other)
        self._count(self.ring.size)
        return Shared(self.ring, self.ring.sub(self.data, other.data))

    def __neg__(self) -> "Shared":
        self._count(self.ring.size)
        return Shared(self.ring, self.ring.neg(self.data))

    def add_public(self, c) -> "Shared":
        """Add a public constant: only player 1 moves, so the sum shifts once."""
        out = np.array(self.data)
        out[0] = self.ring.add(out[0], c)
        self._count(self.ring.size)
        return Shared(self.ring, out)

    def lmul(self, c) -> "Shared":
        """c·[a] for public c on the left."""
        self._count(self.ring.mul_cost)
        return Shared(self.ring.product, self.ring.mul(c, self.data))

    def rmul(self, c) -> "Shared":
        """[a]·c for public c on the right."""
        self._count(self.ring.mul_cost)
        return Shared(self.ring.product, self.ring.mul(self.data, c))

    def scale(self, c: int) -> "Shared":
        self._count(self.ring.size)
        return Shared(self.ring, (self.data * (int(c) % self.ring.q)) % self.ring.q)

    def __getitem__(self, idx) -> "Shared":
        """Index the batch axes (player axis is kept)."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Shared(self.ring, self.data[(slice(None),) + idx])

    def with_ring(self, ring: Ring) -> "Shared":
        """Reinterpret the share words under another ring of identical shape."""
        if ring.shape != self.ring.shape:
            raise DomainError("rings differ in shape")
        return Shared(ring, self.data)

    def resize(self, ring: Ring) -> "Shared":
        """Zero-pad or truncate the trailing coefficient axis to fit ``ring``."""
        L = ring.shape[-1]
        cur = self.data.shape[-1]
        if L <= cur:
            return Shared(ring, self.data[..., :L])
        pad = [(0, 0)] * (self.data.ndim - 1) + [(0, L - cur)]
        return Shared(ring, np.pad(self.data, pad))

    def __repr__(self):
        return f"Shared({self.ring!r}, N={self.N}, batch={self.batch})"


def stack(parts: list[Shared], axis: int = 0) -> Shared:
    """Stack shared values along a new batch axis (``axis`` counts batch axes)."""
    ring = parts[0].ring
    for p in parts:
        if p.ring != ring:
            raise DomainError("cannot stack shares of different rings")
    return Shared(ring, np.stack([p.data for p in parts], axis=1 + axis))


def concat(parts: list[Shared]) -> Shared:
    ring = parts[0].ring
    return Shared(ring, np.concatenate([p.data for p in parts], axis=1))


class Dealer:
    """Trusted third party with its own replayable stream."""

    def __init__(self, master_seed: int, field: GF | None = None):
        self.master_seed = int(master_seed)
        self.field = field
        self.rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([self.master_seed, 0xDEA1])))

    def deal(self, secret, ring: Ring, N: int) -> Shared:
        return deal(secret, ring, N, self.rng)


def deal(secret, ring: Ring, N: int, rng) -> Shared:
    """N-1 uniform shares from ``rng``; the last share closes the sum."""
    if N < 2:
        raise DomainError("dealing needs at least two players")
    s = ring.array(secret)
    masks = ring.array(rng.integers(0, ring.q, size=(N - 1,) + s.shape))
    # 0-d object arithmetic yields bare ints, so re-wrap
    last = np.asarray(ring.sub(s, masks.sum(axis=0)), dtype=masks.dtype)
    return Shared(ring, np.concatenate([masks, last[None]], axis=0))


def reconstruct_local(shares: list[Share], N: int | None = None) -> np.ndarray:
    """Sum one share per owner; ``N`` (when known) pins the expected owner set."""
    if not shares:
        raise DomainError("no shares given")
    ring = shares[0].ring
    owners = sorted(s.owner for s in shares)
    expected = list(range(1, (N if N is not None else len(shares)) + 1))
    if owners != expected:
        raise DomainError(f"incomplete or duplicated share set: owners {owners}, expected {len(expected)}")
    if any(s.ring != ring for s in shares):
        raise DomainError("shares carry different ring tags")
    total = np.asarray(shares[0].value)
    for s in shares[1:]:
        total = total + np.asarray(s.value)
    return total % ring.q


def share_linear(a: Share, b, op: str) -> Share:
    """Owner-local add/sub of two shares, or scaling by a public ring element.

    Adding a public constant is player 1's job; others keep their share.
    """
    ring = a.ring
    if op in ("add", "sub"):
        if isinstance(b, Share):
            if b.owner != a.owner:
                raise DomainError(f"owner mismatch: {a.owner} vs {b.owner}")
            if b.ring != ring:
                raise DomainError("ring mismatch")
            v = ring.add(a.value, b.value) if op == "add" else ring.sub(a.value, b.value)
            return Share(a.owner, v, ring)
        if a.owner != 1:
            return a
        c = ring.array(b)
        return Share(1, ring.add(a.value, c) if op == "add" else ring.sub(a.value, c), ring)
    if op == "scale_public":
        c = ring.array(b)
        return Share(a.owner, ring.mul(a.value, c), ring.product)
    raise DomainError(f"unknown linear op {op!r}")


def _powers(q: int, alpha: int, k: int, dtype) -> np.ndarray:
    p = [1]
    for _ in range(k - 1):
        p.append(p[-1] * alpha % q)
    return np.array(p, dtype=dtype)


def eval_coeffs(data: np.ndarray, alphas, q: int) -> np.ndarray:
    """Evaluate coefficient vectors (last axis) at each public point.

    Output replaces the coefficient axis with one value per point, placed
    as a new axis just before the entry axes ``(n, n)``.
    """
    alphas = [int(a) % q for a in alphas]
    k = data.shape[-1]
    V = np.stack([_powers(q, a, k, data.dtype) for a in alphas])  # (P, k)
    # (..., n, n, k) x (P, k) -> (..., P, n, n)
    out = np.einsum("...ijk,pk->...pij", data, V) if data.dtype != object else _obj_eval(data, V)
    return out % q


def _obj_eval(data, V):
    vals = np.tensordot(data, V.T, axes=([-1], [0]))  # (..., n, n, P)
    return np.moveaxis(vals, -1, -3)


def share_polymatrix_eval(a, alpha) -> "Shared | Share":
    """Local evaluation of a shared polynomial matrix at a public point."""
    ring = a.ring
    if not (isinstance(ring, MatRing) and ring.base.kind in ("poly", "series")):
        raise DomainError("expected a polynomial-matrix share")
    target = MatRing(FieldRing(ring.field), ring.n)
    count_ops(2 * ring.n * ring.n * ring.shape[-1])
    if isinstance(a, Share):
        v = eval_coeffs(np.asarray(a.value), [alpha], ring.q)[0]
        return Share(a.owner, v, target)
    return Shared(target, eval_coeffs(a.data, [alpha], ring.q)[..., 0, :, :])


def interpolation_matrix(field: GF, xs, dtype) -> np.ndarray:
    """Row j holds the coefficients of the Lagrange basis polynomial for xs[j]."""
    basis = lagrange_basis(field, [int(x) % field.q for x in xs])
    return np.array([b.padded(len(xs)) for b in basis], dtype=np.int64).astype(dtype)


def interpolate_values(values: np.ndarray, xs, field: GF, axis: int) -> np.ndarray:
    """Interpolate along ``axis`` (one slot per abscissa); coefficients go last."""
    q = field.q
    if len(set(int(x) % q for x in xs)) != len(xs):
        raise DomainError("duplicate abscissae")
    Lm = interpolation_matrix(field, xs, values.dtype)  # (P, P)
    v = np.moveaxis(values, axis, -1)
    return np.tensordot(v, Lm, axes=([-1], [0])) % q if values.dtype == object else (v @ Lm) % q


def share_interpolate_public(points) -> "Shared | Share":
    """Local interpolation from (public x, shared field-matrix or scalar) points."""
    if not points:
        raise DomainError("need at least one point")
    xs = [int(x) for x, _ in points]
    vals = [v for _, v in points]
    ring = vals[0].ring
    field = ring.field
    if len(set(x % field.q for x in xs)) != len(xs):
        raise DomainError("duplicate abscissae")
    d = len(points) - 1
    if isinstance(ring, MatRing):
        target = MatRing(PolyRing(field, d), ring.n)
    else:
        target = PolyRing(field, d)
    count_ops(2 * ring.size * len(points) ** 2)
    if isinstance(vals[0], Share):
        owner = vals[0].owner
        if any(v.owner != owner for v in vals):
            raise DomainError("points come from different owners")
        arr = np.stack([np.asarray(v.value) for v in vals])
        return Share(owner, interpolate_values(arr, xs, field, 0), target)
    arr = np.stack([v.data for v in vals], axis=1)
    return Shared(target, interpolate_values(arr, xs, field, 1))


def rand_share(ring: Ring, ctx, batch=()) -> Shared:
    """Every player draws its share locally from its own stream; no messages."""
    return ctx.rand(ring, batch)
