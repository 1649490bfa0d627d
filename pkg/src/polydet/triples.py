"""Beaver triples: trusted dealing, storage, files and interactive generation."""

from __future__ import annotations

import hashlib
import struct
from collections import Counter, deque
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .algebra import GF, Polynomial
from .errors import DomainError, PreprocessingExhausted, ProtocolBug
from .rings import ExtRing, FieldRing, MatRing, PolyRing, Ring, SeriesRing, ring_from_key
from .sharing import Shared, eval_coeffs, interpolate_values


@dataclass
class BeaverTriple:
    """Shares of (x, y, z) with x = y·z; ``ring`` is the ring of y and z."""

    x: Shared
    y: Shared
    z: Shared
    ring: Ring
    used: bool = dc_field(default=False, compare=False)

    @property
    def kind(self) -> str:
        return self.ring.kind

    def consume(self) -> "BeaverTriple":
        if self.used:
            raise ProtocolBug(f"{self.kind} triple used twice")
        self.used = True
        return self

    def check(self) -> bool:
        """Reconstruct and test the defining identity (harness use)."""
        y, z, x = self.y.reconstruct(), self.z.reconstruct(), self.x.reconstruct()
        return bool(np.array_equal(self.ring.mul(y, z) % self.ring.q, x))


def _seeded(seed_words) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(seed_words))))


def deal_arrays(ring: Ring, count: int, N: int, rng) -> tuple:
    """``count`` fresh triples of ``ring`` as (N, count, ...) share arrays."""
    y = ring.random(rng, (count,))
    z = ring.random(rng, (count,))
    x = ring.mul(y, z)
    out = []
    for secret, r in ((x, ring.product), (y, ring), (z, ring)):
        masks = r.random(rng, (N - 1, count))
        last = r.sub(secret, masks.sum(axis=0) % r.q)
        out.append(np.concatenate([masks, last[None]], axis=0))
    return tuple(out)


class TripleStore:
    """Per-kind queues of preprocessed triples.

    ``provision`` decides what happens when a queue runs dry: ``None``
    raises PreprocessingExhausted, ``"dealer"`` asks the trusted dealer for
    more (out of band, zero rounds), ``"interactive"`` runs the generation
    protocols in a separate preprocessing context with its own meter.
    """

    DEAL_CHUNK = 256

    def __init__(self, field: GF, N: int, master_seed: int = 0, provision: str | None = "dealer"):
        if provision not in (None, "dealer", "interactive"):
            raise DomainError(f"unknown provisioning mode {provision!r}")
        self.field = field
        self.N = N
        self.provision = provision
        self.rng = _seeded([int(master_seed) & 0xFFFFFFFFFFFFFFFF, 0xDEA1E2])
        self._queues: dict[tuple, deque] = {}
        self._rings: dict[tuple, Ring] = {}
        self.consumed = Counter()
        self.dealt = Counter()
        self._pre_ctx = None

    def available(self, ring_or_key) -> int:
        key = ring_or_key.key if isinstance(ring_or_key, Ring) else tuple(ring_or_key)
        return sum(c[0].shape[1] - c[3] for c in self._queues.get(key, ()))

    def add(self, ring: Ring, x, y, z):
        """Append a batch of triples given as (N, count, ...) share arrays."""
        if y.shape[0] != self.N:
            raise DomainError("triple shares for a different player count")
        if y.shape[2:] != ring.shape or x.shape[2:] != ring.product.shape:
            raise DomainError("triple arrays do not match the ring")
        self._rings[ring.key] = ring
        self._queues.setdefault(ring.key, deque()).append([x, y, z, 0])

    def deal(self, ring: Ring, count: int) -> tuple:
        self.dealt[ring.kind] += count
        return deal_arrays(ring, count, self.N, self.rng)

    def take(self, ring: Ring, count: int) -> tuple:
        key = ring.key
        have = self.available(key)
        if have < count:
            if self.provision is None:
                raise PreprocessingExhausted(ring.kind)
            self._refill(ring, count - have)
        q = self._queues[key]
        parts = [[], [], []]
        need = count
        while need:
            chunk = q[0]
            start = chunk[3]
            k = min(need, chunk[0].shape[1] - start)
            for i in range(3):
                parts[i].append(chunk[i][:, start : start + k])
            chunk[3] += k
            need -= k
            if chunk[3] == chunk[0].shape[1]:
                q.popleft()
        self.consumed[ring.kind] += count
        if count == 0:
            return tuple(np.zeros((self.N, 0) + r.shape, dtype=np.int64) for r in (ring.product, ring, ring))
        return tuple(p[0] if len(p) == 1 else np.concatenate(p, axis=1) for p in parts)

    def _refill(self, ring: Ring, need: int):
        if self.provision == "interactive" and ring.kind in ("series", "matrix", "polymatrix"):
            arrays = self._generate(ring, need)
        else:
            small = ring.kind in ("field", "extfield")
            arrays = self.deal(ring, max(need, self.DEAL_CHUNK) if small else need)
        self.add(ring, *arrays)

    def _generate(self, ring: Ring, count: int) -> tuple:
        from .engine import ProtocolContext, run

        if self._pre_ctx is None:
            inner = TripleStore(self.field, self.N, int(self.rng.integers(2**62)), provision="dealer")
            self._pre_ctx = ProtocolContext(self.field, self.N, int(self.rng.integers(2**62)), store=inner, tag="preprocessing")
        ctx = self._pre_ctx
        if ring.kind == "series":
            t = run(bt_poly, ctx, ring.m, (count,)).output
        elif ring.kind == "matrix":
            t = run(bt_mat, ctx, ring.n, (count,)).output
        else:
            t = run(bt_polymat, ctx, ring.n, ring.base.d, (count,)).output
        return t.x.data, t.y.data, t.z.data

    @property
    def preprocessing_meter(self):
        return None if self._pre_ctx is None else self._pre_ctx.meter


# ---------------------------------------------------------------- dealer oracles


def _dealt_triple(ctx, ring: Ring, count: int) -> BeaverTriple:
    x, y, z = ctx.store.deal(ring, count)
    return BeaverTriple(Shared(ring.product, x), Shared(ring, y), Shared(ring, z), ring)


def bt_field_dealer(count: int, ctx) -> BeaverTriple:
    """``count`` field triples straight from the trusted dealer; no rounds."""
    return _dealt_triple(ctx, FieldRing(ctx.field), count)


def bt_extfield_dealer(f: Polynomial, count: int, ctx) -> BeaverTriple:
    return _dealt_triple(ctx, ExtRing(ctx.field, f), count)


# ---------------------------------------------------------------- interactive generation


def _eval_scalar(data: np.ndarray, alphas, q: int) -> np.ndarray:
    """Evaluate scalar coefficient vectors (last axis) at public points."""
    return eval_coeffs(data[..., None, None, :], alphas, q)[..., 0, 0]


def bt_poly(ctx, m: int, batch=()):
    """Series(m) triples from 2m-1 parallel field multiplications.

    y and z are random polynomials of degree < m; their values at 2m-1
    public points are multiplied pointwise, the product is interpolated
    exactly (degree <= 2m-2) and then truncated mod X^m.
    """
    from .protocols import beaver_mul

    F, q = ctx.field, ctx.q
    if q <= 2 * m:
        raise DomainError(f"q={q} too small for series length {m}")
    batch = tuple(batch)
    series = SeriesRing(F, m)
    P = 2 * m - 1
    pts = list(range(1, P + 1))
    y = ctx.rand(series, batch)
    z = ctx.rand(series, batch)
    fr = FieldRing(F)
    ye = Shared(fr, _eval_scalar(y.data, pts, q))
    ze = Shared(fr, _eval_scalar(z.data, pts, q))
    xe = yield from beaver_mul(ctx, ye, ze, tag="bt_poly")
    coeffs = interpolate_values(xe.data, pts, F, xe.data.ndim - 1)
    x = Shared(series, coeffs[..., :m])
    return BeaverTriple(x, y, z, series)


def bt_mat(ctx, n: int, batch=()):
    """Matrix triples from n^3 parallel field multiplications (schoolbook)."""
    from .protocols import beaver_mul

    F = ctx.field
    batch = tuple(batch)
    ring = MatRing(FieldRing(F), n)
    Y = ctx.rand(ring, batch)
    Z = ctx.rand(ring, batch)
    fr = FieldRing(F)
    shape = Y.data.shape[:-2] + (n, n, n)
    a = Shared(fr, np.broadcast_to(Y.data[..., :, :, None], shape))  # Y[i,k]
    b = Shared(fr, np.broadcast_to(Z.data[..., None, :, :], shape))  # Z[k,j]
    prod = yield from beaver_mul(ctx, a, b, tag="bt_mat")
    X = Shared(ring, prod.data.sum(axis=-2) % ctx.q)
    return BeaverTriple(X, Y, Z, ring)


def bt_polymat(ctx, n: int, d: int, batch=()):
    """Polynomial-matrix triples: B·C evaluated at 1..2d+1, matrix-Beaver
    multiplied pointwise in one round, then interpolated back."""
    from .protocols import beaver_mul

    F, q = ctx.field, ctx.q
    if q <= 2 * d + 1:
        raise DomainError(f"q={q} too small for degree bound {d}")
    batch = tuple(batch)
    ring = MatRing(PolyRing(F, d), n)
    mat = MatRing(FieldRing(F), n)
    pts = list(range(1, 2 * d + 2))
    B = ctx.rand(ring, batch)
    C = ctx.rand(ring, batch)
    Be = Shared(mat, eval_coeffs(B.data, pts, q))
    Ce = Shared(mat, eval_coeffs(C.data, pts, q))
    Ae = yield from beaver_mul(ctx, Be, Ce, tag="bt_polymat")
    coeffs = interpolate_values(Ae.data, pts, F, Ae.data.ndim - 3)
    A = Shared(ring.product, coeffs)
    return BeaverTriple(A, B, C, ring)


# ---------------------------------------------------------------- file format

MAGIC = b"PDTS"
VERSION = 1
KIND_CODES = {"field": 1, "series": 2, "matrix": 3, "polymatrix": 4, "extfield": 5, "extmatrix": 6, "seriesmatrix": 7}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}


class ChecksumError(DomainError):
    pass


def save_triples(path, ring: Ring, N: int, x, y, z) -> None:
    """Header (q, N, kind, params, count), body of u64 LE share words, sha256 trailer."""
    params = ring.params
    count = y.shape[1]
    head = MAGIC + struct.pack("<HQHBH", VERSION, ring.q, N, KIND_CODES[ring.kind], len(params))
    head += struct.pack(f"<{len(params)}Q", *params) + struct.pack("<Q", count)
    body = b"".join(np.array(a, dtype=np.uint64).astype("<u8").tobytes() for a in (x, y, z))
    blob = head + body
    Path(path).write_bytes(blob + hashlib.sha256(blob).digest())


def _parse(blob: bytes):
    if len(blob) < 32 + 4 or blob[:4] != MAGIC:
        raise ChecksumError("not a triple file (bad magic or truncated)")
    payload, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise ChecksumError("checksum mismatch: file is corrupt or truncated")
    off = 4
    version, q, N, code, npar = struct.unpack_from("<HQHBH", payload, off)
    off += struct.calcsize("<HQHBH")
    if version != VERSION:
        raise DomainError(f"unsupported triple file version {version}")
    params = struct.unpack_from(f"<{npar}Q", payload, off)
    off += 8 * npar
    (count,) = struct.unpack_from("<Q", payload, off)
    off += 8
    return q, N, KIND_NAMES[code], tuple(params), count, payload[off:]


def load_triples(path):
    """Returns (ring, N, x, y, z) with (N, count, ...) share arrays."""
    q, N, kind, params, count, body = _parse(Path(path).read_bytes())
    F = GF(q)
    ring = ring_from_key(F, (kind,) + params)
    dtype = ring.dtype
    arrays = []
    off = 0
    for r in (ring.product, ring, ring):
        shape = (N, count) + r.shape
        size = int(np.prod(shape))
        words = np.frombuffer(body, dtype="<u8", count=size, offset=off)
        off += 8 * size
        a = words.astype(np.int64) if dtype is not object else np.array([int(w) for w in words], dtype=object)
        arrays.append(a.reshape(shape))
    if off != len(body):
        raise ChecksumError("body length does not match header")
    return (ring, N, *arrays)


def inspect_triples(path, verify: bool = False) -> dict:
    ring, N, x, y, z = load_triples(path)
    info = {"q": ring.q, "N": N, "kind": ring.kind, "params": list(ring.params), "count": int(y.shape[1])}
    if verify:
        t = BeaverTriple(Shared(ring.product, x), Shared(ring, y), Shared(ring, z), ring)
        info["verified"] = t.check()
    return info


def generate_file(path, ring: Ring, N: int, count: int, seed: int) -> dict:
    store = TripleStore(ring.field, N, master_seed=seed)
    x, y, z = store.deal(ring, count)
    save_triples(path, ring, N, x, y, z)
    return {"q": ring.q, "N": N, "kind": ring.kind, "params": list(ring.params), "count": count}
