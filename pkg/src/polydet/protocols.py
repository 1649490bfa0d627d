"""Interactive building blocks.

Every protocol here is a generator to be driven by ``engine.run`` (or
composed with ``yield from`` / ``engine.par``). Inputs may carry batch
axes; each batch position is an independent instance sharing the same
rounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import Round, par
from .errors import DomainError, NonUnit, ZeroSecret
from .rings import FieldRing, MatRing, PolyRing, Ring, SeriesRing, count_ops
from .sharing import Shared

MAX_INVERSE_TRIES = 8


@dataclass(frozen=True)
class MaskedRevealRecord:
    tag: str
    d: np.ndarray
    e: np.ndarray


def reveal(ctx, *values: Shared, tag: str = "reveal"):
    """Open shared values in one round; returns one array per value
    (or the bare array when a single value is opened)."""
    if not values:
        raise DomainError("nothing to reveal")
    out = yield Round([(tag, v) for v in values], ctx.retry)
    return out[0] if len(values) == 1 else list(out)


def beaver_mul(ctx, a: Shared, b: Shared, triple=None, tag: str = "mul", record: list | None = None):
    """[a·b] from one triple of a's ring: open d = a - y and e = b - z together,
    then x + y·e + d·z, with d·e added by player 1 only. Factor order is
    kept, so non-commutative rings work unchanged."""
    ring = a.ring
    if b.ring != ring:
        raise DomainError(f"operands live in different rings: {ring!r} vs {b.ring!r}")
    batch = np.broadcast_shapes(a.batch, b.batch)
    t = ctx.take_triple(ring, batch) if triple is None else triple
    if t.ring != ring:
        raise DomainError(f"triple kind {t.kind!r} does not match ring {ring.kind!r}")
    t.consume()
    d, e = yield from reveal(ctx, a - t.y, b - t.z, tag=tag)
    if record is not None:
        record.append(MaskedRevealRecord(tag, d, e))
    out = t.x + t.y.rmul(e) + t.z.lmul(d)
    count_ops(ring.mul_cost * max(int(np.prod(batch)), 1))
    return out.add_public(ring.mul(d, e))


def mul_polymat(ctx, a: Shared, b: Shared, tag: str = "mulpolymat"):
    """Product of shared polynomial matrices with a common degree bound."""
    ra, rb = a.ring, b.ring
    if not (isinstance(ra, MatRing) and ra.base.kind == "poly" and isinstance(rb, MatRing) and rb.base.kind == "poly"):
        raise DomainError("mul_polymat expects polynomial-matrix shares")
    if ra.n != rb.n:
        raise DomainError("dimension mismatch")
    d = max(ra.base.d, rb.base.d)
    ring = MatRing(PolyRing(ctx.field, d), ra.n)
    return (yield from beaver_mul(ctx, a.resize(ring), b.resize(ring), tag=tag))


# ---------------------------------------------------------------- helpers


def _flat(a: Shared) -> Shared:
    return Shared(a.ring, a.data.reshape((a.N, a.count) + a.ring.shape))


def _unflat(a: Shared, batch) -> Shared:
    return Shared(a.ring, a.data.reshape((a.N,) + tuple(batch) + a.ring.shape))


def _put(a: Shared, idx, part: Shared) -> Shared:
    """Copy of flat ``a`` with batch positions ``idx`` replaced."""
    data = np.array(a.data)
    data[:, idx] = part.data
    return Shared(a.ring, data)


def _constant_terms(u: Shared) -> Shared:
    return Shared(FieldRing(u.ring.field), u.data[..., 0])


def _test_ring_value(u: Shared) -> Shared:
    """What gets masked to test unit-ness: the constant term for series."""
    return _constant_terms(u) if u.ring.kind == "series" else u


def _unit_test(ctx, u: Shared, tag: str = "unit-test"):
    """Open u·s for a fresh uniform s; True where that product is a unit.

    A pass certifies u is a unit. A fail may come from s alone; callers
    simply redraw, which keeps accepted values uniform over the units.
    """
    v = _test_ring_value(u)
    s = ctx.rand(v.ring, v.batch)
    w = yield from beaver_mul(ctx, v, s, tag=tag)
    wv = yield from reveal(ctx, w, tag=tag)
    return np.asarray(v.ring.is_unit(wv))


def rand_units(ctx, ring: Ring, batch=()):
    """Uniform shared units of a field, extension field or series ring.

    Two rounds and one test triple per element; failed positions are
    redrawn in retry rounds until every position passes.
    """
    batch = tuple(batch)
    u = _flat(ctx.rand(ring, batch))
    ok = (yield from _unit_test(ctx, u)).reshape(-1)
    rc = ctx.retrying()
    while not ok.all():
        idx = np.nonzero(~ok)[0]
        ctx.note_retry(len(idx))
        fresh = rc.rand(ring, (len(idx),))
        ok_f = (yield from _unit_test(rc, fresh)).reshape(-1)
        u = _put(u, idx, fresh)
        ok[idx] = ok_f
    return _unflat(u, batch)


def rand_nonzero(ctx, batch=()):
    return (yield from rand_units(ctx, FieldRing(ctx.field), batch))


def rand_poly_inv(ctx, m: int, batch=()):
    """Uniform unit of K[[X]]/X^m: the constant term is tested under a mask."""
    return (yield from rand_units(ctx, SeriesRing(ctx.field, m), batch))


def _mul_open(ctx, a: Shared, r: Shared, tag: str):
    w = yield from beaver_mul(ctx, a, r, tag=tag)
    return (yield from reveal(ctx, w, tag=tag))


def inverse_field(ctx, a: Shared, max_tries: int = MAX_INVERSE_TRIES):
    """[a^-1] for a in GF(q) or K[X]/f: open w = a·r, output w^-1·[r].

    A zero w is retried with a fresh r on that position only; a position
    still zero after ``max_tries`` redraws raises ZeroSecret.
    """
    ring = a.ring
    batch = a.batch
    a = _flat(a)
    r = _flat(ctx.rand(ring, batch))
    w = (yield from _mul_open(ctx, a, r, "inverse")).reshape((-1,) + ring.shape)
    ok = np.asarray(ring.is_unit(w)).reshape(-1)
    rc = ctx.retrying()
    tries = 0
    while not ok.all():
        idx = np.nonzero(~ok)[0]
        if tries == max_tries:
            ctx.note_leak("zero-secret")
            raise ZeroSecret("secret is zero", indices=idx.tolist())
        tries += 1
        ctx.note_retry(len(idx))
        fresh = rc.rand(ring, (len(idx),))
        w_f = yield from _mul_open(rc, a[idx], fresh, "inverse")
        r = _put(r, idx, fresh)
        w = np.array(w)
        w[idx] = w_f
        ok[idx] = np.asarray(ring.is_unit(w_f)).reshape(-1)
    return _unflat(r.lmul(ring.inv(w)), batch)


def inverse_series(ctx, a: Shared):
    """[a^-1] for a unit a of K[[X]]/X^m via a unit mask r.

    The mask's unit test and the opening of a·r share the same two rounds.
    A non-unit opening with a certified unit mask means a itself is not a
    unit: NonUnit is raised (only unit-ness leaks).
    """
    ring = a.ring
    batch = a.batch
    a = _flat(a)
    r = _flat(ctx.rand(ring, batch))
    ok, w = yield from par([_unit_test(ctx, r), _mul_open(ctx, a, r, "inverse-series")])
    ok = ok.reshape(-1)
    w = np.asarray(w).reshape((-1,) + ring.shape)
    rc = ctx.retrying()
    while not ok.all():
        idx = np.nonzero(~ok)[0]
        ctx.note_retry(len(idx))
        fresh = rc.rand(ring, (len(idx),))
        ok_f, w_f = yield from par([_unit_test(rc, fresh), _mul_open(rc, a[idx], fresh, "inverse-series")])
        r = _put(r, idx, fresh)
        w = np.array(w)
        w[idx] = w_f
        ok[idx] = ok_f.reshape(-1)
    bad = ~np.asarray(ring.is_unit(w)).reshape(-1)
    if bad.any():
        ctx.note_leak("non-unit")
        raise NonUnit("secret series is not a unit", indices=np.nonzero(bad)[0].tolist())
    return _unflat(r.lmul(ring.inv(w)), batch)


def fan_in_mul(ctx, xs: Shared):
    """Product of shared units along the last batch axis, in five rounds.

    Masks r_0..r_t and helpers s_j give r_j^-1 = s_j·(r_j s_j)^-1 once
    r_j s_j is opened. Opening y_j = r_{j-1} x_j r_j^-1 lets everyone form
    P = r_0 (prod x) r_t^-1, and one last multiplication of r_0^-1·P with
    r_t removes the outer masks. Uses 3t+2 triples of the ring.
    """
    ring = xs.ring
    if ring.kind not in ("field", "series", "extfield"):
        raise DomainError("fan-in product needs a commutative ring with public inverses")
    if not xs.batch:
        raise DomainError("fan_in_mul multiplies along a batch axis")
    outer = xs.batch[:-1]
    t = xs.batch[-1]
    if t == 0:
        raise DomainError("empty product")
    X = Shared(ring, xs.data.reshape((xs.N, -1, t) + ring.shape))
    B = X.batch[0]
    r = ctx.rand(ring, (B, t + 1))
    s = ctx.rand(ring, (B, t + 1))
    w_sh, c_sh = yield from par(
        [beaver_mul(ctx, r, s, tag="fanin-pair"), beaver_mul(ctx, r[:, :t], X, tag="fanin-left")]
    )
    w = yield from reveal(ctx, w_sh, tag="fanin-pair")
    ok = np.asarray(ring.is_unit(w))
    rc = ctx.retrying()
    while not ok.all():
        bi, bj = np.nonzero(~ok)
        ctx.note_retry(len(bi))
        r_new = rc.rand(ring, (len(bi),))
        s_new = rc.rand(ring, (len(bi),))
        left = bj < t
        jobs = [beaver_mul(rc, r_new, s_new, tag="fanin-pair")]
        if left.any():
            jobs.append(beaver_mul(rc, r_new[np.nonzero(left)[0]], X[bi[left], bj[left]], tag="fanin-left"))
        res = yield from par(jobs)
        w_new = yield from reveal(rc, res[0], tag="fanin-pair")
        rd, sd, cd = np.array(r.data), np.array(s.data), np.array(c_sh.data)
        rd[:, bi, bj] = r_new.data
        sd[:, bi, bj] = s_new.data
        if left.any():
            cd[:, bi[left], bj[left]] = res[1].data
        r, s, c_sh = Shared(ring, rd), Shared(ring, sd), Shared(ring, cd)
        w = np.array(w)
        w[bi, bj] = w_new
        ok[bi, bj] = np.asarray(ring.is_unit(w_new))
    r_inv = s.rmul(ring.inv(w))
    y_sh = yield from beaver_mul(ctx, c_sh, r_inv[:, 1:], tag="fanin-telescope")
    y = yield from reveal(ctx, y_sh, tag="fanin-telescope")
    if not np.all(ring.is_unit(y)):
        ctx.note_leak("non-unit")
        raise NonUnit("fan-in operand is not a unit")
    P = y[:, 0]
    for j in range(1, t):
        P = ring.mul(P, y[:, j])
    count_ops(max(t - 1, 0) * ring.mul_cost * B)
    out = yield from beaver_mul(ctx, r_inv[:, 0].lmul(P), r[:, t], tag="fanin-final")
    return Shared(ring, out.data.reshape((xs.N,) + outer + ring.shape))


# ---------------------------------------------------------------- random invertible matrices


def _triangular(ctx, base: Ring, n: int, batch, diag: Shared, upper: bool) -> Shared:
    """Assemble a shared triangular matrix from given diagonal units and
    locally drawn uniform strict-triangle entries."""
    ring = MatRing(base, n)
    full = ctx.rand(ring, batch)
    data = np.array(full.data)
    keep = np.triu(np.ones((n, n), dtype=bool), 1) if upper else np.tril(np.ones((n, n), dtype=bool), -1)
    mask = keep.reshape((n, n) + (1,) * len(base.shape))
    data = np.where(mask, data, 0)
    ar = np.arange(n)
    tail = (slice(None),) * len(base.shape)
    data[(Ellipsis, ar, ar) + tail] = diag.data
    if data.dtype != full.data.dtype:
        data = data.astype(full.data.dtype)
    return Shared(ring, data)


def rand_inv_mat(ctx, n: int, base: Ring | None = None, batch=(), with_det: bool = True):
    """Shared H = U·L with U upper, L lower triangular and unit diagonals.

    With ``with_det`` also returns [det H] from a fan-in product of the 2n
    diagonal units (7 rounds); without it the cost is 3 rounds.
    """
    base = FieldRing(ctx.field) if base is None else base
    batch = tuple(batch)
    units = yield from rand_units(ctx, base, batch + (2 * n,))
    U = _triangular(ctx, base, n, batch, _take(units, slice(0, n)), True)
    L = _triangular(ctx, base, n, batch, _take(units, slice(n, 2 * n)), False)
    if not with_det:
        H = yield from beaver_mul(ctx, U, L, tag="randinvmat")
        return H
    H, dH = yield from par([beaver_mul(ctx, U, L, tag="randinvmat"), fan_in_mul(ctx, units)])
    return H, dH


def _take(a: Shared, sl) -> Shared:
    """Slice the last batch axis."""
    k = len(a.ring.shape)
    idx = (slice(None),) * (a.data.ndim - k - 1) + (sl,)
    return Shared(a.ring, a.data[idx])


def rand_inv_polymat(ctx, n: int, d: int, batch=()):
    """F = X·(random degree <= d-1 matrix) + G with G a random invertible
    constant matrix, so F(0) = G is invertible."""
    batch = tuple(batch)
    G = yield from rand_inv_mat(ctx, n, batch=batch, with_det=False)
    ring = MatRing(PolyRing(ctx.field, d), n)
    data = ring.zeros((ctx.N,) + batch)
    data[..., 0] = G.data
    if d >= 1:
        upper = ctx.rand(MatRing(PolyRing(ctx.field, d - 1), n), batch)
        data[..., 1:] = upper.data
    return Shared(ring, data)
