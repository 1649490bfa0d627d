"""Shared determinants of constant and polynomial matrices.

Three methods for a shared A(X) of degree <= d:

* ``evalinterp``: evaluate at nd+1 public points, take constant-matrix
  determinants in parallel, interpolate.
* ``modx``: work in K[[X]]/X^{nd+1}; mask A with a random matrix of known
  shared determinant, open the product and take its determinant publicly.
  ``modx-general`` lifts the A(0)-invertible restriction through
  n+1 shifted copies z_j·I - A.
* ``modf``: the constant-matrix protocols run unchanged over K[X]/f with
  deg f = nd+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import GF, PolyMatrix, Polynomial, irreducible_poly
from .engine import ProtocolContext, par, run
from .errors import DomainError, EigenvalueAbort, SingularLeak
from .protocols import (
    _flat,
    _unflat,
    beaver_mul,
    fan_in_mul,
    inverse_field,
    inverse_series,
    rand_inv_mat,
    rand_units,
    reveal,
)
from .rings import ExtRing, FieldRing, MatRing, PolyRing, SeriesRing, berkowitz_det, count_ops, det_batch
from .sharing import Dealer, Shared, eval_coeffs, interpolate_values

MAX_EIGEN_RETRIES = 8
METHODS = ("evalinterp", "modx", "modx-general", "modf")


@dataclass
class DetResult:
    det_share: Shared
    method: str
    costs: dict = dc_field(default_factory=dict)
    modulus: Polynomial | None = None
    transcript: object = None

    def values(self) -> list[Polynomial]:
        """Reconstructed determinants, one per batch position (flattened)."""
        arr = self.det_share.reconstruct()
        F = self.det_share.ring.field
        flat = arr.reshape((-1, arr.shape[-1]))
        return [Polynomial(F, [int(c) for c in row]) for row in flat]

    def value(self) -> Polynomial:
        vals = self.values()
        if len(vals) != 1:
            raise DomainError("batched result: use values()")
        return vals[0]


# ---------------------------------------------------------------- constant matrices


def _scalar_identity(ring: MatRing, z: np.ndarray) -> np.ndarray:
    """z·I for a batch of public base-field scalars z, as ring elements."""
    n, bs = ring.n, ring.base.shape
    zc = ring.base.embed(z).reshape(z.shape + (1, 1) + bs)
    eye = np.eye(n, dtype=np.int64).reshape((n, n) + (1,) * len(bs))
    return (zc * eye) % ring.q


def _det_invertible(ctx, A: Shared):
    """Batched core: returns ([det A], leak mask). Leaky positions hold junk."""
    ring = A.ring
    batch = A.batch
    H, dH = yield from rand_inv_mat(ctx, ring.n, ring.base, batch)
    dinv, E = yield from par([inverse_field(ctx, dH), _mul_reveal(ctx, A, H, "det-mask")])
    e = det_batch(ring, E)
    leak = ~np.asarray(ring.base.is_unit(e))
    return dinv.lmul(e), leak


def _mul_reveal(ctx, A: Shared, H: Shared, tag: str):
    E = yield from beaver_mul(ctx, A, H, tag=tag)
    return (yield from reveal(ctx, E, tag=tag))


def det_field_invertible(ctx, A: Shared):
    """[det A] for invertible shared A over GF(q) or K[X]/f.

    Opens E = A·H for a random invertible H with shared determinant, so a
    zero det E reveals that A is singular: SingularLeak.
    """
    out, leak = yield from _det_invertible(ctx, A)
    if leak.any():
        ctx.note_leak("singular")
        raise SingularLeak("matrix is singular", indices=np.flatnonzero(leak).tolist())
    return out


def _distinct_rows(rng, q: int, rows: int, k: int) -> np.ndarray:
    """rows x k public field elements, pairwise distinct within each row."""
    if k > q:
        raise DomainError(f"need {k} distinct points but q={q}")
    z = rng.integers(0, q, size=(rows, k), dtype=np.int64)
    while True:
        s = np.sort(z, axis=1)
        dup = (s[:, 1:] == s[:, :-1]).any(axis=1)
        if not dup.any():
            return z
        z[dup] = rng.integers(0, q, size=(int(dup.sum()), k), dtype=np.int64)


def _fresh_point(rng, q: int, taken) -> int:
    while True:
        v = int(rng.integers(0, q))
        if v not in taken:
            return v


def _lagrange_at_zero(z: np.ndarray, q: int, dtype) -> np.ndarray:
    """l_j(0) = prod_{k != j} (0 - z_k)/(z_j - z_k), row-wise over a batch."""
    fr = FieldRing(GF(q))
    z = z.astype(object) if dtype is object else z.astype(np.int64)
    B, k = z.shape
    num = np.ones((B, k), dtype=z.dtype)
    den = np.ones((B, k), dtype=z.dtype)
    for j in range(k):
        for i in range(k):
            if i != j:
                num[:, j] = num[:, j] * ((-z[:, i]) % q) % q
                den[:, j] = den[:, j] * ((z[:, j] - z[:, i]) % q) % q
    count_ops(2 * B * k * k)
    return fr.mul(num, fr.inv(den))


def _shifted(A: Shared, ring: MatRing, zI: np.ndarray) -> Shared:
    """[z_j·I - A] for every j, with j as a new last batch axis."""
    k = zI.shape[-len(ring.shape) - 1]
    data = np.expand_dims(A.data, A.data.ndim - len(ring.shape))
    data = np.broadcast_to(data, A.data.shape[: A.data.ndim - len(ring.shape)] + (k,) + ring.shape)
    return Shared(ring, data).__neg__().add_public(zI)


def det_field_general(ctx, A: Shared, max_retries: int = MAX_EIGEN_RETRIES):
    """[det A] for any shared A over GF(q) or K[X]/f (q > n).

    det(zI - A) is monic of degree n in z, so its value at 0, which is
    (-1)^n det A, is a public linear combination of its values at n+1
    distinct public points. Each shifted copy goes through the invertible
    protocol in parallel; a point that hits an eigenvalue is redrawn.
    """
    ring = A.ring
    n, q = ring.n, ctx.q
    if q <= n:
        raise DomainError(f"q={q} must exceed n={n}")
    batch = A.batch
    A = _flat(A)
    B = A.batch[0]
    z = _distinct_rows(ctx.public, q, B, n + 1)
    zI = _scalar_identity(ring, z)  # (B, n+1, n, n)+base
    Mz = _shifted(A, ring, zI)
    dets, leak = yield from _det_invertible(ctx, Mz)
    tries = np.zeros_like(leak, dtype=int)
    rc = ctx.retrying()
    while leak.any():
        bi, bj = np.nonzero(leak)
        if (tries[bi, bj] >= max_retries).any():
            raise EigenvalueAbort(f"no eigenvalue-free point after {max_retries} redraws", indices=bi.tolist())
        ctx.note_leak("eigenvalue")
        ctx.note_retry(len(bi))
        tries[bi, bj] += 1
        for b, j in zip(bi, bj):
            z[b, j] = _fresh_point(ctx.public, q, set(int(v) for v in z[b]))
        zI_new = _scalar_identity(ring, z[bi, bj])
        M_new = (-A[bi]).add_public(zI_new)
        d_new, l_new = yield from _det_invertible(rc, M_new)
        dd = np.array(dets.data)
        dd[:, bi, bj] = d_new.data
        dets = Shared(dets.ring, dd)
        leak[bi, bj] = l_new
    lz = _lagrange_at_zero(z, q, ring.dtype)  # (B, n+1)
    base = ring.base
    coef = lz.reshape(lz.shape + (1,) * len(base.shape))
    total = (dets.data * coef).sum(axis=2) % q
    if n % 2:
        total = (-total) % q
    count_ops(2 * B * (n + 1) * base.size)
    return _unflat(Shared(base, total), batch)


# ---------------------------------------------------------------- evaluation / interpolation


def det_eval_interpol(ctx, A: Shared):
    """[det A(X)] via nd+1 evaluations at 0..nd and local interpolation."""
    ring = A.ring
    n, d = ring.n, ring.base.d
    nd = n * d
    q = ctx.q
    if q <= nd or q <= n:
        raise DomainError(f"q={q} too small: need q > nd = {nd} and q > n = {n}")
    pts = list(range(nd + 1))
    mat = MatRing(FieldRing(ctx.field), n)
    count_ops(2 * A.count * (nd + 1) * n * n * (d + 1))
    evals = Shared(mat, eval_coeffs(A.data, pts, q))  # batch + (nd+1,)
    dets = yield from det_field_general(ctx, evals)
    count_ops(2 * A.count * (nd + 1) ** 2)
    coeffs = interpolate_values(dets.data, pts, ctx.field, dets.data.ndim - 1)
    return Shared(PolyRing(ctx.field, nd), coeffs)


# ---------------------------------------------------------------- mod X^{nd+1}


def _series_matrix(field, n: int, m: int) -> MatRing:
    return MatRing(SeriesRing(field, m), n)


def rand_mat_poly_det(ctx, n: int, nd: int, batch=()):
    """Mask pair (H, [det H]) over K[[X]]/X^{nd+1}.

    U, L triangular with unit diagonals u_i, l_i; H = U·L uses one
    polynomial-matrix triple (exact product, then truncated) and the
    determinant is the fan-in product of the 2n diagonal units.
    """
    batch = tuple(batch)
    m = nd + 1
    F = ctx.field
    S = SeriesRing(F, m)
    units = yield from rand_units(ctx, S, batch + (2 * n,))
    from .protocols import _take, _triangular

    U = _triangular(ctx, S, n, batch, _take(units, slice(0, n)), True)
    L = _triangular(ctx, S, n, batch, _take(units, slice(n, 2 * n)), False)
    pm = MatRing(PolyRing(F, nd), n)
    Hfull, dH = yield from par(
        [beaver_mul(ctx, U.with_ring(pm), L.with_ring(pm), tag="maskpoly"), fan_in_mul(ctx, units)]
    )
    H = Hfull.resize(_series_matrix(F, n, m))
    return H, dH


def _det_modx_core(ctx, A: Shared, nd: int):
    """Batched DetInv core; returns ([det], leak mask)."""
    ring = A.ring
    n = ring.n
    F = ctx.field
    m = nd + 1
    H, dH = yield from rand_mat_poly_det(ctx, n, nd, A.batch)
    pm = MatRing(PolyRing(F, nd), n)
    sm = _series_matrix(F, n, m)
    Ap = A.resize(pm)
    dinv, E = yield from par([inverse_series(ctx, dH), _masked_open(ctx, Ap, H.with_ring(pm), sm)])
    e = berkowitz_det(sm, E)
    leak = ~np.asarray(sm.base.is_unit(e))
    return dinv.lmul(e), leak


def _masked_open(ctx, A: Shared, H: Shared, sm: MatRing):
    E = yield from beaver_mul(ctx, A, H, tag="detinv-mask")
    E = E.resize(sm)
    return (yield from reveal(ctx, E, tag="detinv-mask"))


def det_modx(ctx, A: Shared):
    """DetInv: [det A(X)] for A with invertible A(0), as a series mod X^{nd+1}.

    The opened E = A·H reveals whether A(0) is singular: SingularLeak.
    """
    ring = A.ring
    nd = ring.n * ring.base.d
    out, leak = yield from _det_modx_core(ctx, A, nd)
    if leak.any():
        ctx.note_leak("singular")
        raise SingularLeak("constant coefficient is singular", indices=np.flatnonzero(leak).tolist())
    return out


def _series_points(rng, q: int, B: int, k: int, m: int, dtype) -> np.ndarray:
    """B x k public series with pairwise-distinct constant terms."""
    z = rng.integers(0, q, size=(B, k, m), dtype=np.int64)
    z[..., 0] = _distinct_rows(rng, q, B, k)
    return z.astype(object) if dtype is object else z


def _series_lagrange_at_zero(S: SeriesRing, z: np.ndarray) -> np.ndarray:
    """l_j = prod_{k != j} (-z_k)·(z_j - z_k)^-1 in the series ring."""
    B, k = z.shape[:2]
    num = np.broadcast_to(S.one(), (B, k) + S.shape).copy()
    den = np.broadcast_to(S.one(), (B, k) + S.shape).copy()
    for j in range(k):
        for i in range(k):
            if i != j:
                num[:, j] = S.mul(num[:, j], S.neg(z[:, i]))
                den[:, j] = S.mul(den[:, j], S.sub(z[:, j], z[:, i]))
    count_ops(2 * B * k * k * S.mul_cost)
    return S.mul(num, S.inv(den))


def det_modx_general(ctx, A: Shared, reveal_z: bool = False, max_retries: int = MAX_EIGEN_RETRIES):
    """[det A(X)] for any shared A, through n+1 parallel DetInv runs on z_j·I - A.

    The z_j are public series with distinct constant terms, so all
    differences z_j - z_k are units and the Lagrange weights exist in the
    series ring. With ``reveal_z`` the players draw and open them instead of
    taking them from the public coin (one extra round).
    """
    ring = A.ring
    n, d = ring.n, ring.base.d
    nd = n * d
    m = nd + 1
    q = ctx.q
    if q <= n:
        raise DomainError(f"q={q} must exceed n={n}")
    F = ctx.field
    S = SeriesRing(F, m)
    pm = MatRing(PolyRing(F, nd), n)
    batch = A.batch
    A = _flat(A.resize(pm))
    B = A.batch[0]
    if reveal_z:
        z = yield from _reveal_points(ctx, S, B, n + 1)
    else:
        z = _series_points(ctx.public, q, B, n + 1, m, ring.dtype)
    zI = _series_identity(pm, z)
    Mz = _shifted(A, pm, zI)
    dets, leak = yield from _det_modx_core(ctx, Mz, nd)
    tries = np.zeros_like(leak, dtype=int)
    rc = ctx.retrying()
    while leak.any():
        bi, bj = np.nonzero(leak)
        if (tries[bi, bj] >= max_retries).any():
            raise EigenvalueAbort(f"no eigenvalue-free point after {max_retries} redraws", indices=bi.tolist())
        ctx.note_leak("eigenvalue")
        ctx.note_retry(len(bi))
        tries[bi, bj] += 1
        z = np.array(z)
        for b, j in zip(bi, bj):
            z[b, j] = ctx.public.integers(0, q, size=m)
            z[b, j, 0] = _fresh_point(ctx.public, q, set(int(v) for v in z[b, :, 0]))
        M_new = (-A[bi]).add_public(_series_identity(pm, z[bi, bj]))
        d_new, l_new = yield from _det_modx_core(rc, M_new, nd)
        dd = np.array(dets.data)
        dd[:, bi, bj] = d_new.data
        dets = Shared(dets.ring, dd)
        leak[bi, bj] = l_new
    lz = _series_lagrange_at_zero(S, z)  # (B, n+1, m)
    total = S.mul(lz, dets.data).sum(axis=2) % q
    if n % 2:
        total = (-total) % q
    count_ops(B * (n + 1) * S.mul_cost)
    return _unflat(Shared(S, total), batch)


def _series_identity(pm: MatRing, z: np.ndarray) -> np.ndarray:
    """z·I for public series z (..., m) as polynomial-matrix constants."""
    n = pm.n
    eye = np.eye(n, dtype=np.int64).reshape(n, n, 1)
    return (z[..., None, None, :] * eye) % pm.q


def _reveal_points(ctx, S: SeriesRing, B: int, k: int):
    """Players draw shared series, open them, and redraw colliding constants."""
    zs = ctx.rand(S, (B, k))
    z = np.array((yield from reveal(ctx, zs, tag="z-points")))
    rc = ctx.retrying()
    while True:
        c = np.sort(z[..., 0], axis=1)
        dup_rows = np.nonzero((c[:, 1:] == c[:, :-1]).any(axis=1))[0]
        if not len(dup_rows):
            return z
        ctx.note_retry(len(dup_rows))
        fresh = rc.rand(S, (len(dup_rows), k))
        z[dup_rows] = yield from reveal(rc, fresh, tag="z-points")


# ---------------------------------------------------------------- mod f


def det_modf(ctx, A: Shared, f: Polynomial | None = None):
    """[det A(X)] through K[X]/f with f irreducible of degree nd+1.

    Entry shares are read as residues (deg < nd+1 already), the general
    constant-matrix protocol runs over the extension field, and the
    resulting residue is the determinant itself since its degree is <= nd.
    """
    ring = A.ring
    n, d = ring.n, ring.base.d
    nd = n * d
    F = ctx.field
    if f is None:
        f = irreducible_poly(F, nd + 1, ctx.public)
    elif f.degree != nd + 1:
        raise DomainError("modulus degree must be nd+1")
    E = ExtRing(F, f)
    em = MatRing(E, n)
    Ae = A.resize(MatRing(PolyRing(F, nd), n)).with_ring(em)
    det = yield from det_field_general(ctx, Ae)
    return det.with_ring(PolyRing(F, nd))


# ---------------------------------------------------------------- front doors


def det_protocol(method: str):
    table = {
        "evalinterp": det_eval_interpol,
        "modx": det_modx,
        "modx-general": det_modx_general,
        "modf": det_modf,
    }
    try:
        return table[method]
    except KeyError:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None


def share_input(A, ctx: ProtocolContext) -> Shared:
    """Deal one plain PolyMatrix (or a list of them, batched) to the players."""
    mats = A if isinstance(A, (list, tuple)) else [A]
    d = max(m.d_bound for m in mats)
    n = mats[0].n
    ring = MatRing(PolyRing(ctx.field, d), n)
    secret = np.stack([ring.from_value(PolyMatrix(ctx.field, m.entries, d)) for m in mats])
    dealer = Dealer(ctx.master_seed ^ 0x1A9, ctx.field)
    shared = dealer.deal(secret, ring, ctx.N)
    return shared if isinstance(A, (list, tuple)) else shared[0]


def compute_determinant(A, method: str, N: int = 3, seed: int = 0, q: int | None = None, store=None, transcript: bool = False) -> DetResult:
    """Share A among N players, run one method, return the shared result."""
    mats = A if isinstance(A, (list, tuple)) else [A]
    field = mats[0].field if q is None else GF(q)
    ctx = ProtocolContext(field, N, seed, store=store, tag=method)
    shared = share_input(A, ctx)
    proto = det_protocol(method)
    res = run(proto, ctx, shared)
    out = res.output
    if out.ring.kind == "series":
        out = out.with_ring(PolyRing(field, out.ring.m - 1))
    costs = res.meter.snapshot() | {"transcript_digest": res.transcript.digest}
    return DetResult(out, method, costs, None, res.transcript if transcript else None)


def compare_methods(A: PolyMatrix, N: int = 3, seed: int = 0, methods=("evalinterp", "modx-general", "modf")) -> list[dict]:
    """Run several methods on the same input; they must agree exactly."""
    rows = []
    ref = None
    for method in methods:
        r = compute_determinant(A, method, N, seed)
        v = r.value()
        if ref is None:
            ref = v
        elif v != ref:
            raise AssertionError(f"{method} disagrees: {v} vs {ref}")
        rows.append({"method": method, "det": list(v.coeffs), **r.costs})
    return rows
