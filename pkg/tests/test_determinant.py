import numpy as np
import pytest

from polydet.algebra import GF, Matrix, PolyMatrix, Polynomial, det_reference_field, det_reference_polymat
from polydet.determinant import (
    compare_methods,
    compute_determinant,
    det_field_general,
    det_field_invertible,
    det_modf,
    det_modx,
    rand_mat_poly_det,
)
from polydet.engine import ProtocolContext, run
from polydet.errors import DomainError, SingularLeak
from polydet.rings import FieldRing, MatRing, SeriesRing, berkowitz_det
from polydet.sharing import Dealer

from conftest import random_polymatrix, worked_example

GENERAL = ("evalinterp", "modx-general", "modf")
ALL = ("evalinterp", "modx", "modx-general", "modf")


def shared_matrices(ctx, mats):
    R = MatRing(FieldRing(ctx.field), mats.shape[-1])
    return Dealer(1).deal(mats, R, ctx.N)


def identity(F, n, d=0):
    return PolyMatrix(F, [[Polynomial(F, [int(i == j)]) for j in range(n)] for i in range(n)], d)


# ---------------------------------------------------------------- constant matrices


def test_det_field_invertible_matches_oracle():
    F = GF(101)
    rng = np.random.default_rng(1)
    mats = rng.integers(0, 101, size=(300, 3, 3))
    keep = np.array([det_reference_field(Matrix(F, m.tolist())) != 0 for m in mats])
    mats = mats[keep][:200]
    ctx = ProtocolContext(F, 3, master_seed=2)
    res = run(det_field_invertible, ctx, shared_matrices(ctx, mats))
    got = res.output.reconstruct()
    assert [int(g) for g in got] == [det_reference_field(Matrix(F, m.tolist())) for m in mats]
    assert res.meter.rounds == 9


def test_det_field_invertible_identity_and_singular():
    F = GF(101)
    ctx = ProtocolContext(F, 3)
    assert int(run(det_field_invertible, ctx, shared_matrices(ctx, np.eye(3, dtype=np.int64))).output.reconstruct()) == 1
    ctx = ProtocolContext(F, 3)
    with pytest.raises(SingularLeak):
        run(det_field_invertible, ctx, shared_matrices(ctx, np.array([[1, 2], [2, 4]])))
    assert "singular" in ctx.meter.leaks


def test_det_field_general_any_rank():
    F = GF(101)
    rng = np.random.default_rng(3)
    mats = rng.integers(0, 101, size=(200, 3, 3))
    mats[:20, 2] = mats[:20, 0]  # rank-deficient block
    ctx = ProtocolContext(F, 3, master_seed=5)
    got = run(det_field_general, ctx, shared_matrices(ctx, mats)).output.reconstruct()
    assert [int(g) for g in got] == [det_reference_field(Matrix(F, m.tolist())) for m in mats]
    assert all(int(g) == 0 for g in got[:20])
    assert ctx.meter.rounds == 9


def test_det_field_general_scalar():
    F = GF(101)
    ctx = ProtocolContext(F, 3)
    assert int(run(det_field_general, ctx, shared_matrices(ctx, np.array([[37]]))).output.reconstruct()) == 37


def test_det_field_general_needs_q_above_n():
    ctx = ProtocolContext(GF(3), 3)
    with pytest.raises(DomainError):
        run(det_field_general, ctx, shared_matrices(ctx, np.eye(3, dtype=np.int64)))


# ---------------------------------------------------------------- polynomial matrices


@pytest.mark.parametrize("method", ALL)
def test_worked_example_all_methods(method):
    F = GF(101)
    A = worked_example(F)
    res = compute_determinant(A, method, N=3, seed=1)
    assert res.value() == det_reference_polymat(A)
    assert res.value() == Polynomial(F, [29, 24, 35, 69, 9, 8])
    assert res.costs["rounds"] == 9


@pytest.mark.parametrize("method", ALL)
def test_identity_gives_one(method):
    F = GF(101)
    for n, d in [(1, 0), (2, 1), (3, 2)]:
        assert compute_determinant(identity(F, n, d), method).value() == Polynomial(F, [1])


@pytest.mark.parametrize("method", GENERAL)
def test_x_times_identity(method):
    F = GF(101)
    for n in (2, 3):
        X = PolyMatrix(F, [[Polynomial(F, [0, 1] if i == j else []) for j in range(n)] for i in range(n)], 1)
        assert compute_determinant(X, method).value() == Polynomial(F, [0] * n + [1])


@pytest.mark.parametrize("method", GENERAL)
def test_zero_and_permutation(method):
    F = GF(101)
    Z = PolyMatrix(F, [[[], []], [[], []]], 1)
    assert compute_determinant(Z, method).value().is_zero()
    XZ = PolyMatrix(F, [[[0, 1], []], [[], []]], 1)
    assert compute_determinant(XZ, method).value().is_zero()
    P = PolyMatrix(F, [[[], [1]], [[1], []]], 0)
    assert compute_determinant(P, method).value() == Polynomial(F, [100])


def test_modx_on_constant_invertible_inputs():
    F = GF(101)
    rng = np.random.default_rng(4)
    mats = []
    for _ in range(100):
        M = rng.integers(0, 101, size=(2, 2, 2))
        M[..., 0] = np.eye(2, dtype=np.int64)
        mats.append(PolyMatrix(F, [[Polynomial(F, M[i, j].tolist()) for j in range(2)] for i in range(2)], 1))
    res = compute_determinant(mats, "modx", N=3, seed=2)
    assert res.values() == [det_reference_polymat(A) for A in mats]
    assert res.costs["triples"] == {"field": 100 * 5, "series": 100 * 15, "polymatrix": 100 * 2}


def test_modx_leaks_on_singular_constant_term():
    F = GF(101)
    A = PolyMatrix(F, [[[1, 2], [2, 4]], [[1, 6], [2, 8]]], 1)
    with pytest.raises(SingularLeak):
        compute_determinant(A, "modx")


def test_modx_general_mixed_constant_terms_q257():
    F = GF(257)
    rng = np.random.default_rng(5)
    mats = []
    for k in range(100):
        A = random_polymatrix(F, 2, 2, rng)
        if k % 2:
            c = [[A[i, j].padded(3) for j in range(2)] for i in range(2)]
            c[1][0][0], c[1][1][0] = c[0][0][0], c[0][1][0]  # singular A(0)
            A = PolyMatrix(F, c, 2)
        mats.append(A)
    res = compute_determinant(mats, "modx-general", N=3, seed=4)
    assert res.values() == [det_reference_polymat(A) for A in mats]


def test_modx_general_reveal_variant():
    F = GF(101)
    A = worked_example(F)
    ctx = ProtocolContext(F, 3, master_seed=3)
    from polydet.determinant import det_modx_general, share_input

    out = run(det_modx_general, ctx, share_input(A, ctx), True).output
    assert Polynomial(F, [int(v) for v in out.reconstruct()]) == det_reference_polymat(A)
    assert ctx.meter.rounds == 10


def test_modf_constant_matrix_agrees_with_field_general():
    F = GF(101)
    rng = np.random.default_rng(6)
    mats = rng.integers(0, 101, size=(30, 3, 3))
    ctx = ProtocolContext(F, 3, master_seed=1)
    ref = run(det_field_general, ctx, shared_matrices(ctx, mats)).output.reconstruct()
    pm = [PolyMatrix(F, [[Polynomial(F, [int(v)]) for v in r] for r in m], 0) for m in mats]
    got = compute_determinant(pm, "modf", N=3, seed=1).values()
    assert [p.coeff(0) for p in got] == [int(v) for v in ref]


def test_modf_uses_extension_kinds_only():
    F = GF(101)
    res = compute_determinant(worked_example(F), "modf")
    assert set(res.costs["triples"]) == {"extfield", "extmatrix"}


def test_modf_rejects_wrong_modulus_degree():
    F = GF(101)
    ctx = ProtocolContext(F, 3)
    from polydet.determinant import share_input

    with pytest.raises(DomainError):
        run(det_modf, ctx, share_input(worked_example(F), ctx), Polynomial(F, [1, 0, 1]))


def test_evalinterp_needs_enough_points():
    F = GF(5)
    A = PolyMatrix(F, [[[1, 1, 1], [0]], [[0], [1, 0, 1]]], 3)  # nd = 6 >= q
    with pytest.raises(DomainError):
        compute_determinant(A, "evalinterp")


# ---------------------------------------------------------------- masks


def test_mask_pair_determinant():
    F = GF(101)
    n, d = 2, 1
    nd = n * d
    ctx = ProtocolContext(F, 3, master_seed=8)
    res = run(rand_mat_poly_det, ctx, n, nd, (100,))
    H, dH = res.output
    sm = MatRing(SeriesRing(F, nd + 1), n)
    Hs, ds = H.reconstruct(), dH.reconstruct()
    assert np.array_equal(berkowitz_det(sm, Hs), ds)
    for h in Hs:
        assert det_reference_field(Matrix(F, h[..., 0].tolist())) != 0
    assert res.meter.rounds == 7
    assert res.meter.triples == {"field": 100 * 2 * n, "series": 100 * (6 * n + 2), "polymatrix": 100}


def test_mask_pair_size_one():
    F = GF(101)
    ctx = ProtocolContext(F, 3)
    H, dH = run(rand_mat_poly_det, ctx, 1, 3, (20,)).output
    assert np.array_equal(H.reconstruct()[:, 0, 0], dH.reconstruct())


def test_leak_confinement():
    F = GF(101)
    rng = np.random.default_rng(9)
    good, bad = [], []
    while len(good) < 1000 or len(bad) < 1000:
        A = random_polymatrix(F, 2, 1, rng)
        c0 = det_reference_field(Matrix(F, [[A[i, j].coeff(0) for j in range(2)] for i in range(2)]))
        (good if c0 else bad).append(A)
    res = compute_determinant(good[:1000], "modx", seed=3)
    assert res.values() == [det_reference_polymat(A) for A in good[:1000]]
    leaked = 0
    for k in range(0, 1000, 100):
        ctx = ProtocolContext(F, 3, master_seed=k)
        from polydet.determinant import share_input

        try:
            run(det_modx, ctx, share_input(bad[k : k + 100], ctx))
        except SingularLeak as err:
            leaked += len(err.indices)
    assert leaked == 1000


def test_compare_methods_agree():
    F = GF(101)
    A = random_polymatrix(F, 3, 2, np.random.default_rng(11))
    rows = compare_methods(A, N=3, seed=2)
    assert len({tuple(r["det"]) for r in rows}) == 1
    by = {r["method"]: r["triples"] for r in rows}
    assert "polymatrix" not in by["evalinterp"]
    assert not {"extfield", "extmatrix"} & set(by["modx-general"])


def test_result_degree_never_exceeds_bound():
    F = GF(101)
    rng = np.random.default_rng(13)
    for n, d in [(1, 3), (2, 2), (3, 1), (4, 1)]:
        mats = [random_polymatrix(F, n, d, rng) for _ in range(20)]
        for method in GENERAL:
            assert all(p.degree <= n * d for p in compute_determinant(mats, method, seed=1).values())


def test_unknown_method():
    with pytest.raises(DomainError):
        compute_determinant(worked_example(GF(101)), "leverrier")
