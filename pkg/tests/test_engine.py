import json

import numpy as np
import pytest

from polydet.algebra import GF
from polydet.engine import CostMeter, ProtocolContext, Round, broadcast_round, element_bits, par, run
from polydet.errors import DomainError, PreprocessingExhausted, ProtocolBug, ProtocolError
from polydet.protocols import beaver_mul, reveal
from polydet.rings import FieldRing, count_ops
from polydet.sharing import Dealer, Shared
from polydet.triples import TripleStore


def shares_of(value, ctx, ring=None, seed=1):
    ring = ring or FieldRing(ctx.field)
    return Dealer(seed).deal(value, ring, ctx.N)


def test_element_bits():
    assert element_bits(101) == 7
    assert element_bits(7) == 3
    assert element_bits(65537) == 17
    assert element_bits(2) == 1
    assert element_bits(256 + 1) == 9


def test_one_field_element_each():
    ctx = ProtocolContext(GF(101), 3)
    out = broadcast_round(ctx, {p: [("x", np.int64(p))] for p in (1, 2, 3)})
    assert ctx.meter.rounds == 1
    assert ctx.meter.bits == [7, 7, 7]
    assert out[1][0][0] == "x"


def test_empty_round_forbidden():
    ctx = ProtocolContext(GF(101), 3)
    with pytest.raises(ProtocolBug):
        broadcast_round(ctx, {})
    with pytest.raises(ProtocolBug):
        run(lambda c: (yield Round([])), ctx)


def test_absent_player_is_an_error():
    ctx = ProtocolContext(GF(101), 3)
    with pytest.raises(ProtocolError):
        broadcast_round(ctx, {1: [("x", np.int64(1))], 2: [("x", np.int64(2))]})


def test_double_submission_is_a_bug():
    ctx = ProtocolContext(GF(101), 2)
    subs = [(1, [("x", np.int64(1))]), (1, [("x", np.int64(1))]), (2, [("x", np.int64(1))])]
    with pytest.raises(ProtocolBug):
        ctx.channel.broadcast_round(subs)


def test_reveal_all_players_learn_value():
    ctx = ProtocolContext(GF(7), 3)
    res = run(reveal, ctx, shares_of(5, ctx))
    assert int(res.output) == 5
    assert res.meter.rounds == 1
    assert [e["sender"] for e in res.transcript.events] == [1, 2, 3]


def test_parallel_composition_shares_rounds():
    ctx = ProtocolContext(GF(101), 3)
    a, b = shares_of(4, ctx, seed=1), shares_of(9, ctx, seed=2)
    res = run(lambda c: (yield from par([reveal(c, a), reveal(c, b)])), ctx)
    assert [int(v) for v in res.output] == [4, 9]
    assert res.meter.rounds == 1
    assert res.meter.bits_per_player == 14


@pytest.mark.parametrize("k", [1, 4, 16])
def test_k_parallel_multiplications_take_one_round(k):
    ctx = ProtocolContext(GF(101), 3, master_seed=k)
    xs = [shares_of(i + 2, ctx, seed=i) for i in range(k)]
    ys = [shares_of(i + 5, ctx, seed=100 + i) for i in range(k)]
    res = run(lambda c: (yield from par([beaver_mul(c, x, y) for x, y in zip(xs, ys)])), ctx)
    assert [int(v.reconstruct()) for v in res.output] == [(i + 2) * (i + 5) % 101 for i in range(k)]
    assert res.meter.rounds == 1
    assert res.meter.triples["field"] == k
    assert res.meter.bits_per_player == 2 * k * 7


def test_single_instance_par_equals_direct():
    def direct(c, a, b):
        return (yield from beaver_mul(c, a, b))

    def wrapped(c, a, b):
        out = yield from par([beaver_mul(c, a, b)])
        return out[0]

    snaps = []
    for proto in (direct, wrapped):
        ctx = ProtocolContext(GF(101), 3, master_seed=5)
        run(proto, ctx, shares_of(3, ctx), shares_of(4, ctx, seed=2))
        snaps.append((ctx.meter.snapshot(), ctx.transcript.digest))
    assert snaps[0] == snaps[1]


def test_par_of_nothing_costs_nothing():
    ctx = ProtocolContext(GF(101), 3)
    res = run(lambda c: (yield from par([])), ctx)
    assert res.output == []
    assert res.meter.rounds == 0 and res.meter.bits_per_player == 0


def test_cross_instance_write_detected():
    ctx = ProtocolContext(GF(101), 3)
    shared = shares_of(1, ctx)

    def writer(c):
        yield from reveal(c, shared)
        shared.data[0] = 0  # forbidden: shares are read-only views

    with pytest.raises(ProtocolBug):
        run(lambda c: (yield from par([writer(c), reveal(c, shared)])), ctx)


def test_same_seed_same_transcript():
    digests = []
    for _ in range(2):
        ctx = ProtocolContext(GF(101), 3, master_seed=99)
        run(beaver_mul, ctx, shares_of(3, ctx), shares_of(4, ctx, seed=2))
        digests.append((ctx.transcript.digest, ctx.transcript.to_jsonl()))
    assert digests[0] == digests[1]
    ctx = ProtocolContext(GF(101), 3, master_seed=100)
    run(beaver_mul, ctx, shares_of(3, ctx), shares_of(4, ctx, seed=2))
    assert ctx.transcript.digest != digests[0][0]


def test_transcript_jsonl_records():
    ctx = ProtocolContext(GF(101), 2)
    run(beaver_mul, ctx, shares_of(3, ctx), shares_of(4, ctx, seed=2))
    lines = [json.loads(line) for line in ctx.transcript.to_jsonl().splitlines()]
    events, tail = lines[:-1], lines[-1]
    assert all(set(e) == {"round", "sender", "tag", "bits"} for e in events)
    assert {e["round"] for e in events} == {1}
    assert tail == {"digest": ctx.transcript.digest}


def test_exhausted_store_names_the_kind():
    F = GF(7)
    ctx = ProtocolContext(F, 3, store=TripleStore(F, 3, provision=None))
    with pytest.raises(PreprocessingExhausted) as err:
        run(beaver_mul, ctx, shares_of(3, ctx), shares_of(4, ctx, seed=2))
    assert "field" in str(err.value)


def test_field_ops_are_counted_per_run():
    ctx = ProtocolContext(GF(101), 3)
    run(reveal, ctx, shares_of(np.arange(10), ctx))
    # reconstruction: (N-1) additions per element
    assert ctx.meter.field_ops == 2 * 10
    count_ops(5)  # outside a run: no meter is active, nothing happens
    assert ctx.meter.field_ops == 20


def test_wrong_player_count_payload_rejected():
    ctx = ProtocolContext(GF(101), 3)
    other = Shared(FieldRing(ctx.field), np.zeros(2, dtype=np.int64))
    with pytest.raises(ProtocolBug):
        run(reveal, ctx, other)


def test_context_rejects_no_players():
    with pytest.raises(DomainError):
        ProtocolContext(GF(7), 0)


def test_cost_meter_snapshot_shape():
    m = CostMeter(3, 7)
    snap = m.snapshot()
    assert snap["rounds"] == 0 and snap["bits_per_player"] == 0 and snap["triples"] == {}
