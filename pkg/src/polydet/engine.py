"""Deterministic multi-party runtime.

A protocol is a generator. Each ``yield Round(...)`` hands the runtime one
communication step: every player broadcasts its share of each listed
payload, the barrier closes, and the generator receives the reconstructed
public values. Local computation between yields is the players' compute
phase. ``par`` merges independent sub-protocols so that their rounds
coincide, which is how constant round counts survive composition.
"""

from __future__ import annotations

import copy
import hashlib
import json
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Generator

import numpy as np

from .algebra import GF
from .errors import DomainError, ProtocolBug, ProtocolError
from .rings import Ring, _active_counter, count_ops
from .sharing import Shared


@dataclass
class Round:
    """One broadcast step: (tag, shared value) payloads to open together."""

    items: list
    retry: bool = False

    def __post_init__(self):
        self.items = list(self.items)


Protocol = Generator[Round, list, Any]


def element_bits(q: int) -> int:
    """ceil(log2 q): bits of one broadcast GF(q) element."""
    return (q - 1).bit_length()


@dataclass
class CostMeter:
    """Round, communication, triple and field-op counters for one run.

    ``rounds``/``bits``/``triples`` are the nominal schedule. Steps taken only
    because a Las Vegas draw failed are booked in the ``retry_*`` counters.
    """

    N: int
    bits_elem: int
    rounds: int = 0
    bits: list = field(default_factory=list)
    triples: Counter = field(default_factory=Counter)
    field_ops: int = 0
    retry_rounds: int = 0
    retry_bits: list = field(default_factory=list)
    retry_triples: Counter = field(default_factory=Counter)
    retries: int = 0
    leaks: list = field(default_factory=list)

    def __post_init__(self):
        if not self.bits:
            self.bits = [0] * self.N
        if not self.retry_bits:
            self.retry_bits = [0] * self.N

    @property
    def bits_per_player(self) -> int:
        return max(self.bits)

    @property
    def total_rounds(self) -> int:
        return self.rounds + self.retry_rounds

    def triples_of(self, kind: str, include_retries: bool = True) -> int:
        return self.triples[kind] + (self.retry_triples[kind] if include_retries else 0)

    def snapshot(self) -> dict:
        return {
            "rounds": self.rounds,
            "bits_per_player": self.bits_per_player,
            "triples": dict(sorted(self.triples.items())),
            "field_ops": self.field_ops,
            "retry_rounds": self.retry_rounds,
            "retry_bits_per_player": max(self.retry_bits),
            "retry_triples": dict(sorted(self.retry_triples.items())),
            "retries": self.retries,
        }


class Transcript:
    """Broadcast log: one event per (round, sender, payload) plus a value digest."""

    def __init__(self):
        self.events: list[dict] = []
        self._h = hashlib.sha256()

    def record(self, rnd: int, sender: int, tag: str, bits: int, value: np.ndarray):
        self.events.append({"round": rnd, "sender": sender, "tag": tag, "bits": bits})
        self._h.update(f"{rnd}:{sender}:{tag}:".encode())
        self._h.update(_words(value).tobytes())

    @property
    def digest(self) -> str:
        return self._h.hexdigest()

    def to_jsonl(self) -> str:
        lines = [json.dumps(e, sort_keys=True) for e in self.events]
        lines.append(json.dumps({"digest": self.digest}))
        return "\n".join(lines) + "\n"

    def __len__(self):
        return len(self.events)


def _words(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.array(a, dtype=np.uint64)
    return a.astype("<u8", copy=False)


@dataclass
class PlayerState:
    pid: int
    rng: np.random.Generator
    rounds_seen: int = 0


class Channel:
    """Broadcast channel with a round barrier."""

    def __init__(self, N: int, q: int, meter: CostMeter, transcript: Transcript, players: list):
        self.N = N
        self.q = q
        self.meter = meter
        self.transcript = transcript
        self.players = players

    def broadcast_round(self, submissions, retry: bool = False) -> dict:
        """Deliver one round.

        ``submissions`` is an iterable of (player, [(tag, array), ...]); each
        player must appear exactly once. Returns player -> payload list, the
        view every player receives.
        """
        got: dict[int, list] = {}
        for pid, items in submissions:
            if pid in got:
                raise ProtocolBug(f"player {pid} submitted twice in one round")
            got[pid] = list(items)
        if not got or all(not v for v in got.values()):
            raise ProtocolBug("empty round: nothing to broadcast")
        missing = [p for p in range(1, self.N + 1) if p not in got]
        if missing:
            raise ProtocolError(f"absent player(s) {missing} in broadcast round")
        m = self.meter
        if retry:
            m.retry_rounds += 1
        else:
            m.rounds += 1
        rnd = m.total_rounds
        be = m.bits_elem
        for pid in range(1, self.N + 1):
            sent = 0
            for tag, arr in got[pid]:
                b = int(np.size(arr)) * be
                sent += b
                self.transcript.record(rnd, pid, tag, b, arr)
            if retry:
                m.retry_bits[pid - 1] += sent
            else:
                m.bits[pid - 1] += sent
        for p in self.players:
            p.rounds_seen += 1
        return got


def _derive(master_seed: int, *parts) -> np.random.Generator:
    words = [int(master_seed) & 0xFFFFFFFFFFFFFFFF]
    for p in parts:
        words.append(zlib.crc32(p.encode()) if isinstance(p, str) else int(p))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


class ProtocolContext:
    """Player set, channel, meter, per-player streams and the triple store."""

    PUBLIC = 0x7075

    def __init__(self, field, N: int, master_seed: int = 0, store=None, tag: str = "run"):
        if isinstance(field, int):
            field = GF(field)
        if N < 1:
            raise DomainError("need at least one player")
        self.field = field
        self.q = field.q
        self.N = N
        self.master_seed = int(master_seed)
        self.tag = tag
        self.meter = CostMeter(N, element_bits(field.q))
        self.transcript = Transcript()
        self.players = [PlayerState(p, _derive(master_seed, p, tag)) for p in range(1, N + 1)]
        self.channel = Channel(N, field.q, self.meter, self.transcript, self.players)
        self.public = _derive(master_seed, self.PUBLIC, tag)
        if store is None:
            from .triples import TripleStore

            store = TripleStore(field, N, master_seed=master_seed)
        self.store = store
        self.retry = False

    def retrying(self) -> "ProtocolContext":
        """View of this context whose rounds and triples are booked as retries."""
        c = copy.copy(self)
        c.retry = True
        return c

    def player_rng(self, pid: int) -> np.random.Generator:
        return self.players[pid - 1].rng

    def rand(self, ring: Ring, batch=()) -> Shared:
        """Each player draws its own share locally: uniform, no communication."""
        batch = tuple(batch)
        data = np.stack([ring.random(p.rng, batch) for p in self.players])
        return Shared(ring, data)

    def take_triple(self, ring: Ring, batch=()):
        """Consume prod(batch) triples of ``ring``'s kind, shaped to the batch."""
        from .triples import BeaverTriple

        batch = tuple(batch)
        count = int(np.prod(batch)) if batch else 1
        x, y, z = self.store.take(ring, count)
        book = self.meter.retry_triples if self.retry else self.meter.triples
        book[ring.kind] += count
        shape = (self.N,) + batch
        return BeaverTriple(
            Shared(ring.product, x.reshape(shape + ring.product.shape)),
            Shared(ring, y.reshape(shape + ring.shape)),
            Shared(ring, z.reshape(shape + ring.shape)),
            ring,
        )

    def note_retry(self, k: int = 1):
        self.meter.retries += int(k)

    def note_leak(self, reason: str):
        self.meter.leaks.append(reason)

    def open(self, req: Round) -> list:
        """Broadcast every payload of ``req`` and return the public sums."""
        items = req.items
        for _, sh in items:
            if sh.N != self.N:
                raise ProtocolBug("payload shared among the wrong number of players")
        subs = ((p, [(tag, sh.data[p - 1]) for tag, sh in items]) for p in range(1, self.N + 1))
        self.channel.broadcast_round(subs, retry=req.retry)
        out = []
        for _, sh in items:
            count_ops((self.N - 1) * (sh.data.size // self.N))
            out.append(sh.data.sum(axis=0) % self.q)
        return out


def par(gens: list) -> Protocol:
    """Run independent sub-protocols in lockstep; returns their results in order.

    Pending requests are merged into one broadcast round. When some of them
    are retry steps, those go first in a round of their own, so retries never
    shift the nominal schedule of the others.
    """
    gens = list(gens)
    results: list = [None] * len(gens)
    pending: dict[int, Round] = {}

    def step(i, value):
        try:
            req = gens[i].send(value)
        except StopIteration as stop:
            results[i] = stop.value
            pending.pop(i, None)
            return
        except ValueError as err:
            if "read-only" in str(err):
                raise ProtocolBug(f"sub-protocol {i} wrote to shared state: {err}") from err
            raise
        if not isinstance(req, Round):
            raise ProtocolBug(f"sub-protocol {i} yielded {type(req).__name__}, not a Round")
        pending[i] = req

    for i in range(len(gens)):
        step(i, None)
    while pending:
        retrying = [i for i, r in pending.items() if r.retry]
        active = retrying if retrying else list(pending)
        merged = Round([it for i in active for it in pending[i].items], retry=bool(retrying))
        answers = yield merged
        pos = 0
        for i in active:
            k = len(pending[i].items)
            part = answers[pos : pos + k]
            pos += k
            step(i, part)
    return results


def drive(gen: Protocol, ctx: ProtocolContext):
    try:
        req = next(gen)
    except StopIteration as stop:
        return stop.value
    while True:
        if not isinstance(req, Round):
            raise ProtocolBug(f"protocol yielded {type(req).__name__}, not a Round")
        answer = ctx.open(req)
        try:
            req = gen.send(answer)
        except StopIteration as stop:
            return stop.value


@dataclass
class RunResult:
    output: Any
    meter: CostMeter
    transcript: Transcript


def run(protocol: Callable | Generator, ctx: ProtocolContext, *args, **kwargs) -> RunResult:
    """Drive a protocol to completion on ``ctx``; field ops go to ``ctx.meter``."""
    gen = protocol(ctx, *args, **kwargs) if callable(protocol) else protocol
    token = _active_counter.set(ctx.meter)
    try:
        out = drive(gen, ctx)
    finally:
        _active_counter.reset(token)
    return RunResult(out, ctx.meter, ctx.transcript)


def broadcast_round(ctx: ProtocolContext, payloads: dict, retry: bool = False) -> dict:
    """Direct channel access: ``payloads`` maps player -> [(tag, array)]."""
    return ctx.channel.broadcast_round(payloads.items(), retry=retry)
