"""Deterministic discrete-event message-passing world with fail-stop faults.

Processes are generators that yield Send/Recv requests and are resumed
with an OpResult. Message latency is one virtual time unit; local
computation is free. A process scheduled to die at time t performs no
action at or after t, so every in-flight message from it is deliverable.
"""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Generator, Union

BEFORE_START = 0

_PHASE_LETTER = {"gather": "g", "broadcast": "b", "probe": "p", "app": "a"}

PROBE_ACK = b"\x00"


class ConfigError(ValueError):
    """Invalid world or fault-plan configuration."""


@dataclass(frozen=True)
class Tag:
    phase: str  # gather | broadcast | probe | app
    pos: int
    instance: int = 0


@dataclass(frozen=True)
class Send:
    dst: int
    tag: Tag
    payload: bytes = b""
    detect: bool | None = None  # None: use the world's detect_on_send setting


@dataclass(frozen=True)
class Recv:
    src: int
    tag: Tag
    detect: bool = True
    fail_at: int | None = None  # abort with Revoked if still blocked at this time


@dataclass(frozen=True)
class SetResponder:
    """Ask the runtime to answer late messages after this program finishes.

    Any message of (phase, instance) arriving at a finished process is
    consumed and answered with (reply_phase, same pos, instance, payload);
    an empty-payload message (a pull) is answered under its own tag.
    Models a participant that has already completed the exchange and can
    repeat its final answer to stragglers.
    """

    phase: str
    instance: int
    reply_phase: str
    payload: bytes


@dataclass(frozen=True)
class Ok:
    payload: bytes = b""


@dataclass(frozen=True)
class ProcFailed:
    peer: int


@dataclass(frozen=True)
class Revoked:
    pass


OpResult = Union[Ok, ProcFailed, Revoked]
Program = Generator[Union[Send, Recv, SetResponder], OpResult, object]


@dataclass(frozen=True)
class Event:
    t: int
    kind: str  # SEND | RECV | FAIL | PROBE
    src: int
    dst: int
    phase: str
    pos: int
    nbytes: int
    result: str  # ok | pf | rv

    def line(self) -> str:
        return (
            f"t={self.t} {self.kind} src={self.src} dst={self.dst} "
            f"phase={_PHASE_LETTER[self.phase]} pos={self.pos} "
            f"bytes={self.nbytes} result={self.result}"
        )


@dataclass(frozen=True)
class PendingOp:
    rank: int
    src: int
    tag: Tag
    posted_at: int


@dataclass(frozen=True)
class Completed:
    pass


@dataclass(frozen=True)
class Deadlock:
    pending: tuple[PendingOp, ...]


RunOutcome = Union[Completed, Deadlock]


class World:
    def __init__(
        self,
        world_size: int,
        plan: dict[int, int] | None = None,
        seed: int = 0,
        detect_on_send: bool = True,
    ) -> None:
        if world_size < 1:
            raise ConfigError(f"world_size must be >= 1, got {world_size}")
        plan = dict(plan or {})
        for rank, t in plan.items():
            if not 0 <= rank < world_size:
                raise ConfigError(f"fault rank {rank} out of range for world {world_size}")
            if t < 0:
                raise ConfigError(f"fault time {t} must be non-negative")
        self.world_size = world_size
        self.seed = seed
        self.detect_on_send = detect_on_send
        self.clock = 0
        self.death_time: dict[int, int] = plan
        self.events: list[Event] = []
        self.results: dict[int, object] = {}
        self.outcome: RunOutcome = Completed()
        self._programs: dict[int, Program] = {}
        self._instances = 0
        self._ran = False

    def new_instance(self) -> int:
        self._instances += 1
        return self._instances

    def is_alive(self, rank: int, t: int | None = None) -> bool:
        if not 0 <= rank < self.world_size:
            raise ConfigError(f"rank {rank} out of range")
        at = self.clock if t is None else t
        d = self.death_time.get(rank)
        return d is None or at < d

    def kill(self, rank: int, time: int = BEFORE_START) -> None:
        """Schedule a permanent fail-stop at `time`; a no-op for an already-dead rank."""
        if not 0 <= rank < self.world_size:
            raise ConfigError(f"rank {rank} out of range")
        if time < 0:
            raise ConfigError(f"fault time {time} must be non-negative")
        d = self.death_time.get(rank)
        if d is None or time < d:
            self.death_time[rank] = time

    def spawn(self, rank: int, program: Program) -> None:
        if self._ran:
            raise ConfigError("world already ran")
        if not 0 <= rank < self.world_size:
            raise ConfigError(f"rank {rank} out of range")
        if rank in self._programs:
            raise ConfigError(f"rank {rank} already has a program")
        self._programs[rank] = program

    @property
    def participants(self) -> int:
        return len(self._programs)

    def trace(self) -> str:
        return "\n".join(e.line() for e in self.events)

    # -- event loop -------------------------------------------------------

    def _log(self, kind: str, src: int, dst: int, tag: Tag, nbytes: int, result: str) -> None:
        self.events.append(Event(self.clock, kind, src, dst, tag.phase, tag.pos, nbytes, result))

    def run(self) -> RunOutcome:
        if self._ran:
            raise ConfigError("world already ran")
        self._ran = True

        gens = dict(self._programs)
        mailbox: dict[tuple[int, int, Tag], deque[bytes]] = {}
        inflight: list[tuple[int, int, int, int, Tag, bytes]] = []
        seq = itertools.count()
        blocked: dict[int, Recv] = {}
        blocked_since: dict[int, int] = {}
        done: set[int] = set()
        dead: set[int] = set()
        responders: dict[int, SetResponder] = {}
        deaths = sorted((t, r) for r, t in self.death_time.items())
        ready: list[tuple[int, OpResult | None]] = [(r, None) for r in sorted(gens)]

        def push(src: int, dst: int, tag: Tag, payload: bytes) -> None:
            heapq.heappush(inflight, (self.clock + 1, next(seq), src, dst, tag, payload))

        def wake(rank: int, result: OpResult) -> None:
            del blocked[rank]
            del blocked_since[rank]
            ready.append((rank, result))

        def deliver(src: int, dst: int, tag: Tag, payload: bytes) -> None:
            if not self.is_alive(dst):
                return
            if tag.phase == "probe" and payload == b"":
                # transport-level liveness probe: the runtime acknowledges
                self._log("RECV", src, dst, tag, 0, "ok")
                resp = responders.get(dst)
                ack = resp.payload if dst in done and resp is not None else PROBE_ACK
                self._log("PROBE", dst, src, tag, len(ack), "ok")
                push(dst, src, tag, ack)
                return
            resp = responders.get(dst)
            if dst in done and resp is not None and tag.phase == resp.phase and tag.instance == resp.instance:
                self._log("RECV", src, dst, tag, len(payload), "ok")
                if payload != resp.payload:  # a copy of our own answer needs no reply
                    reply = tag if payload == b"" else Tag(resp.reply_phase, tag.pos, tag.instance)
                    self._log("SEND", dst, src, reply, len(resp.payload), "ok")
                    push(dst, src, reply, resp.payload)
                return
            pend = blocked.get(dst)
            if pend is not None and pend.src == src and pend.tag == tag:
                self._log("RECV", src, dst, tag, len(payload), "ok")
                wake(dst, Ok(payload))
                return
            mailbox.setdefault((dst, src, tag), deque()).append(payload)

        def finish(rank: int) -> None:
            done.add(rank)
            resp = responders.get(rank)
            if resp is None:
                return
            # answer matching messages that arrived before completion
            keys = sorted(
                (k for k in mailbox if k[0] == rank and k[2].phase == resp.phase and k[2].instance == resp.instance),
                key=lambda k: (k[1], k[2].pos),
            )
            for dst, src, tag in keys:
                for payload in mailbox.pop((dst, src, tag)):
                    self._log("RECV", src, dst, tag, len(payload), "ok")
                    if payload == resp.payload:
                        continue
                    reply = tag if payload == b"" else Tag(resp.reply_phase, tag.pos, tag.instance)
                    self._log("SEND", dst, src, reply, len(resp.payload), "ok")
                    push(dst, src, reply, resp.payload)

        def step(rank: int, result: OpResult | None) -> None:
            gen = gens[rank]
            while True:
                try:
                    op = gen.send(result)
                except StopIteration as stop:
                    self.results[rank] = stop.value
                    finish(rank)
                    return
                if isinstance(op, SetResponder):
                    responders[rank] = op
                    result = Ok()
                    continue
                if isinstance(op, Send):
                    detect = self.detect_on_send if op.detect is None else op.detect
                    # an empty gather message is a pull: a liveness poke, not payload
                    is_pull = op.tag.phase == "gather" and op.payload == b""
                    kind = "PROBE" if op.tag.phase == "probe" or is_pull else "SEND"
                    alive_dst = self.is_alive(op.dst)
                    if not alive_dst and detect:
                        self._log(kind, rank, op.dst, op.tag, len(op.payload), "pf")
                        result = ProcFailed(op.dst)
                        continue
                    self._log(kind, rank, op.dst, op.tag, len(op.payload), "ok")
                    if alive_dst:
                        push(rank, op.dst, op.tag, op.payload)
                    result = Ok()
                    continue
                if isinstance(op, Recv):
                    key = (rank, op.src, op.tag)
                    q = mailbox.get(key)
                    if q:
                        payload = q.popleft()
                        if not q:
                            del mailbox[key]
                        self._log("RECV", op.src, rank, op.tag, len(payload), "ok")
                        result = Ok(payload)
                        continue
                    if op.detect and not self.is_alive(op.src):
                        self._log("RECV", op.src, rank, op.tag, 0, "pf")
                        result = ProcFailed(op.src)
                        continue
                    if op.fail_at is not None and op.fail_at <= self.clock:
                        self._log("RECV", op.src, rank, op.tag, 0, "rv")
                        result = Revoked()
                        continue
                    blocked[rank] = op
                    blocked_since[rank] = self.clock
                    return
                raise ConfigError(f"program at rank {rank} yielded {op!r}")

        while True:
            while inflight and inflight[0][0] <= self.clock:
                _, _, src, dst, tag, payload = heapq.heappop(inflight)
                deliver(src, dst, tag, payload)

            while deaths and deaths[0][0] <= self.clock:
                died_at, rank = deaths.pop(0)
                dead.add(rank)
                self.events.append(Event(died_at, "FAIL", rank, rank, "app", 0, 0, "ok"))
                ready = [(r, res) for r, res in ready if r != rank]
                if rank in blocked:
                    del blocked[rank]
                    del blocked_since[rank]
                for waiter in sorted(r for r, op in blocked.items() if op.src == rank and op.detect):
                    self._log("RECV", rank, waiter, blocked[waiter].tag, 0, "pf")
                    wake(waiter, ProcFailed(rank))

            for waiter in sorted(
                r for r, op in blocked.items() if op.fail_at is not None and op.fail_at <= self.clock
            ):
                self._log("RECV", blocked[waiter].src, waiter, blocked[waiter].tag, 0, "rv")
                wake(waiter, Revoked())

            while ready:
                ready.sort(key=lambda item: item[0])
                rank, result = ready.pop(0)
                if rank in dead:
                    continue
                step(rank, result)

            candidates = []
            if inflight:
                candidates.append(inflight[0][0])
            if deaths and blocked:
                candidates.append(deaths[0][0])
            candidates.extend(
                op.fail_at for op in blocked.values() if op.fail_at is not None and op.fail_at > self.clock
            )
            if not candidates:
                if blocked:
                    pending = tuple(
                        PendingOp(r, blocked[r].src, blocked[r].tag, blocked_since[r])
                        for r in sorted(blocked)
                    )
                    self.outcome = Deadlock(pending)
                else:
                    self.outcome = Completed()
                return self.outcome
            self.clock = min(candidates)


def build_world(
    world_size: int,
    plan: dict[int, int] | None = None,
    seed: int = 0,
    detect_on_send: bool = True,
) -> World:
    return World(world_size, plan, seed, detect_on_send)
