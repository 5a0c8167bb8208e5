"""Liveness discovery over a binomial tree: naive and fault-adaptive engines.

Both engines collect rank liveness up the tree and distribute the merged
set back down. The adaptive engine adds successor probing: a process
that cannot reach a tree position walks the successor ranks one by one,
and a process whose whole parent-side run is dead takes over the failed
position's remaining duties itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .sim import (
    Ok,
    ProcFailed,
    Program,
    Recv,
    Send,
    SetResponder,
    Tag,
    World,
)
from .topology import TreeShape, children, parent, subtree_range
from .wire import RankSetPayload, decode_rank_set, encode_rank_set


@dataclass(frozen=True)
class GroupSpec:
    """Ordered set of world ranks; group rank i is members[i]."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("group must be non-empty")
        if len(set(self.members)) != len(self.members):
            raise ValueError("group members must be distinct")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def shape(self) -> TreeShape:
        return TreeShape(len(self.members))


@dataclass(frozen=True)
class ProcessResult:
    """Per-process outcome: the survivor set it settled on, in group ranks."""

    survivors: tuple[int, ...]
    flag: int | None = None
    failed: bool = False  # naive only: a parent-side operation hit a dead peer


def _encode_state(ranks: set[int], flags: dict[int, int] | None, shape: TreeShape) -> bytes:
    ordered = tuple(sorted(ranks))
    fl = tuple(flags[r] for r in ordered) if flags is not None else None
    return encode_rank_set(RankSetPayload(ordered, fl), shape)


def _merge(ranks: set[int], flags: dict[int, int] | None, payload: bytes, shape: TreeShape) -> None:
    decoded = decode_rank_set(payload, shape, with_flags=flags is not None)
    ranks.update(decoded.ranks)
    if flags is not None and decoded.flags is not None:
        flags.update(zip(decoded.ranks, decoded.flags))


def _result(ranks: set[int], flags: dict[int, int] | None, failed: bool = False) -> ProcessResult:
    ordered = tuple(sorted(ranks))
    flag = None
    if flags is not None:
        flag = 1
        for r in ordered:
            flag &= flags.get(r, 1)
    return ProcessResult(ordered, flag, failed)


# -- naive engine -----------------------------------------------------------


def naive_program(group: GroupSpec, me: int, inst: int, contribution: int | None = None) -> Program:
    """Collect/distribute with no fallback: failed operations are skipped."""
    shape = group.shape
    ranks = {me}
    flags = {me: int(contribution)} if contribution is not None else None
    for _, c in children(me, shape):
        r = yield Recv(src=group.members[c], tag=Tag("gather", c, inst))
        if isinstance(r, Ok):
            _merge(ranks, flags, r.payload, shape)
    par = parent(me, shape)
    failed = False
    if par is not None:
        r = yield Send(
            dst=group.members[par], tag=Tag("gather", me, inst),
            payload=_encode_state(ranks, flags, shape),
        )
        if isinstance(r, ProcFailed):
            failed = True
        else:
            r = yield Recv(src=group.members[par], tag=Tag("broadcast", me, inst))
            if isinstance(r, ProcFailed):
                failed = True
            else:
                ranks = set()
                if flags is not None:
                    flags = {}
                _merge(ranks, flags, r.payload, shape)
    full = _encode_state(ranks, flags, shape)
    for _, c in reversed(children(me, shape)):
        yield Send(dst=group.members[c], tag=Tag("broadcast", c, inst), payload=full)
    return _result(ranks, flags, failed)


# -- adaptive engine --------------------------------------------------------


def _confirm_alive(group: GroupSpec, cand: int, pos: int, inst: int) -> Iterator:
    """Probe/ack round used when sends do not detect peer death themselves."""
    yield Send(dst=group.members[cand], tag=Tag("probe", pos, inst), detect=False)
    r = yield Recv(src=group.members[cand], tag=Tag("probe", pos, inst))
    return r


# payload framing: partial gather data vs the decided (final) set
PARTIAL = b"\x00"
FINAL = b"\x01"


def adaptive_program(
    group: GroupSpec,
    me: int,
    inst: int,
    contribution: int | None = None,
    probe_first: bool = False,
) -> Program:
    shape = group.shape
    ranks = {me}
    flags = {me: int(contribution)} if contribution is not None else None
    dead: set[int] = set()
    held: list[tuple[int, dict[int, int | None]]] = []
    pos = me
    merged_child: int | None = None
    full_payload: bytes | None = None

    while full_payload is None:
        # collect this position's child subtrees, ascending offset
        holders: dict[int, int | None] = {}
        for _, c in children(pos, shape):
            if c == merged_child:
                holders[c] = me
                continue
            _, hi = subtree_range(c, shape)
            holder = None
            cand = c
            while cand < hi:
                if cand in dead:
                    cand += 1
                    continue
                if not (pos == me and cand == c):
                    # pull: a zero-byte poke that a peer which already
                    # finished (or finishes later) answers with the
                    # decided set; a working peer ignores it and will
                    # contact us of its own accord
                    yield Send(dst=group.members[cand], tag=Tag("gather", c, inst))
                r = yield Recv(src=group.members[cand], tag=Tag("gather", c, inst))
                if isinstance(r, ProcFailed):
                    dead.add(cand)
                    cand += 1
                    continue
                if r.payload[:1] == FINAL:
                    full_payload = r.payload
                    break
                _merge(ranks, flags, r.payload[1:], shape)
                holder = cand
                break
            holders[c] = holder
            if full_payload is not None:
                break
        held.append((pos, holders))
        if full_payload is not None:
            break

        par = parent(pos, shape)
        if par is None:
            full_payload = FINAL + _encode_state(ranks, flags, shape)
            break

        # walk successor ranks upward until a live holder takes the data
        payload = PARTIAL + _encode_state(ranks, flags, shape)
        cand = par
        while cand < me:
            if cand in dead:
                cand += 1
                continue
            if probe_first:
                ack = yield from _confirm_alive(group, cand, pos, inst)
                if isinstance(ack, ProcFailed):
                    dead.add(cand)
                    cand += 1
                    continue
                if isinstance(ack, Ok) and ack.payload[:1] == FINAL and len(ack.payload) > 1:
                    # the peer already finished and answered with the final set
                    full_payload = ack.payload
                    break
            r = yield Send(dst=group.members[cand], tag=Tag("gather", pos, inst), payload=payload)
            if isinstance(r, ProcFailed):
                dead.add(cand)
                cand += 1
                continue
            r = yield Recv(src=group.members[cand], tag=Tag("broadcast", pos, inst))
            if isinstance(r, ProcFailed):
                # the holder died after accepting; resume from its successor
                dead.add(cand)
                cand += 1
                continue
            full_payload = r.payload
            break
        if full_payload is not None:
            break
        # every rank between the parent position and us is dead: take over
        merged_child = pos
        pos = par

    ranks = set()
    if flags is not None:
        flags = {}
    _merge(ranks, flags, full_payload[1:], shape)

    # distribute, topmost held position first, descending offsets within each
    for p, holders in sorted(held):
        for _, c in reversed(children(p, shape)):
            h = holders.get(c)
            if h is None or h == me:
                continue
            r = yield Send(dst=group.members[h], tag=Tag("broadcast", c, inst), payload=full_payload)
            if isinstance(r, ProcFailed):
                dead.add(h)
                _, hi = subtree_range(c, shape)
                cand = h + 1
                while cand < hi:
                    if cand in dead:
                        cand += 1
                        continue
                    r = yield Send(
                        dst=group.members[cand], tag=Tag("broadcast", c, inst), payload=full_payload
                    )
                    if isinstance(r, ProcFailed):
                        dead.add(cand)
                        cand += 1
                        continue
                    break
    yield SetResponder("gather", inst, "broadcast", full_payload)
    return _result(ranks, flags)


# -- drivers ----------------------------------------------------------------


def _validate_group(world: World, group: GroupSpec) -> None:
    for m in group.members:
        if not 0 <= m < world.world_size:
            raise ValueError(f"group member {m} outside world of size {world.world_size}")


def spawn_lda(
    world: World,
    group: GroupSpec,
    adaptive: bool = True,
    contributions: list[int] | None = None,
) -> None:
    """Install one engine per live group member; results land in world.results."""
    _validate_group(world, group)
    if contributions is not None and len(contributions) != group.size:
        raise ValueError("one contribution bit per group member required")
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    for i, m in enumerate(group.members):
        if not world.is_alive(m, 0):
            continue
        c = contributions[i] if contributions is not None else None
        if adaptive:
            world.spawn(m, adaptive_program(group, i, inst, c, probe_first))
        else:
            world.spawn(m, naive_program(group, i, inst, c))


def _collect(world: World, group: GroupSpec) -> dict[int, ProcessResult]:
    out = {}
    for i, m in enumerate(group.members):
        if m in world.results:
            out[i] = world.results[m]
    return out


def naive_lda(world: World, group: GroupSpec) -> dict[int, ProcessResult]:
    """Run the no-fallback variant; one result per completing group rank."""
    spawn_lda(world, group, adaptive=False)
    world.run()
    return _collect(world, group)


def adaptive_lda(
    world: World, group: GroupSpec, contributions: list[int] | None = None
) -> dict[int, ProcessResult]:
    """Run the fault-adaptive variant; completing ranks agree on one set."""
    spawn_lda(world, group, adaptive=True, contributions=contributions)
    world.run()
    return _collect(world, group)
