"""Communicator model and creation/repair operations.

Baseline create calls reproduce observed MPI behaviour: with an
unacknowledged failure among the callers the exchange blocks, and with a
revoked communicator every caller errors out. Guarded variants first run
the adaptive liveness discovery so a failure surfaces as an error (or is
filtered out) instead of a hang.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .liveness import GroupSpec, ProcessResult, adaptive_program, spawn_lda
from .sim import Deadlock, Ok, Program, Recv, Revoked, Send, Tag, World
from .topology import children, parent


@dataclass
class CommState:
    members: GroupSpec
    epoch: int = 0
    revoked: bool = False
    revoke_at: int | None = None  # virtual time at which a revoke lands mid-call
    acknowledged: frozenset[int] = field(default_factory=frozenset)

    def status(self, world: World) -> str:
        if self.revoked:
            return "revoked"
        dead = {m for m in self.members.members if not world.is_alive(m)}
        if dead - self.acknowledged:
            return "faulty"
        return "ok"


@dataclass(frozen=True)
class CreateResult:
    status: str  # ok | proc_failed | deadlocked
    comm: CommState | None = None


def revoke(world: World, comm: CommState) -> CommState:
    """Propagate the failure notice; idempotent."""
    comm.revoked = True
    return comm


def _live_members(world: World, group: GroupSpec) -> list[tuple[int, int]]:
    return [(i, m) for i, m in enumerate(group.members) if world.is_alive(m, 0)]


def _all_proc_failed(world: World, group: GroupSpec) -> dict[int, CreateResult]:
    return {i: CreateResult("proc_failed") for i, _ in _live_members(world, group)}


def _run_and_collect(world: World, group: GroupSpec) -> dict[int, CreateResult]:
    outcome = world.run()
    blocked = {op.rank for op in outcome.pending} if isinstance(outcome, Deadlock) else set()
    out: dict[int, CreateResult] = {}
    for i, m in enumerate(group.members):
        if m in world.results:
            out[i] = world.results[m]
        elif m in blocked:
            out[i] = CreateResult("deadlocked")
    return out


def _handshake_program(group: GroupSpec, me: int, inst: int, fail_at: int | None) -> Program:
    """The blocking join exchange of the baseline create calls.

    Nothing here detects peer death, so one dead member hangs the whole
    group; a revoke arriving at fail_at aborts every blocked call.
    """
    shape = group.shape
    for _, c in children(me, shape):
        r = yield Recv(src=group.members[c], tag=Tag("app", c, inst), detect=False, fail_at=fail_at)
        if isinstance(r, Revoked):
            return CreateResult("proc_failed")
    par = parent(me, shape)
    if par is not None:
        yield Send(dst=group.members[par], tag=Tag("app", me, inst), detect=False)
        r = yield Recv(src=group.members[par], tag=Tag("app", me, inst), detect=False, fail_at=fail_at)
        if isinstance(r, Revoked):
            return CreateResult("proc_failed")
    for _, c in reversed(children(me, shape)):
        yield Send(dst=group.members[c], tag=Tag("app", c, inst), detect=False)
    return CreateResult("ok", CommState(group, 0))


def baseline_create_group(world: World, comm: CommState, group: GroupSpec) -> dict[int, CreateResult]:
    missing = set(group.members) - set(comm.members.members)
    if missing:
        raise ValueError(f"group ranks {sorted(missing)} outside the communicator")
    if comm.status(world) == "revoked":
        return _all_proc_failed(world, group)
    inst = world.new_instance()
    for i, m in _live_members(world, group):
        world.spawn(m, _handshake_program(group, i, inst, comm.revoke_at))
    return _run_and_collect(world, group)


def baseline_create_from_group(
    world: World, group: GroupSpec, session: CommState | None = None
) -> dict[int, CreateResult]:
    if session is not None and session.revoked:
        return _all_proc_failed(world, group)
    inst = world.new_instance()
    fail_at = session.revoke_at if session is not None else None
    for i, m in _live_members(world, group):
        world.spawn(m, _handshake_program(group, i, inst, fail_at))
    return _run_and_collect(world, group)


def _guarded_group_program(group: GroupSpec, me: int, inst: int, probe_first: bool) -> Program:
    res = yield from adaptive_program(group, me, inst, None, probe_first)
    if set(res.survivors) != set(range(group.size)):
        return CreateResult("proc_failed")
    return CreateResult("ok", CommState(group, 0))


def guarded_create_group(world: World, comm: CommState, group: GroupSpec) -> dict[int, CreateResult]:
    missing = set(group.members) - set(comm.members.members)
    if missing:
        raise ValueError(f"group ranks {sorted(missing)} outside the communicator")
    if comm.status(world) == "revoked":
        return _all_proc_failed(world, group)
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    for i, m in _live_members(world, group):
        world.spawn(m, _guarded_group_program(group, i, inst, probe_first))
    return _run_and_collect(world, group)


def _shrink_program(
    group: GroupSpec, me: int, inst: int, probe_first: bool, epoch: int
) -> Program:
    res = yield from adaptive_program(group, me, inst, None, probe_first)
    members = GroupSpec(tuple(group.members[i] for i in res.survivors))
    return CreateResult("ok", CommState(members, epoch))


def guarded_create_from_group(world: World, group: GroupSpec) -> dict[int, CreateResult]:
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    for i, m in _live_members(world, group):
        world.spawn(m, _shrink_program(group, i, inst, probe_first, 0))
    return _run_and_collect(world, group)


def nc_shrink(world: World, comm: CommState) -> dict[int, CreateResult]:
    """Repair a communicator using only its own members."""
    group = comm.members
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    for i, m in _live_members(world, group):
        world.spawn(m, _shrink_program(group, i, inst, probe_first, comm.epoch + 1))
    return _run_and_collect(world, group)


def nc_agree(
    world: World, group: GroupSpec, flags: list[int]
) -> dict[int, ProcessResult]:
    """All-reduce a bit alongside liveness discovery, group members only."""
    spawn_lda(world, group, adaptive=True, contributions=flags)
    world.run()
    return {i: world.results[m] for i, m in enumerate(group.members) if m in world.results}


def _world_group(world: World) -> GroupSpec:
    return GroupSpec(tuple(range(world.world_size)))


def _collective_shrink_program(
    wgroup: GroupSpec, me: int, inst: int, probe_first: bool, comm: CommState
) -> Program:
    res = yield from adaptive_program(wgroup, me, inst, None, probe_first)
    survivors = set(res.survivors)
    members = tuple(m for m in comm.members.members if m in survivors)
    if me not in set(comm.members.members):
        return CreateResult("ok", None)
    return CreateResult("ok", CommState(GroupSpec(members), comm.epoch + 1))


def collective_shrink_baseline(world: World, comm: CommState) -> dict[int, CreateResult]:
    """Same repair contract as nc_shrink, but every live world rank takes part."""
    wgroup = _world_group(world)
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    for i, m in _live_members(world, wgroup):
        world.spawn(m, _collective_shrink_program(wgroup, i, inst, probe_first, comm))
    world.run()
    out = {}
    for i, m in enumerate(comm.members.members):
        if m in world.results:
            out[i] = world.results[m]
    return out


def _collective_agree_program(
    wgroup: GroupSpec, me: int, inst: int, probe_first: bool,
    contribution: int, group: GroupSpec,
) -> Program:
    res = yield from adaptive_program(wgroup, me, inst, contribution, probe_first)
    survivors = set(res.survivors)
    gset = tuple(gi for gi, m in enumerate(group.members) if m in survivors)
    return ProcessResult(gset, res.flag)


def collective_agree_baseline(
    world: World, group: GroupSpec, flags: list[int]
) -> dict[int, ProcessResult]:
    """Same agreement contract as nc_agree, computed with world-wide participation."""
    if len(flags) != group.size:
        raise ValueError("one flag bit per group member required")
    wgroup = _world_group(world)
    by_member = dict(zip(group.members, flags))
    inst = world.new_instance()
    probe_first = not world.detect_on_send
    gset = set(group.members)
    for i, m in _live_members(world, wgroup):
        if m in gset:
            world.spawn(m, _collective_agree_program(wgroup, i, inst, probe_first, by_member[m], group))
        else:
            world.spawn(m, adaptive_program(wgroup, i, inst, 1, probe_first))
    world.run()
    return {gi: world.results[m] for gi, m in enumerate(group.members) if m in world.results}
