"""Event accounting and machine-checkable validators for run outcomes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .comm import CreateResult
from .liveness import GroupSpec, ProcessResult
from .sim import Event

CSV_HEADER = (
    "scenario_id,s,n_failed_prestart,n_failed_midrun,variant,payload_msgs,"
    "probe_msgs,failed_detections,virtual_time,participants,agreed,accurate,deadlocked"
)

_PAYLOAD_PHASES = {"gather", "broadcast", "app"}


@dataclass
class RunReport:
    scenario_id: str
    variant: str
    group: GroupSpec
    plan: dict[int, int]
    world_size: int
    participants: int
    outcomes: dict[int, object]  # group rank -> ProcessResult | CreateResult
    events: list[Event]
    completed: bool
    blocked: tuple[int, ...] = ()

    def trace(self) -> str:
        return "\n".join(e.line() for e in self.events)


@dataclass(frozen=True)
class MetricsRow:
    scenario_id: str
    s: int
    n_failed_prestart: int
    n_failed_midrun: int
    variant: str
    payload_msgs: int
    probe_msgs: int
    failed_detections: int
    virtual_time: int
    participants: int
    agreed: bool | None
    accurate: bool | None
    deadlocked: bool

    def csv(self) -> str:
        def b(v: bool | None) -> str:
            return "" if v is None else ("true" if v else "false")

        return (
            f"{self.scenario_id},{self.s},{self.n_failed_prestart},{self.n_failed_midrun},"
            f"{self.variant},{self.payload_msgs},{self.probe_msgs},{self.failed_detections},"
            f"{self.virtual_time},{self.participants},{b(self.agreed)},{b(self.accurate)},"
            f"{'true' if self.deadlocked else 'false'}"
        )


def _comparable(outcome: object) -> object:
    if isinstance(outcome, ProcessResult):
        return (outcome.survivors, outcome.flag)
    if isinstance(outcome, CreateResult):
        comm = outcome.comm
        if comm is None:
            return (outcome.status,)
        return (outcome.status, comm.members.members, comm.epoch)
    return outcome


def check_agreement(report: RunReport) -> bool:
    """True iff every correct process that returned settled on the same answer.

    A process that crashes during the run is faulty even if it crashed
    after returning; its answer is not required to match (fail-stop
    agreement is over correct processes).
    """
    crashed = {e.src for e in report.events if e.kind == "FAIL"}
    views = [
        _comparable(o)
        for i, o in sorted(report.outcomes.items())
        if report.group.members[i] not in crashed
    ]
    return all(v == views[0] for v in views)


def check_accuracy(report: RunReport, plan: dict[int, int] | None = None) -> bool | None:
    """True iff every live member returned exactly the pre-start-alive set.

    Only defined for fault plans with no mid-run entries; returns None
    otherwise.
    """
    plan = report.plan if plan is None else plan
    if any(t > 0 for t in plan.values()):
        return None
    if report.outcomes and not any(isinstance(o, ProcessResult) for o in report.outcomes.values()):
        return None  # not a survivor-set-returning operation
    expected = tuple(i for i, m in enumerate(report.group.members) if plan.get(m) is None)
    for i, m in enumerate(report.group.members):
        if plan.get(m) is not None:
            continue
        out = report.outcomes.get(i)
        if not isinstance(out, ProcessResult) or out.survivors != expected:
            return False
    return True


def summarize(report: RunReport) -> MetricsRow:
    payload = sum(
        1 for e in report.events if e.kind == "SEND" and e.result == "ok" and e.phase in _PAYLOAD_PHASES
    )
    probes = sum(1 for e in report.events if e.kind == "PROBE" and e.result == "ok")
    detections = sum(1 for e in report.events if e.result == "pf")
    vt = max((e.t for e in report.events), default=0)
    prestart = sum(1 for t in report.plan.values() if t == 0)
    midrun = sum(1 for t in report.plan.values() if t > 0)
    agreed = check_agreement(report) if report.completed else None
    accurate = check_accuracy(report) if report.completed else None
    return MetricsRow(
        scenario_id=report.scenario_id,
        s=report.group.size,
        n_failed_prestart=prestart,
        n_failed_midrun=midrun,
        variant=report.variant,
        payload_msgs=payload,
        probe_msgs=probes,
        failed_detections=detections,
        virtual_time=vt,
        participants=report.participants,
        agreed=agreed,
        accurate=accurate,
        deadlocked=not report.completed,
    )


def write_csv(rows: Iterable[MetricsRow], fh: IO[str], header: bool = True) -> None:
    if header:
        fh.write(CSV_HEADER + "\n")
    for row in rows:
        fh.write(row.csv() + "\n")
