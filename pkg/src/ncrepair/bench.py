"""Scenario execution, parameter sweeps, and randomized/exhaustive oracles."""
from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass

from . import comm as comm_ops
from .comm import CommState, CreateResult
from .liveness import GroupSpec, adaptive_lda, naive_lda
from .metrics import MetricsRow, RunReport, summarize
from .scenario import Scenario, format_scenario
from .sim import Completed, Deadlock, build_world


def _comm_for(sc: Scenario, world_size: int) -> CommState:
    members = sc.comm if sc.comm is not None else tuple(range(world_size))
    return CommState(GroupSpec(members), revoked=sc.revoked)


def run_scenario(sc: Scenario) -> tuple[RunReport, MetricsRow]:
    world = build_world(sc.world_size, dict(sc.faults), sc.seed, sc.detect_on_send)
    group = GroupSpec(sc.group)
    flags = list(sc.contributions) if sc.contributions is not None else [1] * group.size

    if sc.variant == "naive":
        outcomes = naive_lda(world, group)
    elif sc.variant == "adaptive":
        contrib = list(sc.contributions) if sc.contributions is not None else None
        outcomes = adaptive_lda(world, group, contrib)
    elif sc.variant == "baseline_create_group":
        outcomes = comm_ops.baseline_create_group(world, _comm_for(sc, sc.world_size), group)
    elif sc.variant == "baseline_create_from_group":
        session = _comm_for(sc, sc.world_size) if (sc.comm is not None or sc.revoked) else None
        outcomes = comm_ops.baseline_create_from_group(world, group, session)
    elif sc.variant == "guarded_create_group":
        outcomes = comm_ops.guarded_create_group(world, _comm_for(sc, sc.world_size), group)
    elif sc.variant == "guarded_create_from_group":
        outcomes = comm_ops.guarded_create_from_group(world, group)
    elif sc.variant == "nc_shrink":
        outcomes = comm_ops.nc_shrink(world, CommState(group, revoked=sc.revoked))
    elif sc.variant == "nc_agree":
        outcomes = comm_ops.nc_agree(world, group, flags)
    elif sc.variant == "collective_shrink":
        outcomes = comm_ops.collective_shrink_baseline(world, CommState(group, revoked=sc.revoked))
    elif sc.variant == "collective_agree":
        outcomes = comm_ops.collective_agree_baseline(world, group, flags)
    else:
        raise ValueError(f"unknown variant {sc.variant!r}")

    blocked: tuple[int, ...] = ()
    if isinstance(world.outcome, Deadlock):
        blocked = tuple(sorted({op.rank for op in world.outcome.pending}))
    report = RunReport(
        scenario_id=sc.scenario_id,
        variant=sc.variant,
        group=group,
        plan=dict(sc.faults),
        world_size=sc.world_size,
        participants=world.participants,
        outcomes=outcomes,
        events=world.events,
        completed=isinstance(world.outcome, Completed),
        blocked=blocked,
    )
    return report, summarize(report)


# -- sweeps -----------------------------------------------------------------


def cell_seed(seed: int, s: int, frac: float, rep: int) -> int:
    digest = hashlib.sha256(f"{seed}:{s}:{frac}:{rep}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def sweep(
    sizes: list[int],
    fail_fracs: list[float],
    reps: int,
    seed: int = 0,
    variants: list[str] | None = None,
    world_size: int | None = None,
) -> list[MetricsRow]:
    """One run per (variant, size, fraction, rep) cell, prestart faults only."""
    variants = variants or ["adaptive"]
    rows = []
    for variant, s, frac, rep in itertools.product(variants, sizes, fail_fracs, range(reps)):
        ws = world_size if world_size is not None else s
        if ws < s:
            raise ValueError(f"world_size {ws} smaller than group size {s}")
        cs = cell_seed(seed, s, frac, rep)
        n_fail = min(int(frac * s), s - 1)
        victims = random.Random(cs).sample(range(s), n_fail)
        sc = Scenario(
            world_size=ws,
            group=tuple(range(s)),
            variant=variant,
            faults={v: 0 for v in victims},
            seed=cs,
            scenario_id=f"{variant}-s{s}-f{frac}-r{rep}",
        )
        rows.append(run_scenario(sc)[1])
    return rows


# -- oracles ----------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    scenario: Scenario
    reason: str

    def render(self) -> str:
        return f"# {self.reason}\n{format_scenario(self.scenario)}"


def _prestart_expectation(sc: Scenario) -> tuple[int, ...]:
    return tuple(i for i, m in enumerate(sc.group) if sc.faults.get(m, 1) != 0)


def _judge(sc: Scenario, report: RunReport, row: MetricsRow) -> str | None:
    """Return a failure reason, or None if the run upheld the invariants."""
    if row.deadlocked:
        return f"deadlocked ranks {report.blocked}"
    if row.agreed is False:
        return "survivors disagree across members"
    prestart_only = all(t == 0 for t in sc.faults.values())
    if prestart_only and row.accurate is False:
        expected = _prestart_expectation(sc)
        return f"inaccurate survivor set, expected {expected}"
    return None


def _exhaustive_scenarios(max_size: int, variant: str) -> list[Scenario]:
    out = []
    for s in range(1, max_size + 1):
        for bits in range(2**s - 1):  # every prestart fault set except all-dead
            faults = {r: 0 for r in range(s) if bits >> r & 1}
            out.append(
                Scenario(
                    world_size=s,
                    group=tuple(range(s)),
                    variant=variant,
                    faults=faults,
                    scenario_id=f"exh-s{s}-m{bits}",
                )
            )
    return out


def _random_scenario(trial: int, max_size: int, seed: int, variant: str) -> Scenario:
    rng = random.Random(cell_seed(seed, max_size, -1.0, trial))
    s = rng.randint(2, max_size)
    horizon = 2 * max(1, (s - 1).bit_length()) + 2
    n_fail = rng.randint(1, s - 1)
    victims = rng.sample(range(s), n_fail)
    faults = {v: rng.randint(0, horizon) for v in victims}
    return Scenario(
        world_size=s,
        group=tuple(range(s)),
        variant=variant,
        faults=faults,
        seed=trial,
        scenario_id=f"rand-{trial}",
    )


def oracle_check(
    max_size: int = 8,
    mode: str = "exhaustive",
    trials: int = 1000,
    seed: int = 0,
    variant: str = "adaptive",
) -> tuple[bool, int, list[Counterexample]]:
    """Check accuracy/agreement/progress invariants over many fault plans.

    Exhaustive mode enumerates every prestart fault set with at least one
    survivor for group sizes 1..max_size; random mode draws `trials`
    seeded plans that may include mid-run deaths.
    """
    if mode == "exhaustive":
        scenarios = _exhaustive_scenarios(max_size, variant)
    elif mode == "random":
        scenarios = [_random_scenario(i, max_size, seed, variant) for i in range(trials)]
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")

    bad = []
    for sc in scenarios:
        report, row = run_scenario(sc)
        reason = _judge(sc, report, row)
        if reason is not None:
            bad.append(Counterexample(sc, reason))
    return not bad, len(scenarios), bad
