"""Deterministic simulator for non-collective communicator creation and repair.

Models fail-stop processes exchanging messages over binomial trees,
with a naive and a fault-adaptive liveness discovery engine, plus the
communicator create/shrink/agree operations built on top of them.
"""

from .bench import Counterexample, oracle_check, run_scenario, sweep
from .comm import (
    CommState,
    CreateResult,
    baseline_create_from_group,
    baseline_create_group,
    collective_agree_baseline,
    collective_shrink_baseline,
    guarded_create_from_group,
    guarded_create_group,
    nc_agree,
    nc_shrink,
    revoke,
)
from .liveness import GroupSpec, ProcessResult, adaptive_lda, naive_lda
from .metrics import CSV_HEADER, MetricsRow, RunReport, check_accuracy, check_agreement, summarize, write_csv
from .scenario import Scenario, ScenarioError, parse_scenario
from .sim import Completed, Deadlock, World, build_world
from .topology import TreeShape, children, inherit, inherited_positions, level, parent, subtree_range
from .wire import RankSetPayload, WireError, decode_rank_set, encode_rank_set

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "CommState",
    "Completed",
    "Counterexample",
    "CreateResult",
    "Deadlock",
    "GroupSpec",
    "MetricsRow",
    "ProcessResult",
    "RankSetPayload",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "TreeShape",
    "WireError",
    "World",
    "adaptive_lda",
    "baseline_create_from_group",
    "baseline_create_group",
    "build_world",
    "check_accuracy",
    "check_agreement",
    "children",
    "collective_agree_baseline",
    "collective_shrink_baseline",
    "decode_rank_set",
    "encode_rank_set",
    "guarded_create_from_group",
    "guarded_create_group",
    "inherit",
    "inherited_positions",
    "level",
    "naive_lda",
    "nc_agree",
    "nc_shrink",
    "oracle_check",
    "parent",
    "parse_scenario",
    "revoke",
    "run_scenario",
    "subtree_range",
    "summarize",
    "sweep",
    "write_csv",
]
