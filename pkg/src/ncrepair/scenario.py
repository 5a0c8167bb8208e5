"""Line-oriented scenario files: `key = value`, `#` comments.

Repeated `fault` keys accumulate; `group`/`comm` accept either an
explicit comma list or a half-open `0..k` range.
"""
from __future__ import annotations

from dataclasses import dataclass, field

VARIANTS = (
    "naive",
    "adaptive",
    "baseline_create_group",
    "baseline_create_from_group",
    "guarded_create_group",
    "guarded_create_from_group",
    "nc_shrink",
    "nc_agree",
    "collective_shrink",
    "collective_agree",
)


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class Scenario:
    world_size: int
    group: tuple[int, ...]
    variant: str
    faults: dict[int, int] = field(default_factory=dict)  # world rank -> time, 0 = before start
    seed: int = 0
    detect_on_send: bool = True
    contributions: tuple[int, ...] | None = None
    comm: tuple[int, ...] | None = None
    revoked: bool = False
    scenario_id: str = "scenario"


def _parse_ranks(value: str, line: int) -> tuple[int, ...]:
    value = value.strip()
    if ".." in value:
        lo_s, hi_s = value.split("..", 1)
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ScenarioError(f"bad range {value!r}", line) from None
        if hi <= lo:
            raise ScenarioError(f"empty range {value!r}", line)
        return tuple(range(lo, hi))
    try:
        return tuple(int(x) for x in value.split(","))
    except ValueError:
        raise ScenarioError(f"bad rank list {value!r}", line) from None


def _parse_bool(value: str, line: int) -> bool:
    v = value.strip().lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ScenarioError(f"bad boolean {value!r}", line)


def parse_scenario(text: str, scenario_id: str = "scenario") -> Scenario:
    fields: dict[str, object] = {"faults": {}, "scenario_id": scenario_id}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"expected key = value, got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key != "fault" and key in seen:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        seen.add(key)
        if key == "world_size":
            fields["world_size"] = _parse_int(value, lineno)
        elif key == "group":
            fields["group"] = _parse_ranks(value, lineno)
        elif key == "comm":
            fields["comm"] = _parse_ranks(value, lineno)
        elif key == "variant":
            if value not in VARIANTS:
                raise ScenarioError(f"unknown variant {value!r}", lineno)
            fields["variant"] = value
        elif key == "fault":
            if "@" not in value:
                raise ScenarioError(f"fault must be rank@start or rank@t<int>, got {value!r}", lineno)
            rank_s, when = value.split("@", 1)
            rank = _parse_int(rank_s, lineno)
            if when == "start":
                t = 0
            elif when.startswith("t"):
                t = _parse_int(when[1:], lineno)
            else:
                raise ScenarioError(f"bad fault time {when!r}", lineno)
            if t < 0:
                raise ScenarioError("fault time must be non-negative", lineno)
            fields["faults"][rank] = t  # type: ignore[index]
        elif key == "seed":
            fields["seed"] = _parse_int(value, lineno)
        elif key == "detect_on_send":
            fields["detect_on_send"] = _parse_bool(value, lineno)
        elif key == "revoked":
            fields["revoked"] = _parse_bool(value, lineno)
        elif key == "contributions":
            bits = tuple(_parse_int(x, lineno) for x in value.split(","))
            if any(b not in (0, 1) for b in bits):
                raise ScenarioError("contributions must be bits", lineno)
            fields["contributions"] = bits
        elif key == "id":
            fields["scenario_id"] = value
        else:
            raise ScenarioError(f"unknown key {key!r}", lineno)

    for required in ("world_size", "group", "variant"):
        if required not in fields:
            raise ScenarioError(f"missing required key {required!r}")
    sc = Scenario(**fields)  # type: ignore[arg-type]
    _validate(sc)
    return sc


def _parse_int(value: str, line: int) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise ScenarioError(f"bad integer {value!r}", line) from None


def _validate(sc: Scenario) -> None:
    if sc.world_size < 1:
        raise ScenarioError(f"world_size must be >= 1, got {sc.world_size}")
    for name, ranks in (("group", sc.group), ("comm", sc.comm or ())):
        if len(set(ranks)) != len(ranks):
            raise ScenarioError(f"{name} ranks must be distinct")
        for r in ranks:
            if not 0 <= r < sc.world_size:
                raise ScenarioError(f"{name} rank {r} out of range for world {sc.world_size}")
    for r in sc.faults:
        if not 0 <= r < sc.world_size:
            raise ScenarioError(f"fault rank {r} out of range for world {sc.world_size}")
    if sc.contributions is not None and len(sc.contributions) != len(sc.group):
        raise ScenarioError("contributions must have one bit per group member")


def format_scenario(sc: Scenario) -> str:
    """Render back into scenario-file syntax (used for counterexamples)."""
    lines = [
        f"id = {sc.scenario_id}",
        f"world_size = {sc.world_size}",
        f"group = {','.join(str(r) for r in sc.group)}",
        f"variant = {sc.variant}",
    ]
    for rank, t in sorted(sc.faults.items()):
        lines.append(f"fault = {rank}@start" if t == 0 else f"fault = {rank}@t{t}")
    lines.append(f"seed = {sc.seed}")
    if not sc.detect_on_send:
        lines.append("detect_on_send = false")
    if sc.revoked:
        lines.append("revoked = true")
    if sc.comm is not None:
        lines.append(f"comm = {','.join(str(r) for r in sc.comm)}")
    if sc.contributions is not None:
        lines.append(f"contributions = {','.join(str(b) for b in sc.contributions)}")
    return "\n".join(lines)
