"""Acceptance suite: one test per criterion, each prints a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live.
"""
import io
import math
import random

from ncrepair.bench import cell_seed, oracle_check, run_scenario, sweep
from ncrepair.comm import (
    CommState,
    baseline_create_from_group,
    baseline_create_group,
    nc_agree,
    revoke,
)
from ncrepair.liveness import GroupSpec, adaptive_lda, naive_lda
from ncrepair.metrics import write_csv
from ncrepair.scenario import Scenario
from ncrepair.sim import build_world


def report(n, label, ok):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {label}")
    assert ok, f"criterion {n}: {label}"


def test_criterion_1_fault_free_cost():
    ok = True
    for s in range(1, 65):
        sc = Scenario(world_size=s, group=tuple(range(s)), variant="adaptive", faults={})
        rep, row = run_scenario(sc)
        full = tuple(range(s))
        ok = ok and all(r.survivors == full for r in rep.outcomes.values())
        ok = ok and row.payload_msgs == 2 * (s - 1)
        ok = ok and row.probe_msgs == 0
        ok = ok and row.virtual_time <= 2 * math.ceil(math.log2(s)) if s > 1 else ok
    report(1, "fault-free: full set, 2(s-1) payload msgs, 0 probes, logarithmic time", ok)


def test_criterion_2_exhaustive_prestart_oracle():
    ok, checked, bad = oracle_check(max_size=8, mode="exhaustive")
    report(2, f"exhaustive prestart oracle, {checked} scenarios", ok and checked == 502)


def test_criterion_3_agreement_under_midrun_faults():
    ok, checked, bad = oracle_check(max_size=64, mode="random", trials=1000, seed=0)
    report(3, f"agreement over {checked} randomized mid-run fault scenarios", ok and checked == 1000)


def test_criterion_4_reference_run_reproduction():
    g = GroupSpec(tuple(range(6)))
    w = build_world(6, {2: 0, 5: 0})
    naive = naive_lda(w, g)
    ok = {i: r.survivors for i, r in naive.items()} == {
        0: (0, 1, 4), 1: (0, 1, 4), 3: (3,), 4: (0, 1, 4)
    }
    ok = ok and naive[3].failed
    w = build_world(6, {2: 0, 5: 0})
    adaptive = adaptive_lda(w, g)
    ok = ok and {i: r.survivors for i, r in adaptive.items()} == {
        i: (0, 1, 3, 4) for i in (0, 1, 3, 4)
    }
    report(4, "naive run isolates rank 3, adaptive run agrees on {0,1,3,4}", ok)


def test_criterion_5_create_semantics_and_no_guarded_hangs():
    group = GroupSpec((0, 1, 2, 3))
    world6 = GroupSpec(tuple(range(6)))

    def statuses(out):
        return set(r.status for r in out.values())

    # two calls x {faulty outside group, faulty inside group, revoked}
    w = build_world(6, {5: 0})
    ok = statuses(baseline_create_group(w, CommState(world6), group)) == {"ok"}
    w = build_world(6, {2: 0})
    ok = ok and statuses(baseline_create_group(w, CommState(world6), group)) == {"deadlocked"}
    w = build_world(6, {2: 0})
    ok = ok and statuses(baseline_create_group(w, revoke(w, CommState(world6)), group)) == {"proc_failed"}
    w = build_world(6, {5: 0})
    ok = ok and statuses(baseline_create_from_group(w, group)) == {"ok"}
    w = build_world(6, {2: 0})
    ok = ok and statuses(baseline_create_from_group(w, group)) == {"deadlocked"}
    w = build_world(6)
    ok = ok and statuses(baseline_create_from_group(w, group, revoke(w, CommState(world6)))) == {"proc_failed"}

    # guarded variants must never hang
    rng = random.Random(5)
    variants = ("guarded_create_group", "guarded_create_from_group", "nc_shrink")
    for trial in range(500):
        s = rng.randint(2, 32)
        n_fail = rng.randint(1, s - 1)
        horizon = 2 * (s - 1).bit_length() + 2
        faults = {v: rng.randint(0, horizon) for v in rng.sample(range(s), n_fail)}
        sc = Scenario(
            world_size=s,
            group=tuple(range(s)),
            variant=variants[trial % 3],
            faults=faults,
            detect_on_send=bool(trial % 2),
            scenario_id=f"g{trial}",
        )
        _, row = run_scenario(sc)
        ok = ok and not row.deadlocked
    report(5, "six baseline create cases match; guarded calls never deadlock (500 runs)", ok)


def test_criterion_6_linear_worst_case():
    # one receiver scanning a dead run of length k pays k failed detections
    ok = True
    for k in range(1, 17):
        w = build_world(32, {r: 0 for r in range(16, 16 + k)})
        adaptive_lda(w, GroupSpec(tuple(range(32))))
        probes = sum(
            1
            for e in w.events
            if e.kind == "RECV" and e.result == "pf" and e.dst == 0 and e.pos == 16
        )
        ok = ok and probes == k
    report(6, "dead run of length k costs receiver exactly k probes, k in 1..16", ok)


def test_criterion_7_agree_flag_oracle():
    rng = random.Random(7)
    ok = True
    for trial in range(500):
        s = rng.randint(2, 24)
        flags = [rng.randint(0, 1) for _ in range(s)]
        n_fail = rng.randint(0, s - 1)
        horizon = 2 * (s - 1).bit_length() + 2
        faults = {v: rng.randint(0, horizon) for v in rng.sample(range(s), n_fail)}
        w = build_world(s, faults)
        out = nc_agree(w, GroupSpec(tuple(range(s))), flags)
        crashed = {e.src for e in w.events if e.kind == "FAIL"}
        views = {(r.survivors, r.flag) for i, r in out.items() if i not in crashed}
        ok = ok and len(views) <= 1
        for r in out.values():
            want = min((flags[i] for i in r.survivors), default=1)
            ok = ok and r.flag == want
    report(7, "nc_agree flag equals AND over returned survivors, callers agree (500 runs)", ok)


def test_criterion_8_participant_counts():
    rows = sweep(
        sizes=[4, 8, 16],
        fail_fracs=[0.0],
        reps=1,
        seed=0,
        variants=["nc_shrink", "collective_shrink"],
        world_size=64,
    )
    by = {(r.variant, r.s): r.participants for r in rows}
    ok = all(by[("nc_shrink", s)] == s for s in (4, 8, 16))
    ok = ok and all(by[("collective_shrink", s)] == 64 for s in (4, 8, 16))
    buf = io.StringIO()
    write_csv(rows, buf)
    ok = ok and len(buf.getvalue().splitlines()) == 7
    report(8, "nc_shrink touches comm-size processes, collective baseline touches 64", ok)


def test_criterion_9_determinism():
    sc = Scenario(
        world_size=6, group=tuple(range(6)), variant="adaptive",
        faults={2: 0, 5: 0}, seed=9, scenario_id="det",
    )
    rep1, row1 = run_scenario(sc)
    rep2, row2 = run_scenario(sc)
    ok = rep1.trace() == rep2.trace() and row1.csv() == row2.csv()

    def sweep_csv():
        buf = io.StringIO()
        write_csv(sweep([8, 16], [0.25, 0.5], 3, seed=42), buf)
        return buf.getvalue()

    ok = ok and sweep_csv() == sweep_csv()
    ok = ok and cell_seed(42, 8, 0.25, 0) == cell_seed(42, 8, 0.25, 0)
    report(9, "repeated runs produce byte-identical traces and CSV", ok)
