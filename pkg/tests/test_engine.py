import time

import pytest

from oracles import UNCONTENDED_JOIN, UNCONTENDED_LEAVE
from uiuc_churn import engine
from uiuc_churn.checker import detect_partition, check_search_resolution, walked_membership
from uiuc_churn.engine import (
    ENV,
    ScriptError,
    SimConfig,
    SimError,
    format_trace,
    parse_snapshot,
    read_trace,
    simulate,
)
from uiuc_churn.protocol import NEG_INF, POS_INF, Join
from uiuc_churn.scenario import Directive, Scenario, parse_scenario
from uiuc_churn.workload import generate_workload


def deliveries(trace):
    return [(r.process, r.peer, str(r.message)) for r in trace if r.kind == "deliver"]


def fresh(members, **kw):
    return engine.init(SimConfig(seed=kw.pop("seed", 0), initial_members=tuple(members), **kw))


def test_init_builds_line():
    sim = fresh([20, 10])
    nodes = sim.nodes
    assert nodes[NEG_INF].levels[0].right == 10
    assert (nodes[10].levels[0].left, nodes[10].levels[0].right) == (NEG_INF, 20)
    assert nodes[POS_INF].levels[0].left == 20
    assert sim.quiescent()


def test_init_empty_and_duplicates():
    sim = fresh([])
    assert sorted(sim.nodes) == [NEG_INF, POS_INF]
    with pytest.raises(SimError):
        fresh([10, 10])


def test_auto_target_is_seeded():
    targets = set()
    for _ in range(2):
        sim = fresh([10, 20, 30, 40], seed=5)
        targets.add(engine.inject_join(sim, 15))
    assert len(targets) == 1


def test_explicit_target_and_uniqueness():
    sim = fresh([10, 20])
    engine.inject_join(sim, 15, 10)
    assert list(sim.lanes[(ENV, 10)]) == [Join(15)]
    with pytest.raises(SimError):
        engine.inject_join(sim, 15, 20)


def test_leave_intent_on_idle_member():
    sim = fresh([5, 10, 20])
    engine.inject_leave_intent(sim, 10)
    rec = engine.step(sim)
    assert rec.detail == "guard emit-leave"
    sends = [r for r in sim.trace if r.kind == "send"]
    assert str(sends[0].message) == "leave(10,20)" and sends[0].peer == 5


def test_sentinel_leave_rejected():
    sim = fresh([10])
    with pytest.raises(SimError):
        engine.inject_leave_intent(sim, POS_INF)


def test_leave_emission_waits_for_busy_to_clear():
    sim = fresh([10, 20])
    engine.inject_join(sim, 15, 10)
    engine.step(sim)  # 10 accepts and turns busy
    assert sim.nodes[10].levels[0].busy
    engine.inject_leave_intent(sim, 10)
    engine.run_until(sim, "quiescence")
    trace = sim.trace
    tdb_at_10 = next(r.seq for r in trace if r.kind == "deliver" and r.process == 10
                     and str(r.message) == "tdb")
    leave_send = next(r.seq for r in trace if r.kind == "send" and str(r.message).startswith("leave(10"))
    assert leave_send > tdb_at_10
    assert walked_membership(sim.snapshot()) == [15, 20]


def test_single_message_is_delivered():
    sim = fresh([10, 20])
    engine.inject_join(sim, 15, 10)
    rec = engine.step(sim)
    assert (rec.kind, rec.process, rec.peer, str(rec.message)) == ("deliver", 10, ENV, "join(15)")


def test_replay_is_identical():
    sc = generate_workload(3, 60, 0.2, 0.2, 0.05, initial_size=10)
    a = format_trace(simulate(sc, 3).trace)
    b = format_trace(simulate(sc, 3).trace)
    assert a == b


def test_scripted_schedule_flags_starvation():
    sc = parse_scenario("""
        init 10 20
        sched scripted
        at 0 join 15 via 10
        at 0 search 20
    """)
    sim = simulate(sc, 0)
    # no picks at all: everything stays queued
    assert sim.unfair
    assert sim.trace[-2].detail == "unfair-schedule"
    assert sim.status == "script"


def test_scripted_pick_must_be_enabled():
    sc = parse_scenario("init 10 20\nsched scripted\npick 10 20\n")
    with pytest.raises(ScriptError):
        simulate(sc, 0)


def test_adversarial_exit_partitions_and_strands_search():
    sc = Scenario(init=[10, 20, 30], directives=[
        Directive(0, "adversarial-exit", 20),
    ])
    sim = engine.init(SimConfig(seed=0, initial_members=(10, 20, 30)), sc)
    engine.run_until(sim, "quiescence")
    assert detect_partition(sim.snapshot()).status == "fail"

    sim = engine.init(SimConfig(seed=0, initial_members=(10, 20, 30)))
    engine.adversarial_exit(sim, 20)
    sim.inject_search(30, target=10)
    engine.run_until(sim, "quiescence")
    assert check_search_resolution(sim.trace).status == "fail"
    assert any(r.detail == "discard" for r in sim.trace)


def test_empty_scenario_is_immediately_quiescent():
    sim = simulate(Scenario(), 0)
    assert sim.status == "quiescent" and sim.steps == 0


def test_uncontended_join_matches_hand_oracle():
    sim = simulate(Scenario(init=[10, 20], directives=[Directive(0, "join", 15, 10)]), 0)
    assert deliveries(sim.trace) == UNCONTENDED_JOIN
    assert walked_membership(sim.snapshot()) == [10, 15, 20]


def test_uncontended_leave_matches_hand_oracle():
    sim = simulate(Scenario(init=[5, 10, 20], directives=[Directive(0, "leave", 10)]), 0)
    assert deliveries(sim.trace) == UNCONTENDED_LEAVE
    assert [r.process for r in sim.trace if r.kind == "exit"] == [10]


def test_thousand_requests_finish_quickly():
    sc = generate_workload(11, 1000, 0.3, 0.3, 0.0, initial_size=50)
    start = time.perf_counter()
    sim = simulate(sc, 11, max_events=100_000)
    assert time.perf_counter() - start < 10
    assert sim.steps <= 100_000


def test_event_budget_truncates():
    sc = generate_workload(1, 50, 0.3, 0.3, initial_size=10)
    sim = simulate(sc, 1, max_events=40)
    assert sim.status == "truncated" and sim.steps == 40


def test_leave_waits_for_joiner_to_settle():
    sc = Scenario(init=[10, 20], directives=[Directive(0, "join", 15), Directive(0, "leave", 15)])
    sim = simulate(sc, 2)
    assert walked_membership(sim.snapshot()) == [10, 20]
    intent = next(r.seq for r in sim.trace if r.detail == "leave-intent")
    joined = next(r.seq for r in sim.trace if r.detail == "stage join 15 5")
    assert intent > joined


def test_trace_and_snapshot_text_round_trip():
    sc = generate_workload(4, 30, 0.3, 0.3, 0.1, initial_size=5)
    sim = simulate(sc, 4, max_events=150)
    text = format_trace(sim.trace)
    assert format_trace(read_trace(text)) == text
    snap = sim.snapshot()
    assert parse_snapshot(snap.format()).format() == snap.format()


def test_round_robin_runs_to_quiescence():
    sc = generate_workload(8, 80, 0.2, 0.2, 0.05, initial_size=10)
    sim = simulate(sc, 8, scheduler="round-robin")
    assert sim.status == "quiescent"
