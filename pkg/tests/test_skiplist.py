import random

from uiuc_churn.checker import analyze, check_linearization, check_sublist, run_checks
from uiuc_churn.engine import simulate
from uiuc_churn.protocol import NEG_INF, POS_INF, new_sentinel
from uiuc_churn.scenario import Directive, Scenario
from uiuc_churn.skiplist import MultiLevelNode, assign_level, line_search, skip_search
from uiuc_churn.workload import generate_workload

SEED = 3
CAP = 4


def with_level(level, start=100):
    pid = start
    while assign_level(pid, SEED, CAP) != level:
        pid += 1
    return pid


def skip_run(init, *directives):
    sc = Scenario(init=list(init), directives=list(directives))
    return simulate(sc, SEED, mode="skiplist", max_level=CAP)


def test_assign_level_is_stable_and_capped():
    assert assign_level(12345, 7) == assign_level(12345, 7)
    levels = [assign_level(pid, 7, CAP) for pid in range(1, 10_001)]
    assert max(levels) <= CAP
    frac = sum(1 for lv in levels if lv >= 1) / len(levels)
    assert abs(frac - 0.5) <= 0.03
    assert assign_level(POS_INF, 7, CAP) == CAP


def stage5(trace, kind, pid):
    return sorted((r.level, r.seq) for r in trace
                  if r.kind == "annotation" and r.detail == f"stage {kind} {pid} 5")


def test_level_zero_join_is_plain():
    pid = with_level(0)
    sim = skip_run([], Directive(0, "join", pid))
    assert [lv for lv, _ in stage5(sim.trace, "join", pid)] == [0]
    assert not any(r.detail == "climb" for r in sim.trace)


def test_level_two_join_climbs_in_order():
    pid = with_level(2)
    sim = skip_run([], Directive(0, "join", pid))
    done = stage5(sim.trace, "join", pid)
    assert [lv for lv, _ in done] == [0, 1, 2]
    assert [s for _, s in done] == sorted(s for _, s in done)
    assert check_sublist(sim.snapshot()).status == "pass"


def test_concurrent_joiners_at_different_levels():
    a, b, c = with_level(0, 100), with_level(1, 500), with_level(3, 900)
    sim = skip_run([with_level(2, 300)], Directive(0, "join", a), Directive(0, "join", b),
                   Directive(0, "join", c))
    snap = sim.snapshot()
    assert all(check_linearization(snap, k).status == "pass" for k in range(CAP + 1))
    assert check_sublist(snap).status == "pass"


def test_level_zero_leave_is_plain():
    pid = with_level(0)
    sim = skip_run([pid], Directive(0, "leave", pid))
    leaves = [r for r in sim.trace if r.detail.startswith(f"stage leave {pid} 5")]
    assert [r.level for r in leaves] == [0]


def test_leave_descends_levels():
    pid = with_level(2)
    sim = skip_run([pid], Directive(0, "leave", pid))
    assert [lv for lv, _ in sorted(stage5(sim.trace, "leave", pid), key=lambda x: x[1])] == [2, 1, 0]
    assert [r.process for r in sim.trace if r.kind == "exit"] == [pid]
    tickets = analyze(sim.trace).tickets
    assert {k for k in tickets if k[1] == pid} == {("leave", pid, k) for k in (0, 1, 2)}


def test_skip_search_matches_line_search():
    sc = generate_workload(5, 80, 0.3, 0.1, initial_size=20)
    sim = simulate(sc, 5, mode="skiplist", max_level=CAP)
    nodes = sim.snapshot().nodes
    members = [p for p, n in nodes.items() if n.alive and n.joined(0)]
    rng = random.Random(1)
    keys = rng.sample(members, 5) + [rng.randrange(1, 10**9) for _ in range(50)]
    for key in keys:
        assert skip_search(nodes, key)[0] == line_search(nodes, key)[0]
    assert skip_search(nodes, members[1])[0] == "found"


def test_search_on_empty_overlay():
    nodes = {
        NEG_INF: MultiLevelNode(NEG_INF, 0, [new_sentinel(NEG_INF, POS_INF)]),
        POS_INF: MultiLevelNode(POS_INF, 0, [new_sentinel(POS_INF, NEG_INF)]),
    }
    assert skip_search(nodes, 42) == ("absent", 0)
    assert line_search(nodes, 42)[0] == "absent"


def test_skiplist_run_passes_all_checks():
    sc = generate_workload(6, 120, 0.15, 0.15, 0.03, initial_size=25)
    sim = simulate(sc, 6, mode="skiplist", max_level=CAP)
    bad = [v.line() for v in run_checks(sim.trace, sim.snapshot()) if v.status != "pass"]
    assert bad == []
