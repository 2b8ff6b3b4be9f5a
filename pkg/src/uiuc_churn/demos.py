"""Two bundled demonstration scenarios.

``crash`` contrasts a crash-style exit with a cooperative leave of the
same interior process.  ``starve`` starves one leave under a scripted
scheduler that keeps inserting freshly joined processes just ahead of it.
Each demo reports the verdicts it produced and whether they match the
expected pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from .checker import (
    FAIL,
    PASS,
    Verdict,
    check_fair_request,
    check_request_progress,
    detect_partition,
    request_distances,
    run_checks,
    satisfied_requests,
)
from .engine import ENV, simulate
from .scenario import Directive, Scenario

DEMOS = ("crash", "starve")


@dataclass
class DemoResult:
    name: str
    verdicts: List[Verdict]
    expected: bool
    summary: List[str] = field(default_factory=list)
    traces: list = field(default_factory=list)


def crash_scenarios(members=(10, 20, 30, 40, 50), victim: int = 30):
    """The same overlay losing ``victim`` by crash and by a cooperative leave."""
    crash = Scenario(init=list(members), directives=[Directive(0, "adversarial-exit", victim)])
    polite = Scenario(init=list(members), directives=[Directive(0, "leave", victim)])
    return crash, polite


def starvation_scenario(cycles: int = 60, spacing: int = 1000, width: int = 10):
    """Scripted starvation of ``leave(width*spacing)`` injected at ``spacing``.

    Each cycle injects join ``y+1`` via the process ``y`` whose inbound lane
    holds the leave and drives that join to completion.  Only then does the
    leave take one hop, which lands on the newcomer.
    """
    members = [spacing * i for i in range(1, width + 1)]
    starved = members[-1]
    right = members[2]
    sc = Scenario(init=members, sched="scripted")
    sc.directives.append(Directive(0, "leave", starved, via=members[0]))
    sc.picks.append((ENV, members[0]))
    prev, y = members[0], members[1]
    step = 1
    for _ in range(cycles):
        j = y + 1
        sc.directives.append(Directive(step, "join", j, via=y))
        sc.picks += [
            (ENV, y), (y, j), (j, right), (right, j),
            (j, y), (y, right), (right, y), (y, j),
        ]
        sc.picks.append((prev, y))
        step += 9
        prev, y = y, j
    sc.stop = "script"
    sc.periodic_from = 1
    return sc


def run_crash_demo(seed: int = 0) -> DemoResult:
    crash, polite = crash_scenarios()
    a = simulate(crash, seed)
    b = simulate(polite, seed)
    va = detect_partition(a.snapshot())
    vb = detect_partition(b.snapshot())
    va = Verdict("partition[adversarial-exit]", va.status, va.witness, va.note)
    vb = Verdict("partition[cooperative-leave]", vb.status, vb.witness, vb.note)
    ok = va.status == FAIL and vb.status == PASS
    return DemoResult("crash", [va, vb], ok, traces=[a.trace, b.trace])


def run_starvation_demo(seed: int = 0, cycles: int = 60) -> DemoResult:
    sc = starvation_scenario(cycles)
    sim = simulate(sc, seed)
    starved = sc.directives[0].target
    progress = check_request_progress(sim.trace)
    fair = check_fair_request(sim.trace)
    dists = request_distances(sim.trace, "leave", starved)
    joins = sum(1 for kind, _ in satisfied_requests(sim.trace) if kind == "join")
    monotone = all(a <= b for a, b in zip(dists, dists[1:]))
    ok = (
        progress.status == PASS
        and fair.status == FAIL
        and f"leave {starved}" in fair.note
        and monotone
        and joins >= 50
    )
    summary = [
        f"satisfied joins {joins}",
        f"starved leave {starved} distances {dists[0]}..{dists[-1]} non-decreasing={monotone}",
        f"unfair schedule flagged={sim.unfair}",
    ]
    return DemoResult("starve", [progress, fair], ok, summary, [sim.trace])


def run_demo(name: str, seed: int = 0) -> DemoResult:
    if name == "crash":
        return run_crash_demo(seed)
    if name == "starve":
        return run_starvation_demo(seed)
    raise ValueError(f"unknown demo {name!r}")
