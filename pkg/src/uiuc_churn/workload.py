"""Random workloads and run statistics."""

from __future__ import annotations

import random
from collections import deque
from typing import Dict, List, Optional

from .checker import TraceModel, analyze
from .scenario import Directive, Scenario

ID_SPACE = 10**9


def generate_workload(
    seed: int,
    size: int,
    join_rate: float,
    leave_rate: float,
    search_rate: float = 0.0,
    concurrency_cap: Optional[int] = None,
    *,
    initial_size: int = 0,
    window: int = 40,
) -> Scenario:
    """Seeded random scenario with ``size`` churn requests.

    Rates are per-step arrival probabilities (values above 1 mean several
    arrivals per step).  Searches ride along while churn is generated and do
    not count toward ``size``.  With ``concurrency_cap`` set, a churn arrival
    is dropped when ``cap`` churn requests were already issued within the
    trailing ``window`` steps; ``None`` never throttles.
    """
    rng = random.Random(seed)
    used = set()

    def fresh() -> int:
        while True:
            pid = rng.randrange(1, ID_SPACE)
            if pid not in used:
                used.add(pid)
                return pid

    init = sorted(fresh() for _ in range(initial_size))
    sc = Scenario(init=init)
    if size <= 0 or (join_rate <= 0 and leave_rate <= 0):
        return sc
    members = list(init)
    recent: deque = deque()
    churn = 0
    step = 0

    def arrivals(rate: float) -> int:
        n = int(rate)
        if rng.random() < rate - n:
            n += 1
        return n

    while churn < size:
        while recent and recent[0] <= step - window:
            recent.popleft()
        kinds = ["join"] * arrivals(join_rate) + ["leave"] * arrivals(leave_rate)
        rng.shuffle(kinds)
        for kind in kinds:
            if churn >= size:
                break
            if concurrency_cap is not None and len(recent) >= concurrency_cap:
                continue
            if kind == "join":
                pid = fresh()
                members.append(pid)
                sc.directives.append(Directive(step, "join", pid))
            else:
                if not members:
                    continue
                pid = members.pop(rng.randrange(len(members)))
                sc.directives.append(Directive(step, "leave", pid))
            recent.append(step)
            churn += 1
        for _ in range(arrivals(search_rate)):
            sc.directives.append(Directive(step, "search", rng.randrange(1, ID_SPACE)))
        step += 1
    return sc


def collect_stats(trace_or_model) -> Dict[str, object]:
    m = trace_or_model if isinstance(trace_or_model, TraceModel) else analyze(trace_or_model)
    done = [t for t in m.tickets.values() if t.satisfied_seq is not None]
    spans = sorted(t.satisfied_seq - t.inject_seq for t in done)
    stats = {
        "satisfied_joins": sum(1 for t in done if t.kind == "join"),
        "satisfied_leaves": sum(1 for t in done if t.kind == "leave"),
        "pending_at_stop": len(m.tickets) - len(done),
        "bounces": sum(t.bounces for t in m.tickets.values()),
        "searches_resolved": sum(1 for tok in m.searches if tok in m.resolved),
        "searches_unresolved": sum(1 for tok in m.searches if tok not in m.resolved),
        "max_concurrent_tickets": m.max_concurrent,
        "span_min": spans[0] if spans else 0,
        "span_median": spans[len(spans) // 2] if spans else 0,
        "span_max": spans[-1] if spans else 0,
        "end": m.end or "-",
    }
    return stats


def format_stats(stats: Dict[str, object]) -> str:
    return "".join(f"{k}\t{v}\n" for k, v in stats.items())
