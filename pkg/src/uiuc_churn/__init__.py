"""Simulator and trace checkers for the UIUC churn-tolerant linear overlay."""

from .checker import ALL_CHECKS, Verdict, analyze, run_checks
from .engine import ENV, SimConfig, Simulator, Snapshot, TraceRecord, simulate
from .protocol import NEG_INF, POS_INF, NodeState
from .scenario import Directive, Scenario, format_scenario, parse_scenario
from .skiplist import assign_level, line_search, skip_search
from .workload import collect_stats, generate_workload

__all__ = [
    "ALL_CHECKS",
    "Directive",
    "ENV",
    "NEG_INF",
    "NodeState",
    "POS_INF",
    "Scenario",
    "SimConfig",
    "Simulator",
    "Snapshot",
    "TraceRecord",
    "Verdict",
    "analyze",
    "assign_level",
    "collect_stats",
    "format_scenario",
    "generate_workload",
    "line_search",
    "parse_scenario",
    "run_checks",
    "simulate",
    "skip_search",
]
