"""Command-line entry point: ``uiuc-churn run ...``.

Without ``--scenario`` a workload is generated from the seed.  Exit status
is 0 when every selected check passes (a not-yet-violated liveness verdict
on a truncated run does not count as a failure), 1 when one fails, and 2 on
bad flags or unreadable input.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from .checker import ALL_CHECKS, FAIL, format_report, run_checks
from .demos import DEMOS, run_demo
from .engine import SimError, format_trace, simulate
from .scenario import SCHEDULERS, ScenarioError, parse_scenario
from .skiplist import DEFAULT_LEVEL_CAP
from .workload import collect_stats, format_stats, generate_workload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uiuc-churn", description="UIUC overlay simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="simulate a scenario and check the trace")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--scenario", metavar="PATH", help="scenario file (default: generated)")
    run.add_argument("--mode", choices=("line", "skiplist"), default="line")
    run.add_argument("--max-level", type=int, default=DEFAULT_LEVEL_CAP)
    run.add_argument("--max-events", type=int, default=1_000_000)
    run.add_argument("--sched", choices=SCHEDULERS, help="override the scenario scheduler")
    run.add_argument("--trace", metavar="PATH")
    run.add_argument("--snapshot", metavar="PATH")
    run.add_argument("--stats", metavar="PATH")
    run.add_argument("--check", metavar="LIST", help="comma-separated checks, or 'all'")
    run.add_argument("--demo", choices=DEMOS)
    run.add_argument("--batch", type=int, default=1, metavar="N",
                     help="run seeds seed..seed+N-1; output paths get a .<seed> suffix")
    run.add_argument("--workers", type=int, default=None, help="processes for --batch")
    gen = run.add_argument_group("generated workload")
    gen.add_argument("--size", type=int, default=200, help="churn requests")
    gen.add_argument("--initial", type=int, default=50, help="initial members")
    gen.add_argument("--join-rate", type=float, default=0.1)
    gen.add_argument("--leave-rate", type=float, default=0.1)
    gen.add_argument("--search-rate", type=float, default=0.02)
    gen.add_argument("--cap", type=int, default=None, help="concurrency cap (default: none)")
    return parser


def _checks(text: Optional[str]) -> List[str]:
    if not text:
        return []
    if text == "all":
        return list(ALL_CHECKS)
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [n for n in names if n not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(ALL_CHECKS)}")
    return names


def _write(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _suffixed(path: Optional[str], tag) -> Optional[str]:
    return f"{path}.{tag}" if path else None


def _run_one(args, scenario_text: Optional[str], seed: int, suffix: bool):
    """Simulate one seed; returns (report text, failed)."""
    if scenario_text is not None:
        sc = parse_scenario(scenario_text)
    else:
        sc = generate_workload(seed, args.size, args.join_rate, args.leave_rate,
                               args.search_rate, args.cap, initial_size=args.initial)
    sim = simulate(sc, seed, mode=args.mode, max_level=args.max_level,
                   max_events=args.max_events, scheduler=args.sched)
    snap = sim.snapshot()
    tag = seed if suffix else None

    def out(path):
        return _suffixed(path, tag) if suffix else path

    _write(out(args.trace), format_trace(sim.trace))
    _write(out(args.snapshot), snap.format())
    _write(out(args.stats), format_stats(collect_stats(sim.trace)))
    verdicts = run_checks(sim.trace, snap, args.checks) if args.checks else []
    header = f"seed {seed} end {sim.status} steps {sim.steps}\n"
    return header + format_report(verdicts), any(v.status == FAIL for v in verdicts)


def _run_demo(args) -> int:
    res = run_demo(args.demo, args.seed)
    for v in res.verdicts:
        print(v.line() + (f"  {v.note}" if v.note else ""))
    for line in res.summary:
        print(line)
    print(f"expected pattern: {'yes' if res.expected else 'no'}")
    for i, trace in enumerate(res.traces):
        path = args.trace if len(res.traces) == 1 else _suffixed(args.trace, i)
        _write(path, format_trace(trace))
    return 0 if res.expected else 1


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.checks = _checks(args.check)
    except ValueError as exc:
        parser.error(str(exc))
    if args.batch < 1:
        parser.error("--batch must be at least 1")
    if args.max_level < 0:
        parser.error("--max-level must be non-negative")
    if args.demo:
        return _run_demo(args)
    text = None
    if args.scenario:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
            parse_scenario(text)
        except (OSError, ScenarioError) as exc:
            print(f"uiuc-churn: {exc}", file=sys.stderr)
            return 2
    seeds = range(args.seed, args.seed + args.batch)
    try:
        if args.batch == 1:
            results = [_run_one(args, text, args.seed, False)]
        else:
            workers = args.workers or os.cpu_count() or 1
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_one, [args] * len(seeds), [text] * len(seeds),
                                        seeds, [True] * len(seeds)))
    except SimError as exc:
        print(f"uiuc-churn: {exc}", file=sys.stderr)
        return 2
    failed = False
    for report, bad in results:
        sys.stdout.write(report)
        failed = failed or bad
    return 1 if failed else 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
