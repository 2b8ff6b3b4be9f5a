"""Scenario text format.

One directive per line, ``#`` starts a comment::

    init 10 20 30
    sched fair-random
    at 0 join 15
    at 4 join 25 via 20
    at 9 leave 10
    at 9 search 17
    at 12 adversarial-exit 30
    stop quiescence

Scripted runs add ``pick <from> <to>`` lines (``env`` names the
environment) and may end with ``stop periodic <step>`` to declare that the
schedule from ``<step>`` on repeats forever.  ``at`` counts scheduler steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .protocol import format_id, is_ordinary, parse_id

SCHEDULERS = ("fair-random", "round-robin", "scripted")
OPS = ("join", "leave", "search", "adversarial-exit")


class ScenarioError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Directive:
    step: int
    op: str
    target: int
    via: Optional[int] = None


Pick = Tuple[Union[int, str], Union[int, str]]


@dataclass
class Scenario:
    init: List[int] = field(default_factory=list)
    directives: List[Directive] = field(default_factory=list)
    sched: Optional[str] = None
    picks: List[Pick] = field(default_factory=list)
    stop: Union[str, int] = "quiescence"
    periodic_from: Optional[int] = None

    def joins(self) -> List[int]:
        return [d.target for d in self.directives if d.op == "join"]


def _pid(tok: str, lineno: int) -> int:
    try:
        pid = parse_id(tok)
    except ValueError:
        raise ScenarioError(lineno, f"bad id {tok!r}") from None
    if pid is None:
        raise ScenarioError(lineno, "missing id")
    return pid


def _endpoint(tok: str, lineno: int):
    return "env" if tok == "env" else _pid(tok, lineno)


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    seen_ids = set()
    last_step = -1
    saw_init = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        if head == "init":
            if saw_init:
                raise ScenarioError(lineno, "init given twice")
            saw_init = True
            ids = [_pid(t, lineno) for t in tok[1:]]
            for pid in ids:
                if not is_ordinary(pid):
                    raise ScenarioError(lineno, "sentinels are implicit")
                if pid in seen_ids:
                    raise ScenarioError(lineno, f"duplicate id {format_id(pid)}")
                seen_ids.add(pid)
            sc.init = sorted(ids)
        elif head == "at":
            if len(tok) < 4:
                raise ScenarioError(lineno, "expected: at <step> <op> <id>")
            try:
                step = int(tok[1])
            except ValueError:
                raise ScenarioError(lineno, f"bad step {tok[1]!r}") from None
            if step < last_step:
                raise ScenarioError(lineno, "directives are not sorted by step")
            last_step = step
            op = tok[2]
            if op not in OPS:
                raise ScenarioError(lineno, f"unknown operation {op!r}")
            target = _pid(tok[3], lineno)
            via = None
            rest = tok[4:]
            if rest:
                if op not in ("join", "leave") or len(rest) != 2 or rest[0] != "via":
                    raise ScenarioError(lineno, f"unexpected {' '.join(rest)!r}")
                via = _pid(rest[1], lineno)
            if op == "join":
                if target in seen_ids:
                    raise ScenarioError(lineno, f"id {format_id(target)} joins twice")
                if not is_ordinary(target):
                    raise ScenarioError(lineno, "a sentinel cannot join")
                seen_ids.add(target)
            sc.directives.append(Directive(step, op, target, via))
        elif head == "sched":
            if len(tok) != 2 or tok[1] not in SCHEDULERS:
                raise ScenarioError(lineno, f"unknown scheduler {' '.join(tok[1:])!r}")
            sc.sched = tok[1]
        elif head == "pick":
            if len(tok) != 3:
                raise ScenarioError(lineno, "expected: pick <from> <to>")
            if tok[1] == "emit":
                sc.picks.append(("emit", _pid(tok[2], lineno)))
            else:
                sc.picks.append((_endpoint(tok[1], lineno), _pid(tok[2], lineno)))
        elif head == "stop":
            if len(tok) == 2 and tok[1] == "quiescence":
                sc.stop = "quiescence"
            elif len(tok) == 2 and tok[1].isdigit():
                sc.stop = int(tok[1])
            elif len(tok) == 3 and tok[1] == "periodic" and tok[2].isdigit():
                sc.stop = "script"
                sc.periodic_from = int(tok[2])
            else:
                raise ScenarioError(lineno, f"bad stop directive {line!r}")
        else:
            raise ScenarioError(lineno, f"unknown directive {head!r}")
    return sc


def format_scenario(sc: Scenario) -> str:
    out = []
    if sc.init:
        out.append("init " + " ".join(format_id(p) for p in sc.init))
    if sc.sched:
        out.append(f"sched {sc.sched}")
    for d in sc.directives:
        line = f"at {d.step} {d.op} {format_id(d.target)}"
        if d.via is not None:
            line += f" via {format_id(d.via)}"
        out.append(line)
    for a, b in sc.picks:
        out.append(f"pick {a if isinstance(a, str) else format_id(a)} {format_id(b)}")
    if sc.periodic_from is not None:
        out.append(f"stop periodic {sc.periodic_from}")
    elif sc.stop != "quiescence":
        out.append(f"stop {sc.stop}")
    else:
        out.append("stop quiescence")
    return "\n".join(out) + "\n"
