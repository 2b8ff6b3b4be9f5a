"""Deterministic discrete-event executor for UIUC overlays.

Channels are FIFO lanes keyed by ordered (sender, receiver) pair; messages
of every level share the lane of their pair.  The environment is the
virtual sender :data:`ENV`.  Time is the scheduler step counter; nothing
here reads a clock.

A run is fully determined by ``(config, scenario)``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from .protocol import (
    NEG_INF,
    POS_INF,
    Join,
    Leave,
    Lifecycle,
    Message,
    NodeState,
    NotReady,
    ProtocolError,
    Search,
    dispatch,
    format_id,
    format_state,
    is_ordinary,
    leave_enabled,
    maybe_emit_leave,
    new_joiner,
    new_member,
    new_sentinel,
    parse_id,
    parse_message,
    parse_state,
    set_leaving,
)
from .scenario import Directive, Scenario
from .skiplist import (
    DEFAULT_LEVEL_CAP,
    MultiLevelNode,
    assign_level,
    begin_leave,
    orchestrate_join,
    orchestrate_leave,
    skip_route,
)

ENV = "env"

RECORD_KINDS = ("inject", "deliver", "send", "state", "exit", "annotation")


class SimError(Exception):
    """Invalid configuration or rejected injection."""


class ScriptError(SimError):
    """A scripted pick named a lane with nothing to deliver."""


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    initial_members: Tuple[int, ...] = ()
    max_events: int = 1_000_000
    scheduler: str = "fair-random"
    mode: str = "line"
    max_level: int = DEFAULT_LEVEL_CAP


class TraceRecord(NamedTuple):
    seq: int
    kind: str
    process: Union[int, str, None]
    peer: Union[int, str, None]
    message: Optional[Message]
    detail: str
    level: int

    def format(self) -> str:
        return "\t".join(
            (
                str(self.seq),
                self.kind,
                _fmt_endpoint(self.process),
                _fmt_endpoint(self.peer),
                str(self.message) if self.message is not None else "-",
                self.detail or "-",
                str(self.level),
            )
        )


def _fmt_endpoint(x) -> str:
    if isinstance(x, str):
        return x
    return format_id(x)


def _parse_endpoint(text: str):
    return text if text == ENV else parse_id(text)


def parse_record(line: str) -> TraceRecord:
    seq, kind, proc, peer, msg, detail, level = line.rstrip("\n").split("\t")
    lvl = int(level)
    return TraceRecord(
        int(seq),
        kind,
        _parse_endpoint(proc),
        _parse_endpoint(peer),
        None if msg == "-" else parse_message(msg, lvl),
        "" if detail == "-" else detail,
        lvl,
    )


def format_trace(trace: Iterable[TraceRecord]) -> str:
    return "".join(rec.format() + "\n" for rec in trace)


def read_trace(text: str) -> List[TraceRecord]:
    return [parse_record(line) for line in text.splitlines() if line.strip()]


@dataclass
class Snapshot:
    nodes: Dict[int, MultiLevelNode]
    lanes: Dict[tuple, List[Message]]
    pending: List[Directive] = field(default_factory=list)
    mode: str = "line"
    quiescent: bool = False

    def alive(self) -> List[int]:
        return sorted(p for p, n in self.nodes.items() if n.alive)

    def format(self) -> str:
        out = []
        for pid in sorted(self.nodes):
            node = self.nodes[pid]
            for k, st in enumerate(node.levels):
                if st is None:
                    continue
                if not node.alive and st.lifecycle is not Lifecycle.EXITED:
                    lc = "X"
                else:
                    lc = st.lifecycle.value
                line = (
                    f"node {format_id(pid)} left={format_id(st.left)} "
                    f"right={format_id(st.right)} busy={int(st.busy)} "
                    f"leaving={int(st.leaving)} lifecycle={lc}"
                )
                if self.mode == "skiplist":
                    line += f" level={k}"
                out.append(line)
        for (a, b), msgs in self.lanes.items():
            if msgs:
                body = " ".join(f"{m}@{m.level}" for m in msgs)
                out.append(f"chan {_fmt_endpoint(a)} {_fmt_endpoint(b)} {len(msgs)}: {body}")
        return "\n".join(out) + "\n"


def parse_snapshot(text: str) -> Snapshot:
    nodes: Dict[int, MultiLevelNode] = {}
    lanes: Dict[tuple, List[Message]] = {}
    mode = "line"
    for line in text.splitlines():
        if line.startswith("node "):
            tok = line.split()
            pid = parse_id(tok[1])
            fields = dict(t.split("=", 1) for t in tok[2:])
            level = int(fields.pop("level", 0))
            if level:
                mode = "skiplist"
            st = parse_state(pid, " ".join(f"{k}={v}" for k, v in fields.items()), level)
            node = nodes.setdefault(pid, MultiLevelNode(pid, 0, []))
            while len(node.levels) <= level:
                node.levels.append(None)
            node.levels[level] = st
            node.top = max(node.top, level)
        elif line.startswith("chan "):
            head, _, body = line.partition(": ")
            _, a, b, _n = head.split()
            msgs = []
            for tok in body.split():
                text, _, lvl = tok.rpartition("@")
                msgs.append(parse_message(text, int(lvl)))
            lanes[(_parse_endpoint(a), _parse_endpoint(b))] = msgs
    for node in nodes.values():
        node.alive = all(
            st is None or st.lifecycle is not Lifecycle.EXITED for st in node.levels
        )
    return Snapshot(nodes, lanes, mode=mode, quiescent=not any(lanes.values()))


class Simulator:
    """One simulation run.  Not thread-safe; run one instance per thread."""

    def __init__(self, config: SimConfig, scenario: Optional[Scenario] = None):
        if config.scheduler not in ("fair-random", "round-robin", "scripted"):
            raise SimError(f"unknown scheduler {config.scheduler!r}")
        if config.mode not in ("line", "skiplist"):
            raise SimError(f"unknown mode {config.mode!r}")
        members = list(config.initial_members)
        if len(set(members)) != len(members):
            raise SimError("duplicate initial member")
        if any(not is_ordinary(p) for p in members):
            raise SimError("initial members must be ordinary ids")
        members.sort()
        self.config = config
        self.scenario = scenario
        self.skiplist = config.mode == "skiplist"
        self.cap = config.max_level if self.skiplist else 0
        self.rng = random.Random(config.seed)
        self.trace: List[TraceRecord] = []
        self.nodes: Dict[int, MultiLevelNode] = {}
        self.lanes: Dict[tuple, deque] = {}
        self._senders: Dict[int, Dict] = {}
        self.used_ids = set(members)
        self.steps = 0
        self.tokens = 0
        self.discarded: List[TraceRecord] = []
        self.status: Optional[str] = None
        self.unfair = False
        # enabled items: ("L", sender, receiver) or ("G", pid, level)
        self._items: List[tuple] = []
        self._index: Dict[tuple, int] = {}
        self._rr: deque = deque()
        self._queued = set()
        self._future: deque = deque(scenario.directives if scenario else ())
        # leave directives waiting for their target to settle, keyed by pid
        self._deferred: Dict[int, Directive] = {}
        self._wake = set()
        self._picks = list(scenario.picks) if scenario else []
        self._pick_at = 0
        self._periodic_seq: Optional[int] = None
        self._build(members)

    # ------------------------------------------------------------------ setup

    def _top(self, pid: int) -> int:
        return assign_level(pid, self.config.seed, self.cap) if self.skiplist else 0

    def _build(self, members: List[int]) -> None:
        everyone = [NEG_INF] + members + [POS_INF]
        tops = {p: self._top(p) for p in everyone}
        for p in everyone:
            self.nodes[p] = MultiLevelNode(p, tops[p], [None] * (tops[p] + 1))
        for k in range(self.cap + 1):
            line = [p for p in everyone if tops[p] >= k]
            for i, p in enumerate(line):
                if p == NEG_INF:
                    st = new_sentinel(p, line[1], k)
                elif p == POS_INF:
                    st = new_sentinel(p, line[-2], k)
                else:
                    st = new_member(p, line[i - 1], line[i + 1], k)
                self.nodes[p].levels[k] = st
        for p in everyone:
            for k, st in enumerate(self.nodes[p].levels):
                self._rec("state", p, None, None, format_state(st), k)

    # -------------------------------------------------------------- recording

    def _rec(self, kind, process, peer, message, detail, level) -> TraceRecord:
        rec = TraceRecord(len(self.trace), kind, process, peer, message, detail, level)
        self.trace.append(rec)
        return rec

    def _note(self, process, detail, level=0, peer=None, message=None) -> None:
        self._rec("annotation", process, peer, message, detail, level)

    # ------------------------------------------------------------ enabled set

    def _enable(self, item) -> None:
        if item in self._index:
            return
        self._index[item] = len(self._items)
        self._items.append(item)
        if item not in self._queued:
            self._queued.add(item)
            self._rr.append(item)

    def _disable(self, item) -> None:
        i = self._index.pop(item, None)
        if i is None:
            return
        last = self._items.pop()
        if i < len(self._items):
            self._items[i] = last
            self._index[last] = i

    def _refresh_guards(self, node: MultiLevelNode) -> None:
        for k, st in enumerate(node.levels):
            item = ("G", node.id, k)
            if node.alive and st is not None and leave_enabled(st):
                self._enable(item)
            else:
                self._disable(item)

    # --------------------------------------------------------------- channels

    def _send(self, src, dest, msg: Message) -> None:
        if dest is None:
            self._note(src, f"corruption send-to-bottom {msg.kind}", msg.level)
            return
        self._rec("send", src, dest, msg, "", msg.level)
        node = self.nodes.get(dest)
        if node is None or not node.alive:
            self.discarded.append(self._rec("annotation", dest, src, msg, "discard", msg.level))
            return
        key = (src, dest)
        lane = self.lanes.get(key)
        if lane is None:
            lane = self.lanes[key] = deque()
            self._senders.setdefault(dest, {})[src] = None
        lane.append(msg)
        self._enable(("L", src, dest))

    def _exit(self, pid: int, how: str) -> None:
        node = self.nodes[pid]
        node.alive = False
        self._wake.add(pid)
        self._rec("exit", pid, None, None, how, 0)
        for src in list(self._senders.pop(pid, {})):
            lane = self.lanes.pop((src, pid))
            self._disable(("L", src, pid))
            for msg in lane:
                self.discarded.append(
                    self._rec("annotation", pid, src, msg, "discard", msg.level)
                )
        self._refresh_guards(node)

    # ------------------------------------------------------------- injection

    def _eligible(self, pid: int) -> bool:
        node = self.nodes.get(pid)
        return (
            node is not None
            and node.alive
            and node.joined(0)
            and not node.leaving()
            and pid not in self._deferred
        )

    def _auto_target(self) -> int:
        candidates = [p for p in sorted(self.nodes) if self._eligible(p)]
        return self.rng.choice(candidates)

    def inject_join(self, req_id: int, target: Optional[int] = None) -> int:
        if not is_ordinary(req_id):
            raise SimError("a sentinel cannot join")
        if req_id in self.used_ids:
            raise SimError(f"id {format_id(req_id)} was already used")
        if target is None:
            target = self._auto_target()
        elif not self._eligible(target):
            raise SimError(f"target {format_id(target)} cannot take injections")
        self.used_ids.add(req_id)
        node = MultiLevelNode(req_id, self._top(req_id), [new_joiner(req_id)])
        self.nodes[req_id] = node
        msg = Join(req_id, 0)
        self._rec("inject", target, ENV, msg, "join", 0)
        self._rec("state", req_id, None, None, format_state(node.levels[0]), 0)
        self._enqueue_env(target, msg)
        return target

    def _enqueue_env(self, target: int, msg: Message) -> None:
        key = (ENV, target)
        lane = self.lanes.get(key)
        if lane is None:
            lane = self.lanes[key] = deque()
            self._senders.setdefault(target, {})[ENV] = None
        lane.append(msg)
        self._enable(("L", ENV, target))

    def _check_leaver(self, pid: int) -> MultiLevelNode:
        if not is_ordinary(pid):
            raise SimError("the largest and smallest processes may not leave")
        node = self.nodes.get(pid)
        if node is None or not node.alive:
            raise SimError(f"{format_id(pid)} is not a member")
        if node.leaving():
            raise SimError(f"{format_id(pid)} is already leaving")
        return node

    def leave_ready(self, pid: int) -> bool:
        node = self.nodes.get(pid)
        lane = self.lanes.get((ENV, pid))
        return node is not None and node.fully_joined() and not lane

    def inject_leave_intent(self, pid: int) -> None:
        """Set ``leaving`` on ``pid``; the Leave itself goes out via the guarded action."""
        node = self._check_leaver(pid)
        if not self.leave_ready(pid):
            raise SimError(f"{format_id(pid)} is not ready to leave")
        k = begin_leave(node)
        self._rec("inject", pid, ENV, None, "leave-intent", k)
        self._rec("state", pid, None, None, format_state(node.levels[k]), k)
        self._refresh_guards(node)

    def inject_leave_via(self, pid: int, via: int) -> None:
        """Place ``leave(pid, right)`` directly in ``via``'s channel (line mode)."""
        node = self._check_leaver(pid)
        if self.skiplist:
            raise SimError("leave via a process is only supported in line mode")
        st = node.levels[0]
        if not self.leave_ready(pid) or st.busy:
            raise SimError(f"{format_id(pid)} is not ready to leave")
        if not self._eligible(via) or via == pid:
            raise SimError(f"target {format_id(via)} cannot take injections")
        st = set_leaving(st)
        st = replace(st, leave_sent=True)
        node.levels[0] = st
        msg = Leave(pid, st.right, 0)
        self._rec("inject", via, ENV, msg, "leave", 0)
        self._rec("state", pid, None, None, format_state(st), 0)
        self._enqueue_env(via, msg)

    def inject_search(self, key: int, target: Optional[int] = None) -> int:
        if target is None:
            target = self._auto_target()
        elif not self._eligible(target):
            raise SimError(f"target {format_id(target)} cannot take injections")
        self.tokens += 1
        level = self.nodes[target].highest_member() if self.skiplist else 0
        msg = Search(key, self.tokens, level)
        self._rec("inject", target, ENV, msg, "search", level)
        self._enqueue_env(target, msg)
        return self.tokens

    def adversarial_exit(self, pid: int) -> None:
        if not is_ordinary(pid):
            raise SimError("sentinels never exit")
        node = self.nodes.get(pid)
        if node is None or not node.alive or not node.joined(0):
            raise SimError(f"{format_id(pid)} is not a member")
        self._rec("inject", pid, ENV, None, "adversarial-exit", 0)
        self._exit(pid, "adversarial")

    def _try_directive(self, d: Directive) -> bool:
        """Apply one due directive; False means it must wait."""
        try:
            if d.op == "join":
                self.inject_join(d.target, d.via)
            elif d.op == "leave":
                node = self.nodes.get(d.target)
                if node is not None and node.alive and not node.leaving() and not self.leave_ready(d.target):
                    return False
                if d.via is not None:
                    self.inject_leave_via(d.target, d.via)
                else:
                    self.inject_leave_intent(d.target)
            elif d.op == "search":
                self.inject_search(d.target)
            elif d.op == "adversarial-exit":
                self.adversarial_exit(d.target)
        except SimError as exc:
            self._note(d.target, f"inject-rejected {d.op} {exc}")
        return True

    def _apply_due(self) -> None:
        if self.scenario is not None and self.scenario.periodic_from == self.steps:
            if self._periodic_seq is None:
                self._periodic_seq = len(self.trace)
        if self._wake:
            woken = [p for p in self._deferred if p in self._wake]
            self._wake.clear()
            for pid in woken:
                if self._try_directive(self._deferred[pid]):
                    del self._deferred[pid]
        while self._future and self._future[0].step <= self.steps:
            d = self._future.popleft()
            if d.op == "leave" and d.target in self._deferred:
                self._note(d.target, f"inject-rejected leave {format_id(d.target)} is already leaving")
            elif not self._try_directive(d):
                self._deferred[d.target] = d

    def _expire(self) -> None:
        for d in list(self._deferred.values()) + list(self._future):
            self._note(d.target, f"inject-expired {d.op}")
        self._deferred.clear()
        self._future.clear()

    # ------------------------------------------------------------- execution

    def _choose(self):
        sched = self.config.scheduler
        if sched == "scripted":
            if self._pick_at >= len(self._picks):
                return None
            a, b = self._picks[self._pick_at]
            self._pick_at += 1
            item = ("G", b, 0) if a == "emit" else ("L", a, b)
            if item not in self._index:
                raise ScriptError(f"pick {self._pick_at}: {a} {b} is not enabled")
            return item
        if not self._items:
            return None
        if sched == "fair-random":
            return self._items[self.rng.randrange(len(self._items))]
        while True:
            item = self._rr.popleft()
            self._queued.discard(item)
            if item in self._index:
                return item

    def step(self) -> Optional[TraceRecord]:
        """Execute one enabled item; ``None`` signals quiescence."""
        self._apply_due()
        while True:
            item = self._choose()
            if item is not None:
                break
            if self.config.scheduler == "scripted":
                return None
            if not self._future:
                self._expire()
                return None
            self.steps = self._future[0].step
            self._apply_due()
        first = len(self.trace)
        if item[0] == "L":
            self._deliver(item[1], item[2])
        else:
            self._guard(item[1], item[2])
        if self.config.scheduler == "round-robin" and item in self._index and item not in self._queued:
            self._queued.add(item)
            self._rr.append(item)
        self.steps += 1
        return self.trace[first]

    def _guard(self, pid: int, level: int) -> None:
        node = self.nodes[pid]
        st = node.levels[level]
        self._note(pid, "guard emit-leave", level)
        new, em = maybe_emit_leave(st)
        self._apply(node, level, st, new, em, None)

    def _deliver(self, sender, receiver) -> None:
        key = (sender, receiver)
        lane = self.lanes[key]
        msg = lane.popleft()
        if not lane:
            self._disable(("L", sender, receiver))
            if sender == ENV:
                self._wake.add(receiver)
        self._rec("deliver", receiver, sender, msg, "", msg.level)
        node = self.nodes[receiver]
        k = msg.level
        if self.skiplist and msg.kind == "join" and k > 0 and not node.member(k):
            if node.member(k - 1):
                self._note(receiver, f"bootstrap join {format_id(msg.req_id)}", k)
                self._send(receiver, node.levels[k - 1].left, msg)
            else:
                self._note(receiver, "corruption bootstrap-off-level", k)
            return
        if self.skiplist and msg.kind == "search":
            self._skip_search(node, msg)
            return
        st = node.state(k)
        if st is None or st.lifecycle is Lifecycle.EXITED:
            self._note(receiver, f"corruption no-state-at-level {msg.kind}", k)
            return
        try:
            new, em = dispatch(st, sender, msg)
        except ProtocolError as exc:
            tag = "not-ready" if isinstance(exc, NotReady) else "protocol-error"
            self._note(receiver, f"corruption {tag} {msg.kind}", k)
            return
        self._apply(node, k, st, new, em, sender)

    def _skip_search(self, node: MultiLevelNode, msg: Search) -> None:
        verdict, dest, level = skip_route(node, msg.key, msg.level)
        if verdict == "forward":
            self._send(node.id, dest, Search(msg.key, msg.token, level))
        else:
            self._note(node.id, f"resolve {msg.token} {verdict}", msg.level)

    def _attribute(self, ev: str, pid: int, level: int, old: NodeState, frm) -> str:
        fid = format_id
        if ev.startswith("accept-"):
            head, churn, right = ev.split()
            return f"stage {head[7:]} {churn} accept {right}"
        if ev == "join-1.1":
            return f"stage join {fid(pid)} 1.1"
        if ev == "join-1.2/leave-1":
            qs = self.nodes[frm].state(level)
            if qs is not None and qs.pending is not None and qs.pending.kind == "leave":
                return f"stage leave {fid(qs.pending.churn_id)} 1"
            return f"stage join {fid(frm)} 1.2"
        if ev == "join-2.1":
            return f"stage join {fid(pid)} 2.1"
        if ev in ("join-2.2/leave-2", "join-4/leave-4.2"):
            pend = old.pending
            if pend is None:
                return f"corruption unattributed {ev}"
            if pend.kind == "join":
                label = "2.2" if ev.startswith("join-2") else "4"
            else:
                label = "2" if ev.startswith("join-2") else "4.2"
            return f"stage {pend.kind} {fid(pend.churn_id)} {label}"
        if ev == "join-3/leave-3.2":
            qs = self.nodes[frm].state(level)
            if qs is not None and qs.pending is not None and qs.pending.kind == "join":
                return f"stage join {fid(qs.pending.churn_id)} 3"
            return f"stage leave {fid(frm)} 3.2"
        if ev in ("leave-3.1", "leave-4.1", "leave-5", "join-5"):
            kind, label = ev.split("-")
            return f"stage {kind} {fid(pid)} {label}"
        return ev

    def _apply(self, node: MultiLevelNode, level: int, old: NodeState, new: NodeState,
               em, frm) -> None:
        pid = node.id
        self._wake.add(pid)
        notes = [self._attribute(ev, pid, level, old, frm) for ev in em.events]
        if new is not old:
            node.levels[level] = new
            self._rec("state", pid, None, None, format_state(new), level)
        for detail in notes:
            self._note(pid, detail, level)
        for dest, msg in em.sends:
            self._send(pid, dest, msg)
        if em.exit_now:
            if level == 0:
                self._exit(pid, "cooperative")
                return
            nxt = orchestrate_leave(node, level)
            self._rec("inject", pid, pid, None, "descend", nxt)
            self._rec("state", pid, None, None, format_state(node.levels[nxt]), nxt)
        if self.skiplist and "join-5" in em.events:
            sends = orchestrate_join(node, level)
            for dest, msg in sends:
                self._rec("inject", pid, pid, msg, "climb", msg.level)
                self._rec("state", pid, None, None, format_state(node.levels[msg.level]), msg.level)
                self._send(pid, dest, msg)
        self._refresh_guards(node)

    # ------------------------------------------------------------------ runs

    def quiescent(self) -> bool:
        return not self._items and not self._future and not self._deferred

    def snapshot(self) -> Snapshot:
        return Snapshot(
            {p: n.copy() for p, n in self.nodes.items()},
            {k: list(v) for k, v in self.lanes.items() if v},
            list(self._deferred.values()) + list(self._future),
            self.config.mode,
            self.quiescent(),
        )

    def run_until(self, stop: Union[str, int, Callable[["Simulator"], bool], None] = None):
        """Step until ``stop`` holds; returns ``(snapshot, trace)``.

        ``stop`` is ``"quiescence"`` (default), an event budget, or a
        predicate over the simulator.  ``config.max_events`` always applies.
        """
        if stop is None:
            stop = self.scenario.stop if self.scenario is not None else "quiescence"
        budget = self.config.max_events
        if isinstance(stop, int) and not isinstance(stop, bool):
            budget = min(budget, stop)
        predicate = stop if callable(stop) else None
        status = None
        while True:
            if predicate is not None and predicate(self):
                status = "stopped"
                break
            if self.steps >= budget:
                self._apply_due()
                status = "quiescent" if self.quiescent() else "truncated"
                break
            if self.step() is None:
                if self.config.scheduler == "scripted":
                    status = "script"
                else:
                    status = "quiescent"
                break
        self.finish(status)
        return self.snapshot(), self.trace

    def finish(self, status: str) -> None:
        if self.status is not None:
            return
        if status == "script":
            if self._items or self._future or self._deferred:
                self.unfair = True
            if self._periodic_seq is not None:
                status = f"periodic {self._periodic_seq}"
        if self.unfair:
            self._note("-", "unfair-schedule")
        self.status = status
        self._note("-", f"end {status}")


def init(config: SimConfig, scenario: Optional[Scenario] = None) -> Simulator:
    return Simulator(config, scenario)


def inject_join(sim: Simulator, req_id: int, target: Optional[int] = None) -> int:
    return sim.inject_join(req_id, target)


def inject_leave_intent(sim: Simulator, pid: int) -> None:
    sim.inject_leave_intent(pid)


def inject_search(sim: Simulator, key: int, target: Optional[int] = None) -> int:
    return sim.inject_search(key, target)


def adversarial_exit(sim: Simulator, pid: int) -> None:
    sim.adversarial_exit(pid)


def step(sim: Simulator) -> Optional[TraceRecord]:
    return sim.step()


def run_until(sim: Simulator, stop=None):
    return sim.run_until(stop)


def simulate(scenario: Scenario, seed: int = 0, *, mode: str = "line", max_level: int = DEFAULT_LEVEL_CAP,
             max_events: int = 1_000_000, scheduler: Optional[str] = None) -> Simulator:
    """Build a simulator for ``scenario`` and run it to its stop condition."""
    config = SimConfig(
        seed=seed,
        initial_members=tuple(scenario.init),
        max_events=max_events,
        scheduler=scheduler or scenario.sched or "fair-random",
        mode=mode,
        max_level=max_level,
    )
    sim = Simulator(config, scenario)
    sim.run_until()
    return sim
