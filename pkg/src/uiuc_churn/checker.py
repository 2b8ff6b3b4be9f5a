"""Trace and snapshot checks for UIUC runs.

Every check returns a :class:`Verdict`.  Trace checks accept either a raw
list of :class:`~uiuc_churn.engine.TraceRecord` or a :class:`TraceModel`
already built by :func:`analyze`; building the model once and passing it to
each check avoids replaying a long trace several times.

Liveness on finite traces depends on how the trace ended:

* ``end quiescent``: nothing left to do, so an open obligation is a failure;
* ``end truncated`` / ``end script``: an open obligation is not yet violated;
* ``end periodic <seq>``: the suffix from ``<seq>`` repeats forever, so a
  request still open at the end is starved, and request progress holds iff
  the repeating suffix satisfies something.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .protocol import NEG_INF, POS_INF, Lifecycle, format_id, parse_id, parse_state
from .scenario import Scenario

PASS, FAIL, NYV = "pass", "fail", "nyv"


@dataclass
class Verdict:
    name: str
    status: str
    witness: list = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def line(self) -> str:
        out = f"{self.name} {self.status}"
        if self.witness:
            seqs = [r.seq for r in self.witness]
            out += f" [{min(seqs)}-{max(seqs)}]"
        return out


@dataclass
class Ticket:
    kind: str
    churn_id: int
    level: int
    inject_seq: int
    handler: Optional[int] = None
    right: Optional[int] = None
    accept_seq: Optional[int] = None
    stage_seqs: List[Optional[int]] = field(default_factory=lambda: [None] * 5)
    satisfied_seq: Optional[int] = None
    stable_seq: Optional[int] = None
    bounces: int = 0
    participants: Set[Tuple[int, int]] = field(default_factory=set)
    records: list = field(default_factory=list)

    @property
    def key(self):
        return (self.kind, self.churn_id, self.level)


@dataclass
class LinkHistory:
    link: Tuple[int, int, int]
    intervals: List[Tuple[int, Optional[int], tuple]] = field(default_factory=list)


@dataclass
class Forward:
    rec: object
    trigger: object
    holder_dist: int
    next_dist: int


@dataclass
class TraceModel:
    tickets: Dict[tuple, Ticket] = field(default_factory=dict)
    links: Dict[Tuple[int, int], LinkHistory] = field(default_factory=dict)
    end: Optional[str] = None
    period_seq: Optional[int] = None
    end_rec: object = None
    last_seq: int = -1
    td_violations: List[list] = field(default_factory=list)
    su_violations: List[list] = field(default_factory=list)
    fifo_violations: List[list] = field(default_factory=list)
    stage_violations: List[list] = field(default_factory=list)
    forwards: List[Forward] = field(default_factory=list)
    locality: List[Tuple[tuple, object, int]] = field(default_factory=list)
    discards: list = field(default_factory=list)
    searches: Dict[int, object] = field(default_factory=dict)
    resolved: Dict[int, str] = field(default_factory=dict)
    corruption: list = field(default_factory=list)
    unfair: bool = False
    max_concurrent: int = 0


STAGE_INDEX = {
    "1": 0, "1.1": 0, "1.2": 0,
    "2": 1, "2.1": 1, "2.2": 1,
    "3": 2, "3.1": 2, "3.2": 2,
    "4": 3, "4.1": 3, "4.2": 3,
    "5": 4,
}
# labels that mark the handler's teardown completion (links stable again)
_STAGE_KINDS = frozenset(("sua", "sub", "tda", "tdb", "ftd"))
STABLE_LABELS = {("join", "4"), ("leave", "4.2")}


def _link(a: int, b: int, level: int = 0) -> Tuple[int, int, int]:
    return (level, a, b) if a < b else (level, b, a)


class _Line:
    """Sorted membership of one level, rebuilt from state records."""

    def __init__(self):
        self.ids: List[int] = []

    def add(self, pid):
        i = bisect_left(self.ids, pid)
        if i == len(self.ids) or self.ids[i] != pid:
            self.ids.insert(i, pid)

    def remove(self, pid):
        i = bisect_left(self.ids, pid)
        if i < len(self.ids) and self.ids[i] == pid:
            del self.ids[i]

    def rank(self, pid) -> Optional[int]:
        i = bisect_left(self.ids, pid)
        if i < len(self.ids) and self.ids[i] == pid:
            return i
        return None

    def place(self, x) -> Tuple[Optional[int], Optional[int]]:
        """Closest members below and above ``x``, ignoring ``x`` itself."""
        i = bisect_left(self.ids, x)
        pred = self.ids[i - 1] if i > 0 else None
        j = i + 1 if i < len(self.ids) and self.ids[i] == x else i
        succ = self.ids[j] if j < len(self.ids) else None
        return pred, succ

    def dist(self, a, b) -> Optional[int]:
        ra, rb = self.rank(a), self.rank(b)
        if ra is None or rb is None:
            return None
        return abs(ra - rb)


def analyze(trace: Iterable) -> TraceModel:
    """Single replay pass collecting everything the checks need."""
    m = TraceModel()
    lines: Dict[int, _Line] = {}
    linked: Dict[Tuple[int, int], bool] = {}
    # leavers whose neighbors already point past them
    bypassed = set()
    lanes: Dict[tuple, deque] = {}
    td_inflight: Dict[tuple, list] = {}
    active_leavers: Dict[Tuple[int, int], tuple] = {}
    trigger = None
    open_count = 0

    def line(level) -> _Line:
        ln = lines.get(level)
        if ln is None:
            ln = lines[level] = _Line()
        return ln

    def open_ticket(key, rec):
        nonlocal open_count
        if key not in m.tickets:
            m.tickets[key] = Ticket(key[0], key[1], key[2], rec.seq)
            m.tickets[key].records.append(rec)
            open_count += 1
            m.max_concurrent = max(m.max_concurrent, open_count)
        return m.tickets[key]

    def place_end(kind, target, level):
        ln = line(level)
        if kind == "search" and ln.rank(target) is not None:
            return target
        pred, _ = ln.place(target)
        return pred

    for rec in trace:
        m.last_seq = rec.seq
        kind = rec.kind
        if kind == "state":
            st = parse_state(rec.process, rec.detail, rec.level)
            key = (rec.process, rec.level)
            now = st.linked and key not in bypassed
            if now != linked.get(key, False):
                linked[key] = now
                if now:
                    line(rec.level).add(rec.process)
                else:
                    line(rec.level).remove(rec.process)
            continue
        if kind == "exit":
            for (pid, lvl) in [k for k, v in linked.items() if v and k[0] == rec.process]:
                linked[(pid, lvl)] = False
                line(lvl).remove(pid)
            trigger = None
            continue
        if kind == "inject":
            trigger = None
            d = rec.detail
            msg = rec.message
            if d == "join":
                open_ticket(("join", msg.req_id, 0), rec)
            elif d == "leave":
                open_ticket(("leave", msg.req_id, 0), rec)
            elif d == "leave-intent":
                open_ticket(("leave", rec.process, rec.level), rec)
            elif d == "climb":
                open_ticket(("join", rec.process, rec.level), rec)
            elif d == "descend":
                open_ticket(("leave", rec.process, rec.level), rec)
            elif d == "search":
                m.searches[msg.token] = rec
            if msg is not None and d in ("join", "leave", "search"):
                lanes.setdefault(("env", rec.process), deque()).append((msg, rec))
            continue
        if kind == "deliver":
            lane = lanes.get((rec.peer, rec.process))
            if not lane or lane[0][0] != rec.message:
                m.fifo_violations.append([rec])
            else:
                _, sent = lane.popleft()
                fl = td_inflight.get((rec.peer, rec.process, rec.level))
                if fl and fl[0] is sent:
                    fl.pop(0)
            trigger = rec
            continue
        if kind == "send":
            msg = rec.message
            pair = (rec.process, rec.peer, rec.level)
            if msg.kind in ("sua", "sub"):
                lane = lanes.get((rec.process, rec.peer))
                # routing traffic (join, leave, search) may share the lane
                prior = [r for x, r in lane or () if x.level == rec.level and x.kind in _STAGE_KINDS]
                if prior:
                    m.su_violations.append([prior[-1], rec])
            fl = td_inflight.get(pair)
            if fl:
                exempt = (rec.process, rec.level) in active_leavers
                if not exempt:
                    m.td_violations.append([fl[0], rec])
            lanes.setdefault((rec.process, rec.peer), deque()).append((msg, rec))
            if msg.kind in ("tda", "tdb"):
                td_inflight.setdefault(pair, []).append(rec)
            if (
                msg.kind in ("join", "leave", "search")
                and trigger is not None
                and trigger.kind == "deliver"
                and trigger.process == rec.process
                and trigger.message is not None
                and trigger.message.kind == msg.kind
            ):
                if msg.kind == "search":
                    target, lvl = msg.key, 0
                else:
                    target, lvl = msg.req_id, msg.level
                ln = line(lvl)
                end = place_end(msg.kind, target, lvl)
                if (
                    end is not None
                    and ln.rank(rec.process) is not None
                    and ln.rank(rec.peer) is not None
                ):
                    m.forwards.append(
                        Forward(rec, trigger, ln.dist(rec.process, end), ln.dist(rec.peer, end))
                    )
            continue
        # annotations
        d = rec.detail
        if d == "discard":
            lane = lanes.get((rec.peer, rec.process))
            if lane and lane[0][0] == rec.message:
                lane.popleft()
            m.discards.append(rec)
            continue
        if d.startswith("guard"):
            trigger = rec
            continue
        if d.startswith("bootstrap"):
            trigger = None
            continue
        if d.startswith("stage "):
            _, tkind, churn, label, *rest = d.split()
            churn = parse_id(churn)
            key = (tkind, churn, rec.level)
            t = m.tickets.get(key)
            if t is None:
                t = open_ticket(key, rec)
            t.records.append(rec)
            t.participants.add((rec.process, rec.seq))
            ln = line(rec.level)
            pred, succ = ln.place(churn)
            if rec.process in (pred, succ):
                dist = 0
            elif rec.process == churn:
                dist = 1
            else:
                ds = [ln.dist(rec.process, e) for e in (pred, succ) if e is not None]
                ds = [x for x in ds if x is not None]
                dist = min(ds) if ds else 10**9
            m.locality.append((key, rec, dist))
            if label == "accept":
                t.handler = rec.process
                t.right = parse_id(rest[0])
                t.accept_seq = rec.seq
                t.stage_seqs[0] = rec.seq
                if tkind == "leave":
                    active_leavers[(churn, rec.level)] = key
                for a, b in {(t.handler, t.right), (t.handler, churn), (churn, t.right)}:
                    lk = _link(a, b, rec.level)
                    m.links.setdefault(lk, LinkHistory(lk)).intervals.append(
                        (rec.seq, None, key)
                    )
                continue
            idx = STAGE_INDEX.get(label)
            if idx is None:
                m.stage_violations.append([rec])
                continue
            prev = [s for s in t.stage_seqs[: idx + 1] if s is not None]
            if t.stage_seqs[idx] is None:
                later = min((s for s in t.stage_seqs[idx + 1:] if s is not None), default=None)
                if later is not None:
                    first = next(r for r in t.records if r.seq == later)
                    m.stage_violations.append([first, rec])
                t.stage_seqs[idx] = rec.seq
            if (tkind, label) in STABLE_LABELS and t.handler is not None:
                t.stable_seq = rec.seq
                for a, b in {(t.handler, t.right), (t.handler, churn), (churn, t.right)}:
                    hist = m.links[_link(a, b, rec.level)]
                    hist.intervals = [
                        (s, rec.seq if e is None and k == key else e, k)
                        for s, e, k in hist.intervals
                    ]
                if tkind == "leave":
                    bypassed.add((churn, rec.level))
                    if linked.pop((churn, rec.level), False):
                        line(rec.level).remove(churn)
            if label == "5":
                t.satisfied_seq = rec.seq
                open_count -= 1
                active_leavers.pop((churn, rec.level), None)
            continue
        if d.startswith("bounce"):
            _, tkind, churn = d.split()
            t = m.tickets.get((tkind, parse_id(churn), rec.level))
            if t is not None:
                t.bounces += 1
            continue
        if d.startswith("resolve "):
            _, token, verdict = d.split()
            m.resolved[int(token)] = verdict
            continue
        if d.startswith("corruption"):
            m.corruption.append(rec)
            continue
        if d == "unfair-schedule":
            m.unfair = True
            continue
        if d.startswith("end "):
            parts = d.split()
            m.end = parts[1]
            m.end_rec = rec
            if m.end == "periodic":
                m.period_seq = int(parts[2])
            continue
    return m


def _model(trace_or_model) -> TraceModel:
    if isinstance(trace_or_model, TraceModel):
        return trace_or_model
    return analyze(trace_or_model)


def _liveness_open_status(m: TraceModel) -> str:
    if m.end in ("quiescent", "periodic"):
        return FAIL
    return NYV


# --------------------------------------------------------------------------
# snapshot checks


def _alive_linked(snapshot, level: int) -> List[int]:
    out = []
    for pid, node in snapshot.nodes.items():
        st = node.state(level)
        if node.alive and st is not None and st.linked:
            out.append(pid)
    return sorted(out)


class _Rec:
    """Minimal witness carrier for snapshot checks (no trace seq)."""

    def __init__(self, seq, text):
        self.seq = seq
        self.text = text

    def __repr__(self):
        return self.text


def check_linearization(snapshot, level: int = 0) -> Verdict:
    """Walk right from -inf: every live member in order, exact left mirror."""
    name = "linearization" if level == 0 else f"linearization@{level}"
    if not snapshot.quiescent:
        raise ValueError("linearization is only checked on a quiescent snapshot")
    members = _alive_linked(snapshot, level)
    walk = [NEG_INF]
    seen = {NEG_INF}
    cur = NEG_INF
    problems = []
    while cur != POS_INF:
        st = snapshot.nodes[cur].state(level)
        nxt = st.right
        if nxt is None or nxt not in snapshot.nodes or not snapshot.nodes[nxt].alive:
            problems.append(f"{format_id(cur)}.right={format_id(nxt)} dangles")
            break
        if nxt <= cur or nxt in seen:
            problems.append(f"{format_id(cur)}.right={format_id(nxt)} not increasing")
            break
        nst = snapshot.nodes[nxt].state(level)
        if nst is None or nst.left != cur:
            problems.append(
                f"{format_id(nxt)}.left={format_id(nst.left if nst else None)} "
                f"mirrors {format_id(cur)}"
            )
        walk.append(nxt)
        seen.add(nxt)
        cur = nxt
    if not problems and walk != members:
        missing = sorted(set(members) - set(walk))
        problems.append("unvisited " + " ".join(format_id(p) for p in missing))
    for pid in members:
        st = snapshot.nodes[pid].state(level)
        if st.busy or st.lifecycle is not Lifecycle.JOINED:
            problems.append(f"{format_id(pid)} not settled")
    if problems:
        return Verdict(name, FAIL, [_Rec(0, p) for p in problems], "; ".join(problems))
    return Verdict(name, PASS)


def walked_membership(snapshot, level: int = 0) -> List[int]:
    """Ordinary ids visited by the right-pointer walk from -inf."""
    out = []
    cur = snapshot.nodes[NEG_INF].state(level).right
    while cur is not None and cur != POS_INF:
        out.append(cur)
        cur = snapshot.nodes[cur].state(level).right
    return out


def check_sublist(snapshot) -> Verdict:
    top = max(len(n.levels) for n in snapshot.nodes.values())
    for k in range(1, top):
        upper = set(_alive_linked(snapshot, k))
        lower = set(_alive_linked(snapshot, k - 1))
        extra = upper - lower
        if extra:
            return Verdict("sublist", FAIL, note=f"level {k} has {sorted(extra)}")
    return Verdict("sublist", PASS)


def detect_partition(snapshot, level: int = 0) -> Verdict:
    """Pass iff stored neighbor ids connect every live member and both sentinels."""
    members = _alive_linked(snapshot, level)
    alive = set(members)
    adj: Dict[int, Set[int]] = {p: set() for p in members}
    for p in members:
        st = snapshot.nodes[p].state(level)
        for q in (st.left, st.right):
            if q is not None and q in alive:
                adj[p].add(q)
                adj[q].add(p)
    seen = {NEG_INF}
    stack = [NEG_INF]
    while stack:
        p = stack.pop()
        for q in adj[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    if seen != alive:
        cut = sorted(alive - seen)
        return Verdict(
            "partition", FAIL, note="unreachable " + " ".join(format_id(p) for p in cut)
        )
    return Verdict("partition", PASS)


# --------------------------------------------------------------------------
# trace checks


def check_message_safety(trace) -> Verdict:
    m = _model(trace)
    lost = [r for r in m.discards if r.message is not None and r.message.kind != "search"]
    if lost:
        return Verdict("message_safety", FAIL, lost[:1], f"{len(lost)} messages discarded")
    return Verdict("message_safety", PASS)


def check_search_loss(trace) -> Verdict:
    """Searches discarded at exit; reported apart from message safety."""
    m = _model(trace)
    lost = [r for r in m.discards if r.message is not None and r.message.kind == "search"]
    if lost:
        return Verdict("search_loss", FAIL, lost[:1], f"{len(lost)} searches discarded")
    return Verdict("search_loss", PASS)


def check_td_last(trace) -> Verdict:
    m = _model(trace)
    bad = m.td_violations or m.su_violations
    if bad:
        return Verdict("td_last", FAIL, bad[0])
    return Verdict("td_last", PASS)


def check_single_transition(trace) -> Verdict:
    m = _model(trace)
    end = m.last_seq + 1
    for lk, hist in m.links.items():
        spans = sorted((s, end if e is None else e, k) for s, e, k in hist.intervals)
        for (s1, e1, k1), (s2, e2, k2) in zip(spans, spans[1:]):
            if s2 <= e1:
                w = [m.tickets[k1].records[-1], m.tickets[k2].records[-1]]
                recs = [r for r in m.tickets[k1].records + m.tickets[k2].records
                        if "accept" in r.detail]
                return Verdict("single_transition", FAIL, recs or w,
                               f"link {lk} in concurrent transitions")
    return Verdict("single_transition", PASS)


def check_terminating_transition(trace) -> Verdict:
    m = _model(trace)
    open_ = [t for t in m.tickets.values() if t.accept_seq is not None and t.stable_seq is None]
    if not open_:
        return Verdict("terminating_transition", PASS)
    status = _liveness_open_status(m)
    t = open_[0]
    accept = next(r for r in t.records if " accept " in r.detail)
    witness = [accept] + ([m.end_rec] if m.end_rec is not None else [])
    return Verdict("terminating_transition", status, witness,
                   f"{t.kind} {format_id(t.churn_id)} stuck after {t.records[-1].detail.split()[-1]}")


def check_request_progress(trace) -> Verdict:
    m = _model(trace)
    open_ = [t for t in m.tickets.values() if t.satisfied_seq is None]
    if not open_:
        return Verdict("request_progress", PASS)
    if m.end == "periodic":
        if any(
            t.satisfied_seq is not None and t.satisfied_seq >= m.period_seq
            for t in m.tickets.values()
        ):
            return Verdict("request_progress", PASS)
        return Verdict("request_progress", FAIL, [open_[0].records[0], m.end_rec])
    status = _liveness_open_status(m)
    witness = [open_[0].records[0]] + ([m.end_rec] if m.end_rec is not None else [])
    return Verdict("request_progress", status, witness)


def check_fair_request(trace) -> Verdict:
    m = _model(trace)
    open_ = [t for t in m.tickets.values() if t.satisfied_seq is None]
    if not open_:
        return Verdict("fair_request", PASS)
    status = _liveness_open_status(m)
    t = open_[0]
    witness = [t.records[0]] + ([m.end_rec] if m.end_rec is not None else [])
    return Verdict(
        "fair_request", status, witness, f"{t.kind} {format_id(t.churn_id)} unsatisfied"
    )


def check_message_progress(trace, snapshots=None) -> Verdict:
    """Forwarded requests never move away from their place once more than a hop off.

    Hop distances are ranks in the membership replayed up to the forwarding
    event.  ``snapshots`` is accepted for interface symmetry; the trace
    already carries every state change.
    """
    m = _model(trace)
    for f in m.forwards:
        if f.holder_dist is None or f.next_dist is None or f.holder_dist <= 1:
            continue
        if f.next_dist >= f.holder_dist:
            return Verdict(
                "message_progress", FAIL, [f.trigger, f.rec],
                f"distance {f.holder_dist} -> {f.next_dist}",
            )
    return Verdict("message_progress", PASS)


def check_locality(trace) -> Verdict:
    m = _model(trace)
    for key, rec, dist in m.locality:
        if dist > 1:
            return Verdict("locality", FAIL, [rec], f"{key} step at distance {dist}")
    for t in m.tickets.values():
        if t.satisfied_seq is None:
            continue
        procs = {p for p, _ in t.participants}
        allowed = {t.handler, t.churn_id, t.right}
        if len(procs) > 3 or not procs <= allowed:
            stage_recs = [r for r in t.records if r.kind == "annotation"]
            return Verdict("locality", FAIL, stage_recs, f"participants {sorted(procs)}")
    return Verdict("locality", PASS)


def check_stage_order(trace) -> Verdict:
    m = _model(trace)
    if m.stage_violations:
        return Verdict("stage_order", FAIL, m.stage_violations[0])
    return Verdict("stage_order", PASS)


def check_channel_fifo(trace) -> Verdict:
    m = _model(trace)
    if m.fifo_violations:
        return Verdict("channel_fifo", FAIL, m.fifo_violations[0])
    return Verdict("channel_fifo", PASS)


def check_search_resolution(trace) -> Verdict:
    m = _model(trace)
    missing = [tok for tok in m.searches if tok not in m.resolved]
    if not missing:
        return Verdict("search_resolution", PASS)
    status = FAIL if m.end in ("quiescent", "periodic") else NYV
    witness = [m.searches[missing[0]]] + ([m.end_rec] if m.end_rec is not None else [])
    return Verdict("search_resolution", status, witness, f"{len(missing)} unresolved")


def check_corruption(trace) -> Verdict:
    m = _model(trace)
    if m.corruption:
        return Verdict("corruption", FAIL, m.corruption[:1])
    return Verdict("corruption", PASS)


TRACE_CHECKS = {
    "td_last": check_td_last,
    "single_transition": check_single_transition,
    "terminating_transition": check_terminating_transition,
    "message_safety": check_message_safety,
    "request_progress": check_request_progress,
    "fair_request": check_fair_request,
    "message_progress": check_message_progress,
    "locality": check_locality,
    "stage_order": check_stage_order,
    "channel_fifo": check_channel_fifo,
    "search_resolution": check_search_resolution,
    "search_loss": check_search_loss,
    "corruption": check_corruption,
}

SNAPSHOT_CHECKS = ("linearization", "partition", "sublist")

ALL_CHECKS = tuple(TRACE_CHECKS) + SNAPSHOT_CHECKS


def run_checks(trace, snapshot=None, names: Optional[Sequence[str]] = None) -> List[Verdict]:
    names = list(names) if names else list(ALL_CHECKS)
    unknown = set(names) - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
    model = _model(trace)
    out = []
    for name in names:
        if name in TRACE_CHECKS:
            out.append(TRACE_CHECKS[name](model))
        elif snapshot is None:
            continue
        elif name == "linearization":
            if not snapshot.quiescent:
                out.append(Verdict("linearization", NYV, note="snapshot not quiescent"))
                continue
            levels = max(len(n.levels) for n in snapshot.nodes.values())
            for k in range(levels):
                out.append(check_linearization(snapshot, k))
        elif name == "partition":
            out.append(detect_partition(snapshot))
        elif name == "sublist":
            out.append(check_sublist(snapshot))
    return out


def format_report(verdicts: Iterable[Verdict]) -> str:
    return "".join(v.line() + "\n" for v in verdicts)


def reference_membership(scenario: Scenario, satisfied: Optional[Set[tuple]] = None) -> List[int]:
    """Expected final membership from applying requests one at a time.

    ``satisfied`` optionally restricts which ``(kind, id)`` requests count;
    by default every membership-changing directive in the scenario does.
    """
    members = set(scenario.init)
    for d in scenario.directives:
        if d.op == "join":
            if satisfied is None or ("join", d.target) in satisfied:
                members.add(d.target)
        elif d.op == "leave":
            if satisfied is None or ("leave", d.target) in satisfied:
                members.discard(d.target)
        elif d.op == "adversarial-exit":
            members.discard(d.target)
    return sorted(members)


def satisfied_requests(trace) -> Set[tuple]:
    m = _model(trace)
    return {
        (t.kind, t.churn_id)
        for t in m.tickets.values()
        if t.satisfied_seq is not None and t.level == 0
    }


def request_distances(trace, kind: str, churn_id: int, level: int = 0) -> List[int]:
    """Hop distance from each holder of one request to its place, at every delivery.

    Distance is counted in the membership replayed up to that delivery,
    toward the smaller end of the place of churn.
    """
    lines: Dict[int, _Line] = {}
    linked: Dict[tuple, bool] = {}
    out = []
    for rec in trace:
        if rec.kind == "state":
            st = parse_state(rec.process, rec.detail, rec.level)
            key = (rec.process, rec.level)
            if st.linked != linked.get(key, False):
                linked[key] = st.linked
                ln = lines.setdefault(rec.level, _Line())
                (ln.add if st.linked else ln.remove)(rec.process)
        elif rec.kind == "exit":
            for key in [k for k, v in linked.items() if v and k[0] == rec.process]:
                linked[key] = False
                lines[key[1]].remove(rec.process)
        elif (
            rec.kind == "deliver"
            and rec.message is not None
            and rec.message.kind == kind
            and rec.message.req_id == churn_id
            and rec.level == level
        ):
            ln = lines.setdefault(level, _Line())
            pred, _ = ln.place(churn_id)
            out.append(ln.dist(rec.process, pred))
    return out
