"""Per-process UIUC state machine for a linearized overlay.

Every handler is a pure function: it takes the current :class:`NodeState`
plus one event and returns the successor state and an :class:`Emission`.
Nothing here reads a clock or touches I/O; all interleaving lives
in :mod:`uiuc_churn.engine`.

Absent ids are represented by ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple, Union

NEG_INF = -(2**63)
POS_INF = 2**63 - 1

SENTINELS = (NEG_INF, POS_INF)


class ProtocolError(Exception):
    """Raised when an event is applied to a state that cannot accept it."""


class NotReady(ProtocolError):
    """A joiner received a routed request before its first ``sua``."""


def is_sentinel(pid: int) -> bool:
    return pid == NEG_INF or pid == POS_INF


def is_ordinary(pid: int) -> bool:
    return NEG_INF < pid < POS_INF


def format_id(pid: Optional[int]) -> str:
    if pid is None:
        return "-"
    if pid == NEG_INF:
        return "-inf"
    if pid == POS_INF:
        return "+inf"
    return str(pid)


def parse_id(text: str) -> Optional[int]:
    if text == "-":
        return None
    if text == "-inf":
        return NEG_INF
    if text == "+inf":
        return POS_INF
    return int(text)


# --------------------------------------------------------------------------
# messages


@dataclass(frozen=True, slots=True)
class Join:
    req_id: int
    level: int = 0
    kind = "join"

    def __str__(self) -> str:
        return f"join({format_id(self.req_id)})"


@dataclass(frozen=True, slots=True)
class Leave:
    req_id: int
    q: int
    level: int = 0
    kind = "leave"

    def __str__(self) -> str:
        return f"leave({format_id(self.req_id)},{format_id(self.q)})"


@dataclass(frozen=True, slots=True)
class Sua:
    req_id: Optional[int]
    level: int = 0
    kind = "sua"

    def __str__(self) -> str:
        return f"sua({format_id(self.req_id) if self.req_id is not None else 'bot'})"


@dataclass(frozen=True, slots=True)
class Sub:
    level: int = 0
    kind = "sub"

    def __str__(self) -> str:
        return "sub"


@dataclass(frozen=True, slots=True)
class Tda:
    level: int = 0
    kind = "tda"

    def __str__(self) -> str:
        return "tda"


@dataclass(frozen=True, slots=True)
class Tdb:
    level: int = 0
    kind = "tdb"

    def __str__(self) -> str:
        return "tdb"


@dataclass(frozen=True, slots=True)
class Ftd:
    level: int = 0
    kind = "ftd"

    def __str__(self) -> str:
        return "ftd"


@dataclass(frozen=True, slots=True)
class Search:
    key: int
    token: int
    level: int = 0
    kind = "search"

    def __str__(self) -> str:
        return f"search({format_id(self.key)},{self.token})"


Message = Union[Join, Leave, Sua, Sub, Tda, Tdb, Ftd, Search]

CHURN_KINDS = ("join", "leave")
SETUP_KINDS = ("sua", "sub")
TEARDOWN_KINDS = ("tda", "tdb")


def parse_message(text: str, level: int = 0) -> Message:
    """Inverse of ``str(message)``; the level travels in its own trace field."""
    if text in ("sub", "tda", "tdb", "ftd"):
        return {"sub": Sub, "tda": Tda, "tdb": Tdb, "ftd": Ftd}[text](level)
    name, _, rest = text.partition("(")
    if not rest.endswith(")"):
        raise ValueError(f"malformed message {text!r}")
    args = rest[:-1].split(",")
    if name == "join" and len(args) == 1:
        return Join(parse_id(args[0]), level)
    if name == "leave" and len(args) == 2:
        return Leave(parse_id(args[0]), parse_id(args[1]), level)
    if name == "sua" and len(args) == 1:
        return Sua(None if args[0] == "bot" else parse_id(args[0]), level)
    if name == "search" and len(args) == 2:
        return Search(parse_id(args[0]), int(args[1]), level)
    raise ValueError(f"malformed message {text!r}")


# --------------------------------------------------------------------------
# state


class Lifecycle(Enum):
    JOINING = "j"
    JOINED = "J"
    EXITED = "X"


@dataclass(frozen=True, slots=True)
class Pending:
    """Request a handler is coordinating; ``stage`` is the last stage it started."""

    kind: str
    churn_id: int
    stage: int = 1


@dataclass(frozen=True, slots=True)
class NodeState:
    id: int
    left: Optional[int]
    right: Optional[int]
    leaving: bool = False
    busy: bool = False
    leave_sent: bool = False
    pending: Optional[Pending] = None
    lifecycle: Lifecycle = Lifecycle.JOINED
    level: int = 0

    @property
    def linked(self) -> bool:
        """True once the node holds neighbor pointers and has not exited."""
        return self.lifecycle is not Lifecycle.EXITED and (
            self.left is not None or self.right is not None
        )


@dataclass(frozen=True, slots=True)
class Emission:
    sends: Tuple[Tuple[int, Message], ...] = ()
    exit_now: bool = False
    events: Tuple[str, ...] = ()


NOTHING = Emission()


def _emit(*sends: Tuple[int, Message], events: Tuple[str, ...] = (), exit_now=False) -> Emission:
    return Emission(tuple(sends), exit_now, events)


# --------------------------------------------------------------------------
# construction


def new_member(pid: int, left: int, right: int, level: int = 0) -> NodeState:
    if not (left < pid < right):
        raise ValueError(f"ordering violated: {left} < {pid} < {right} does not hold")
    if not is_ordinary(pid):
        raise ValueError("sentinels are built with new_sentinel")
    return NodeState(pid, left, right, level=level)


def new_sentinel(pid: int, neighbor: int, level: int = 0) -> NodeState:
    if pid == NEG_INF:
        return NodeState(pid, None, neighbor, level=level)
    if pid == POS_INF:
        return NodeState(pid, neighbor, None, level=level)
    raise ValueError(f"{pid} is not a sentinel id")


def new_joiner(pid: int, level: int = 0) -> NodeState:
    if not is_ordinary(pid):
        raise ValueError("a sentinel cannot join")
    return NodeState(pid, None, None, busy=True, lifecycle=Lifecycle.JOINING, level=level)


def set_leaving(state: NodeState) -> NodeState:
    if is_sentinel(state.id):
        raise ValueError("the largest and smallest processes may not leave")
    return replace(state, leaving=True)


# --------------------------------------------------------------------------
# helpers


def _between(lo: Optional[int], x: int, hi: Optional[int]) -> bool:
    return lo is not None and hi is not None and lo < x < hi


def _require_linked(state: NodeState) -> None:
    if state.lifecycle is Lifecycle.EXITED:
        raise ProtocolError(f"process {format_id(state.id)} has exited")
    if state.left is None and state.right is None:
        raise NotReady(f"process {format_id(state.id)} is not ready")


def _toward(state: NodeState, target: int) -> Optional[int]:
    return state.left if target < state.id else state.right


# --------------------------------------------------------------------------
# actions


def on_join_request(state: NodeState, req_id: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    p, lvl = state.id, state.level
    if req_id == p or req_id == state.left or req_id == state.right:
        return state, _emit(events=(f"duplicate-join {format_id(req_id)}",))
    if _between(p, req_id, state.right):
        if not state.leaving and not state.busy:
            new = replace(state, busy=True, pending=Pending("join", req_id, 1))
            return new, _emit(
                (req_id, Sua(state.right, lvl)),
                events=(f"accept-join {format_id(req_id)} {format_id(state.right)}",),
            )
        return state, _emit(
            (state.right, Join(req_id, lvl)), events=(f"bounce join {format_id(req_id)}",)
        )
    dest = state.left if req_id < p else state.right
    return state, _emit((dest, Join(req_id, lvl)))


def on_leave_request(state: NodeState, req_id: int, q: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    p, lvl = state.id, state.level
    if is_sentinel(req_id):
        return state, _emit(events=(f"corruption sentinel-leave {format_id(req_id)}",))
    events = []
    if req_id == state.right:
        if not state.leaving and not state.busy:
            new = replace(state, busy=True, pending=Pending("leave", req_id, 1))
            return new, _emit(
                (q, Sua(None, lvl)),
                events=(f"accept-leave {format_id(req_id)} {format_id(q)}",),
            )
        events.append(f"bounce leave {format_id(req_id)}")
    # routed toward the handler; the literal rule differs whenever p != reqId
    if req_id <= p:
        dest = state.left
    else:
        dest = state.right
    if req_id != p:
        events.append(f"route-amended leave {format_id(req_id)}")
    return state, _emit((dest, Leave(req_id, q, lvl)), events=tuple(events))


def on_sua(state: NodeState, frm: int, req_id: Optional[int]) -> Tuple[NodeState, Emission]:
    if state.lifecycle is Lifecycle.EXITED:
        raise ProtocolError(f"process {format_id(state.id)} has exited")
    lvl = state.level
    if req_id is not None:
        if state.lifecycle is not Lifecycle.JOINING or state.left is not None:
            return state, _emit(events=("corruption stray-sua-payload",))
        if not (frm < state.id < req_id):
            raise ProtocolError("sua payload violates ordering")
        new = replace(state, left=frm, right=req_id)
        return new, _emit((req_id, Sua(None, lvl)), events=("join-1.1",))
    if not frm < state.id:
        raise ProtocolError("sua sender must lie to the left")
    new = replace(state, left=frm)
    return new, _emit((frm, Sub(lvl)), events=("join-1.2/leave-1",))


def on_sub(state: NodeState, frm: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    lvl = state.level
    if frm != state.right:
        events = ("join-2.2/leave-2",)
        pending = state.pending
        if pending is None:
            events += ("corruption sub-without-pending",)
        else:
            pending = replace(pending, stage=3)
        new = replace(state, right=frm, pending=pending)
        return new, _emit((state.right, Tda(lvl)), events=events)
    return state, _emit((state.left, Sub(lvl)), events=("join-2.1",))


def on_tda(state: NodeState, frm: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    lvl = state.level
    if frm != state.left:
        return state, _emit((frm, Tdb(lvl)), events=("join-3/leave-3.2",))
    return state, _emit((state.right, Tda(lvl)), events=("leave-3.1",))


def on_tdb(state: NodeState, frm: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    lvl = state.level
    if frm != state.right:
        if state.pending is None:
            return state, _emit(events=("corruption tdb-without-pending",))
        # addressed to the churning process, not to the sender
        new = replace(state, busy=False, pending=None)
        return new, _emit((state.pending.churn_id, Ftd(lvl)), events=("join-4/leave-4.2",))
    return state, _emit((state.left, Tdb(lvl)), events=("leave-4.1",))


def on_ftd(state: NodeState, frm: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    if state.leaving:
        new = replace(state, left=None, right=None, lifecycle=Lifecycle.EXITED)
        return new, _emit(exit_now=True, events=("leave-5",))
    if state.lifecycle is Lifecycle.JOINING:
        return replace(state, busy=False, lifecycle=Lifecycle.JOINED), _emit(events=("join-5",))
    return replace(state, busy=False), _emit(events=("corruption stray-ftd",))


def leave_enabled(state: NodeState) -> bool:
    return (
        state.lifecycle is Lifecycle.JOINED
        and state.leaving
        and not state.busy
        and not state.leave_sent
        and not is_sentinel(state.id)
    )


def maybe_emit_leave(state: NodeState) -> Tuple[NodeState, Emission]:
    if not leave_enabled(state):
        return state, NOTHING
    new = replace(state, leave_sent=True)
    return new, _emit((state.left, Leave(state.id, state.right, state.level)))


def on_search(state: NodeState, key: int, token: int) -> Tuple[NodeState, Emission]:
    _require_linked(state)
    p = state.id
    if key == p:
        return state, _emit(events=(f"resolve {token} found",))
    if _between(p, key, state.right):
        return state, _emit(events=(f"resolve {token} absent",))
    dest = state.right if key > p else state.left
    return state, _emit((dest, Search(key, token, state.level)))


def dispatch(state: NodeState, frm, msg: Message) -> Tuple[NodeState, Emission]:
    """Apply the action matching ``msg``'s type."""
    kind = msg.kind
    if kind == "join":
        return on_join_request(state, msg.req_id)
    if kind == "leave":
        return on_leave_request(state, msg.req_id, msg.q)
    if kind == "sua":
        return on_sua(state, frm, msg.req_id)
    if kind == "sub":
        return on_sub(state, frm)
    if kind == "tda":
        return on_tda(state, frm)
    if kind == "tdb":
        return on_tdb(state, frm)
    if kind == "ftd":
        return on_ftd(state, frm)
    if kind == "search":
        return on_search(state, msg.key, msg.token)
    raise ProtocolError(f"unknown message {msg!r}")


def format_state(state: NodeState) -> str:
    pend = "-"
    if state.pending is not None:
        pend = f"{state.pending.kind}:{format_id(state.pending.churn_id)}:{state.pending.stage}"
    return (
        f"left={format_id(state.left)} right={format_id(state.right)} "
        f"busy={int(state.busy)} leaving={int(state.leaving)} "
        f"lifecycle={state.lifecycle.value} sent={int(state.leave_sent)} pending={pend}"
    )


def parse_state(pid: int, text: str, level: int = 0) -> NodeState:
    fields = dict(part.split("=", 1) for part in text.split())
    pending = None
    if fields.get("pending", "-") != "-":
        kind, churn, stage = fields["pending"].split(":")
        pending = Pending(kind, parse_id(churn), int(stage))
    return NodeState(
        pid,
        parse_id(fields["left"]),
        parse_id(fields["right"]),
        leaving=fields["leaving"] == "1",
        busy=fields["busy"] == "1",
        leave_sent=fields.get("sent", "0") == "1",
        pending=pending,
        lifecycle=Lifecycle(fields["lifecycle"]),
        level=level,
    )
