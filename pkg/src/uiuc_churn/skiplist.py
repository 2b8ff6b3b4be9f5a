"""Skip list built from one UIUC instance per level.

A process joins level 0 first and climbs one level at a time; it leaves
from its top level downward and exits only after leaving level 0.  The
engine drives these transitions; the functions here decide what happens
next for a single process and never touch channels themselves.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from .protocol import (
    NEG_INF,
    Join,
    Lifecycle,
    Message,
    NodeState,
    is_sentinel,
    new_joiner,
    on_search,
    set_leaving,
)

DEFAULT_LEVEL_CAP = 8


def assign_level(pid: int, seed: int, cap: int = DEFAULT_LEVEL_CAP) -> int:
    """Top level of ``pid``: geometric with P(level >= k) = 2**-k, capped at ``cap``."""
    if cap < 0:
        raise ValueError("level cap must be non-negative")
    if is_sentinel(pid):
        return cap
    digest = hashlib.blake2b(f"{seed}:{pid}".encode(), digest_size=8).digest()
    bits = int.from_bytes(digest, "little")
    level = 0
    while bits & 1 and level < cap:
        level += 1
        bits >>= 1
    return level


@dataclass
class MultiLevelNode:
    """One process with an independent UIUC state per level.

    ``levels[k]`` is ``None`` until the process starts joining level ``k``.
    In line mode ``top`` is 0 and only ``levels[0]`` is ever used.
    """

    id: int
    top: int
    levels: List[Optional[NodeState]] = field(default_factory=list)
    alive: bool = True

    def state(self, level: int) -> Optional[NodeState]:
        if 0 <= level < len(self.levels):
            return self.levels[level]
        return None

    def member(self, level: int) -> bool:
        st = self.state(level)
        return st is not None and st.linked

    def joined(self, level: int) -> bool:
        st = self.state(level)
        return st is not None and st.lifecycle is Lifecycle.JOINED

    def fully_joined(self) -> bool:
        return self.alive and all(self.joined(k) for k in range(self.top + 1))

    def leaving(self) -> bool:
        return any(st is not None and st.leaving for st in self.levels)

    def highest_member(self) -> int:
        for k in range(len(self.levels) - 1, -1, -1):
            if self.member(k):
                return k
        return -1

    def copy(self) -> "MultiLevelNode":
        return MultiLevelNode(self.id, self.top, list(self.levels), self.alive)


def orchestrate_join(node: MultiLevelNode, level_done: int) -> List[Tuple[int, Message]]:
    """After ``node`` finished joining ``level_done``, start the next level.

    The level-(k+1) request is handed to the level-k left neighbor and walks
    leftward along level k until a level-(k+1) member takes it.
    """
    if level_done >= node.top:
        return []
    nxt = level_done + 1
    while len(node.levels) <= nxt:
        node.levels.append(None)
    node.levels[nxt] = new_joiner(node.id, nxt)
    left = node.levels[level_done].left
    return [(left, Join(node.id, nxt))]


def begin_leave(node: MultiLevelNode) -> int:
    """Mark the top level as leaving; returns that level."""
    k = node.highest_member()
    node.levels[k] = set_leaving(node.levels[k])
    return k


def orchestrate_leave(node: MultiLevelNode, level_done: int) -> Optional[int]:
    """After leaving ``level_done``, mark the level below as leaving.

    Returns the next level to leave, or ``None`` once level 0 is done and the
    process should exit.
    """
    if level_done == 0:
        return None
    nxt = level_done - 1
    node.levels[nxt] = set_leaving(node.levels[nxt])
    return nxt


def skip_route(node: MultiLevelNode, key: int, hint: int):
    """Next hop of a skip search at ``node``.

    Returns ``("found", None, 0)``, ``("absent", None, 0)`` or
    ``("forward", dest, level)``.  The search moves along the highest level
    that does not overshoot ``key`` and drops a level when it would.
    """
    p = node.id
    if key == p:
        return ("found", None, 0)
    h = min(hint, len(node.levels) - 1)
    for k in range(h, -1, -1):
        st = node.levels[k]
        if st is None or not st.linked:
            continue
        if key > p:
            if st.right is not None and st.right <= key:
                return ("forward", st.right, k)
        else:
            if st.left is not None and st.left >= key:
                return ("forward", st.left, k)
    base = node.levels[0]
    if key > p and base.right is not None and key < base.right:
        return ("absent", None, 0)
    if key < p and base.left is not None and key > base.left:
        return ("absent", None, 0)
    raise RuntimeError(f"search for {key} stuck at {p}")


def skip_search(nodes: Dict[int, MultiLevelNode], key: int, start: int = NEG_INF,
                max_hops: int = 100_000) -> Tuple[str, int]:
    """Route a search through a quiescent snapshot; returns (verdict, hops)."""
    cur = nodes[start]
    hint = len(cur.levels) - 1
    for hops in range(max_hops):
        verdict, dest, level = skip_route(cur, key, hint)
        if verdict != "forward":
            return verdict, hops
        cur, hint = nodes[dest], level
    raise RuntimeError("skip search did not resolve")


def line_search(nodes: Dict[int, MultiLevelNode], key: int, start: int = NEG_INF,
                max_hops: int = 1_000_000) -> Tuple[str, int]:
    """Reference search that only follows level-0 pointers via ``on_search``."""
    cur = start
    for hops in range(max_hops):
        _, em = on_search(nodes[cur].levels[0], key, 0)
        if em.events:
            return em.events[0].split()[-1], hops
        cur = em.sends[0][0]
    raise RuntimeError("line search did not resolve")
