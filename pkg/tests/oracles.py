"""Independent hand-simulation oracles.

These re-derive expected behaviour from the protocol rules with plain
dicts and no imports from the package, so a bug shared by the engine and
the checker cannot hide here.  The frozen constants below were produced by
stepping the rules by hand and are asserted literally.
"""

from collections import deque

NEG, POS = "-inf", "+inf"

# One join of 15 into {10, 20}, injected at 10.  Each entry is
# (receiver, sender, message); only one message is ever in flight, so the
# schedule is forced.
UNCONTENDED_JOIN = [
    (10, "env", "join(15)"),
    (15, 10, "sua(20)"),
    (20, 15, "sua(bot)"),
    (15, 20, "sub"),
    (10, 15, "sub"),
    (20, 10, "tda"),
    (10, 20, "tdb"),
    (15, 10, "ftd"),
]

# Cooperative leave of 10 from {5, 10, 20}: deliveries after the guarded
# emission of the Leave at 10.
UNCONTENDED_LEAVE = [
    (5, 10, "leave(10,20)"),
    (20, 5, "sua(bot)"),
    (5, 20, "sub"),
    (10, 5, "tda"),
    (20, 10, "tda"),
    (10, 20, "tdb"),
    (5, 10, "tdb"),
    (10, 5, "ftd"),
]


def _key(x):
    return {NEG: float("-inf"), POS: float("inf")}.get(x, x)


def hand_join(members, joiner, via):
    """Replay the join rules for a single uncontended join."""
    ids = [NEG] + sorted(members) + [POS]
    st = {p: {"left": ids[i - 1] if i else None,
              "right": ids[i + 1] if i + 1 < len(ids) else None,
              "pending": None}
          for i, p in enumerate(ids)}
    st[joiner] = {"left": None, "right": None, "pending": None}
    queue = deque([(via, "env", ("join", joiner))])
    out = []
    while queue:
        p, frm, (kind, arg) = queue.popleft()
        s = st[p]
        label = f"{kind}({'bot' if arg is None and kind == 'sua' else arg})" if kind in ("join", "sua") else kind
        out.append((p, frm, label))
        if kind == "join":
            if _key(p) < _key(arg) < _key(s["right"]):
                s["pending"] = arg
                queue.append((arg, p, ("sua", s["right"])))
            else:
                queue.append((s["left"] if _key(arg) < _key(p) else s["right"], p, ("join", arg)))
        elif kind == "sua":
            if arg is not None:
                s["left"], s["right"] = frm, arg
                queue.append((arg, p, ("sua", None)))
            else:
                s["left"] = frm
                queue.append((frm, p, ("sub", None)))
        elif kind == "sub":
            if frm != s["right"]:
                old = s["right"]
                s["right"] = frm
                queue.append((old, p, ("tda", None)))
            else:
                queue.append((s["left"], p, ("sub", None)))
        elif kind == "tda":
            queue.append((frm, p, ("tdb", None)))
        elif kind == "tdb":
            queue.append((s["pending"], p, ("ftd", None)))
            s["pending"] = None
    return out, st


def reference_members(init, directives):
    """Final membership when every directive is eventually satisfied."""
    members = set(init)
    for op, pid in directives:
        if op == "join":
            members.add(pid)
        elif op == "leave":
            members.discard(pid)
        elif op == "adversarial-exit":
            members.discard(pid)
    return sorted(members)
