import pytest

from uiuc_churn.protocol import (
    NEG_INF,
    POS_INF,
    Join,
    Leave,
    Lifecycle,
    NotReady,
    Pending,
    ProtocolError,
    Search,
    Sua,
    Sub,
    Tda,
    Tdb,
    Ftd,
    dispatch,
    format_state,
    maybe_emit_leave,
    new_joiner,
    new_member,
    new_sentinel,
    on_ftd,
    on_join_request,
    on_leave_request,
    on_search,
    on_sua,
    on_sub,
    on_tda,
    on_tdb,
    parse_message,
    parse_state,
    set_leaving,
)
from dataclasses import replace


def member(pid, left, right, **kw):
    return replace(new_member(pid, left, right), **kw)


def test_new_member_between_sentinels():
    st = new_member(10, NEG_INF, POS_INF)
    assert (st.id, st.left, st.right, st.busy) == (10, NEG_INF, POS_INF, False)


def test_new_member_rejects_bad_order():
    with pytest.raises(ValueError):
        new_member(10, 20, 30)
    assert new_member(20, 10, 30).left == 10


def test_new_joiner_and_sentinel_rejection():
    st = new_joiner(15)
    assert st.busy and st.left is None and st.right is None
    assert st.lifecycle is Lifecycle.JOINING
    with pytest.raises(ValueError):
        new_joiner(POS_INF)


def test_joiner_not_ready_for_routed_requests():
    with pytest.raises(NotReady):
        on_join_request(new_joiner(15), 17)


def test_join_accepted_by_idle_handler():
    st, em = on_join_request(member(10, NEG_INF, 20), 15)
    assert em.sends == ((15, Sua(20)),)
    assert st.busy and st.pending == Pending("join", 15, 1)


def test_join_bounced_by_busy_handler():
    st0 = member(10, NEG_INF, 20, busy=True)
    st, em = on_join_request(st0, 15)
    assert st is st0
    assert em.sends == ((20, Join(15)),)
    assert em.events == ("bounce join 15",)


def test_join_routed_left_when_smaller():
    _, em = on_join_request(member(30, 20, 40), 15)
    assert em.sends == ((20, Join(15)),)


def test_duplicate_join_dropped():
    st0 = member(10, NEG_INF, 15)
    st, em = on_join_request(st0, 15)
    assert st is st0 and em.sends == ()
    assert em.events == ("duplicate-join 15",)


def test_leave_accepted_by_left_neighbor():
    st, em = on_leave_request(member(10, NEG_INF, 15), 15, 20)
    assert em.sends == ((20, Sua(None)),)
    assert st.busy and st.pending == Pending("leave", 15, 1)


def test_leave_at_leaver_goes_left():
    _, em = on_leave_request(member(15, 10, 20, leaving=True), 15, 20)
    assert em.sends == ((10, Leave(15, 20)),)


def test_leave_bounce_at_busy_handler():
    _, em = on_leave_request(member(10, NEG_INF, 15, busy=True), 15, 20)
    assert em.sends == ((15, Leave(15, 20)),)
    assert "bounce leave 15" in em.events
    # the leaver sends it back toward its left neighbor
    _, back = on_leave_request(member(15, 10, 20, leaving=True, leave_sent=True), 15, 20)
    assert back.sends == ((10, Leave(15, 20)),)


def test_leave_routed_toward_handler():
    # far to the right of the leaver: move left
    _, em = on_leave_request(member(40, 30, 50), 15, 20)
    assert em.sends[0][0] == 30
    # far to the left: move right
    _, em = on_leave_request(member(5, NEG_INF, 10), 15, 20)
    assert em.sends[0][0] == 10
    assert "route-amended leave 15" in em.events


def test_sua_with_payload_links_joiner():
    st, em = on_sua(new_joiner(15), 10, 20)
    assert (st.left, st.right) == (10, 20)
    assert em.sends == ((20, Sua(None)),)


def test_sua_bottom_resets_left():
    st, em = on_sua(member(20, 10, 30), 15, None)
    assert st.left == 15 and em.sends == ((15, Sub()),)
    st, em = on_sua(member(20, 10, 30), 5, None)
    assert st.left == 5 and em.sends == ((5, Sub()),)


def test_sub_at_handler_starts_teardown():
    h = member(10, NEG_INF, 20, busy=True, pending=Pending("join", 15, 1))
    st, em = on_sub(h, 15)
    assert st.right == 15 and em.sends == ((20, Tda()),)
    assert st.pending.stage == 3


def test_sub_at_joiner_passes_left():
    j = replace(new_joiner(15), left=10, right=20)
    st, em = on_sub(j, 20)
    assert em.sends == ((10, Sub()),)


def test_sub_at_leave_handler():
    h = member(5, NEG_INF, 10, busy=True, pending=Pending("leave", 10, 1))
    st, em = on_sub(h, 20)
    assert st.right == 20 and em.sends == ((10, Tda()),)


def test_tda_branches():
    _, em = on_tda(member(20, 15, 30), 10)
    assert em.sends == ((10, Tdb()),)
    _, em = on_tda(member(10, 5, 20, leaving=True), 5)
    assert em.sends == ((20, Tda()),)
    _, em = on_tda(member(20, 5, 30), 10)
    assert em.sends == ((10, Tdb()),)


def test_tdb_at_join_handler_targets_joiner():
    h = member(10, NEG_INF, 15, busy=True, pending=Pending("join", 15, 3))
    st, em = on_tdb(h, 20)
    assert em.sends == ((15, Ftd()),)
    assert not st.busy and st.pending is None


def test_tdb_at_leave_handler_and_leaver():
    h = member(5, NEG_INF, 20, busy=True, pending=Pending("leave", 10, 3))
    _, em = on_tdb(h, 10)
    assert em.sends == ((10, Ftd()),)
    _, em = on_tdb(member(10, 5, 20, leaving=True), 20)
    assert em.sends == ((5, Tdb()),)


def test_ftd_outcomes():
    st, em = on_ftd(member(10, 5, 20, leaving=True), 5)
    assert em.exit_now and st.left is None and st.right is None
    j = replace(new_joiner(15), left=10, right=20)
    st, em = on_ftd(j, 10)
    assert not st.busy and st.lifecycle is Lifecycle.JOINED
    st, em = on_ftd(member(20, 10, 30, busy=True), 10)
    assert not st.busy and em.events == ("corruption stray-ftd",)


def test_maybe_emit_leave_guard():
    st = set_leaving(member(10, 5, 20))
    st2, em = maybe_emit_leave(st)
    assert em.sends == ((5, Leave(10, 20)),) and st2.leave_sent
    _, em = maybe_emit_leave(replace(st, busy=True))
    assert em.sends == ()
    _, em = maybe_emit_leave(st2)
    assert em.sends == ()


def test_search_verdicts():
    _, em = on_search(member(10, NEG_INF, 20), 10, 1)
    assert em.events == ("resolve 1 found",)
    _, em = on_search(member(10, NEG_INF, 20), 15, 2)
    assert em.events == ("resolve 2 absent",)
    _, em = on_search(member(10, NEG_INF, 20), 25, 3)
    assert em.sends == ((20, Search(25, 3)),)


def test_sentinels_cannot_leave():
    with pytest.raises(ValueError):
        set_leaving(new_sentinel(POS_INF, 10))


def test_exited_process_rejects_messages():
    st, _ = on_ftd(member(10, 5, 20, leaving=True), 5)
    with pytest.raises(ProtocolError):
        dispatch(st, 5, Join(7))


@pytest.mark.parametrize("text", ["join(15)", "leave(10,+inf)", "sua(20)", "sua(bot)",
                                  "sub", "tda", "tdb", "ftd", "search(-inf,4)"])
def test_message_text_round_trip(text):
    assert str(parse_message(text)) == text


def test_state_text_round_trip():
    st = member(10, NEG_INF, 20, busy=True, pending=Pending("leave", 20, 3), leaving=True)
    assert parse_state(10, format_state(st)) == st
