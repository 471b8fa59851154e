import pytest

from atimers import (LBTM, append_unwigglable_widget, lbtm_accepts, lbtm_to_at, parse_at,
                     parse_lbtm, random_at, reachable, validate_automaton)
from atimers.errors import AnchorHasActiveTimers, MalformedLBTM, UsageError
from atimers.generators import LTransition

from golden import FIXTURES


def _lbtm(name):
    return parse_lbtm((FIXTURES / name).read_text())


def test_machine_accepting_immediately():
    m = _lbtm("accept_now.lbtm")
    assert lbtm_accepts(m, ("a1",))
    assert reachable(lbtm_to_at(m, ("a1",)), "r_done").reachable


@pytest.mark.parametrize("tape,expected", [
    (("a1", "a2"), True), (("a1", "a1"), False), (("a2", "a2"), False), (("a1",), False)])
def test_flip_machine(tape, expected):
    m = _lbtm("flip.lbtm")
    assert lbtm_accepts(m, tape) == expected
    at = lbtm_to_at(m, tape)
    assert validate_automaton(at).ok
    assert reachable(at, "r_done").reachable == expected


def test_machine_needing_absent_symbol():
    m = _lbtm("misread.lbtm")
    assert not lbtm_accepts(m, ("a2", "a2"))
    assert not reachable(lbtm_to_at(m, ("a2", "a2")), "r_done").reachable


def test_two_tick_encoding_misreads_a_cell():
    """With two clock ticks per symbol a cell can be read one slot early.

    The machine only moves on reading a1, the tape holds only a2, yet the
    two-tick automaton reaches r_done; three ticks per symbol do not.
    """
    m = LBTM(("a1", "a2"), ("p0", "p1"), "p0", "p1", (LTransition("p0", "a1", "a1", "R", "p1"),))
    w = ("a2", "a2")
    assert not lbtm_accepts(m, w)
    assert reachable(lbtm_to_at(m, w, ticks_per_symbol=2), "r_done").reachable
    assert not reachable(lbtm_to_at(m, w, ticks_per_symbol=3), "r_done").reachable


def test_lbtm_input_checks():
    m = _lbtm("flip.lbtm")
    with pytest.raises(MalformedLBTM):
        lbtm_to_at(m, ())
    with pytest.raises(MalformedLBTM):
        lbtm_to_at(m, ("b",))
    with pytest.raises(UsageError):
        lbtm_to_at(m, ("a1",), ticks_per_symbol=1)
    with pytest.raises(MalformedLBTM):
        LBTM(("a",), ("p",), "p", "q", ()).check()


def test_widget_adds_fresh_names(two_timer):
    at = append_unwigglable_widget(two_timer, "q0")
    assert validate_automaton(at).ok
    assert set(at.timers) == {"x1", "x2", "z", "zp"}
    assert "go" in at.inputs
    clash = parse_at("timer z\ninput a\nstate s1 initial\nstate s2 active z\n"
                     "trans s1 a s2 start z 1\ntrans s2 a s1 none\ntrans s2 to:z s1 none\n")
    at = append_unwigglable_widget(clash, "s1")
    assert validate_automaton(at).ok and len(set(at.states)) == len(at.states)
    assert "z_" in at.timers


def test_widget_anchor_must_be_idle(two_timer):
    with pytest.raises(AnchorHasActiveTimers):
        append_unwigglable_widget(two_timer, "q1")
    with pytest.raises(UsageError):
        append_unwigglable_widget(two_timer, "nowhere")


def test_random_models_are_valid_and_seeded():
    for seed in range(100):
        at = random_at(seed, 1 + seed % 5, seed % 4, 1 + seed % 3, 1 + seed % 3)
        assert validate_automaton(at).ok
    assert random_at(5, 3, 2, 1, 2) == random_at(5, 3, 2, 1, 2)
    with pytest.raises(UsageError):
        random_at(0, 0, 1, 1, 1)
