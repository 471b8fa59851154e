from fractions import Fraction as F

import pytest

from atimers import (TAU, Act, Configuration, Input, Kill, ModifiedRegionState, RegionState,
                     Timeout, delay, delay_successor, discrete_successor, kill_step, parse_at,
                     parse_run_word, region_count_bound, region_of, region_run_of, run_from_word,
                     timer_equivalent, untimed_trace)
from atimers.errors import NotPending, PendingDiscards, TimeoutNotRipe, ValueExceedsC
from atimers.regions import explore, lift_path, parse_label, successors

from golden import region

C = Configuration.make


def test_integer_points():
    r = region_of(C("q2", {"x1": 0, "x2": 1}), 2)
    assert r == region({"x1": 0, "x2": 1})
    assert str(r) == "[x1=0, x2=1]"
    assert r.at_zero() == ("x1",)


def test_open_interval():
    r = region_of(C("q1", {"x1": F(1, 2)}), 2)
    assert str(r) == "[0<x1<1]"
    assert r.is_open()


def test_same_fraction_order_same_region():
    a = region_of(C("q2", {"x1": F(3, 10), "x2": F(13, 10)}), 2)
    b = region_of(C("q2", {"x1": F(6, 10), "x2": F(16, 10)}), 2)
    assert a == b
    assert str(a) == "[0<x1<1, 1<x2<2, frac x1=x2]"


def test_timer_equivalence():
    assert timer_equivalent({"x1": F(3, 10), "x2": F(13, 10)}, {"x1": F(6, 10), "x2": F(16, 10)})
    assert not timer_equivalent({"x1": F(3, 10), "x2": F(16, 10)},
                                {"x1": F(6, 10), "x2": F(13, 10)})
    assert not timer_equivalent({"x1": 1}, {"x1": F(1, 2)})
    assert not timer_equivalent({"x1": 1}, {"x2": 1})


def test_value_above_constant_is_rejected():
    with pytest.raises(ValueExceedsC):
        region_of(C("q1", {"x1": 3}), 2)


def test_delay_successors_from_integer_point():
    s = RegionState("q2", region({"x1": 1, "x2": 2}))
    t = delay_successor(s)
    assert str(t) == "(q2, [0<x1<1, 1<x2<2, frac x1=x2])"
    assert delay_successor(t) == RegionState("q2", region({"x1": 0, "x2": 1}))
    assert delay_successor(delay_successor(t)) is None


def test_no_timers_no_delay_successor():
    assert delay_successor(RegionState("q0", region())) is None


def test_delay_successor_matches_concrete_delay():
    c = C("q2", {"x1": F(4, 3), "x2": F(7, 4)})
    s = RegionState("q2", region_of(c, 2))
    t = delay_successor(s)
    # x1 has the smaller fraction, so it reaches an integer first
    assert t.region == region_of(delay(c, F(1, 3)), 2)
    assert delay_successor(t).region == region_of(delay(c, F(1, 2)), 2)


def test_modified_restart_marks_pending(two_timer):
    s = ModifiedRegionState("q2", region({"x1": 0, "x2": 1}))
    s2, lab = discrete_successor(two_timer, s, Input("i"))
    assert s2 == ModifiedRegionState("q2", region({"x1": 1, "x2": 1}), frozenset({"x1"}))
    assert lab == Act(Input("i"), "x1") and str(lab) == "(i,x1)"
    s3, kill = kill_step(s2, "x1")
    assert s3 == ModifiedRegionState("q2", region({"x1": 1, "x2": 1}))
    assert kill == Kill("x1") and str(kill) == "kill_x1"


def test_modified_timeout_without_update(two_timer):
    s = ModifiedRegionState("q2", region({"x1": 0, "x2": 2}))
    s2, lab = discrete_successor(two_timer, s, Timeout("x1"))
    assert s2 == ModifiedRegionState("q3", region({"x2": 2}))
    assert str(lab) == "(to:x1,-)"


def test_pending_blocks_other_moves(two_timer):
    s = ModifiedRegionState("q2", region({"x1": 1, "x2": 1}), frozenset({"x1"}))
    with pytest.raises(PendingDiscards):
        discrete_successor(two_timer, s, Input("i"))
    assert successors(two_timer, s) == [(Kill("x1"), ModifiedRegionState("q2", s.region))]
    with pytest.raises(NotPending):
        kill_step(s, "x2")


def test_timeout_needs_zero_region(two_timer):
    with pytest.raises(TimeoutNotRipe):
        discrete_successor(two_timer, RegionState("q1", region({"x1": 1})), Timeout("x1"))


def test_plain_labels_are_actions(two_timer):
    _, lab = discrete_successor(two_timer, RegionState("q0", region()), Input("i"))
    assert lab == Input("i")


DOUBLE_KILL = """timer y
timer x
input i
state p initial
state q active x
state r active x y
trans p i q start x 1
trans q i r start y 1
trans q to:x p none
trans r i p none
trans r to:x q start x 1
trans r to:y q none
"""


def test_two_zero_discards_are_killed_in_name_order():
    at = parse_at(DOUBLE_KILL)
    run = run_from_word(at, *parse_run_word("1 i 0 i 1 i 1"))
    labels = [str(lab) for lab in region_run_of(run, modified=True).labels]
    assert labels == ["tau", "(i,x)", "(i,y)", "tau", "(i,-)", "kill_x", "kill_y", "tau"]


def test_kill_discipline_on_paths(runs):
    for run in runs.values():
        path = region_run_of(run, modified=True)
        for s, lab in zip(path.states, path.labels):
            if s.pending:
                assert lab == Kill(min(s.pending))


def test_expanded_mode_crosses_every_boundary(runs):
    path = region_run_of(runs["pi"], mode="expanded")
    collapsed = region_run_of(runs["pi"])
    assert path.labels.count(TAU) > collapsed.labels.count(TAU)
    assert [lab for lab in path.labels if lab is not TAU] == \
           [lab for lab in collapsed.labels if lab is not TAU]
    for s, lab, s2 in zip(path.states, path.labels, path.states[1:]):
        if lab is TAU and s != s2:
            assert delay_successor(s) == s2


def test_bad_mode(runs):
    with pytest.raises(ValueError):
        region_run_of(runs["pi"], mode="fast")


def test_bound_and_enumeration(two_timer):
    assert region_count_bound(two_timer) == 4 * 2 * 4 * 9
    plain, modified = explore(two_timer), explore(two_timer, modified=True)
    assert len(plain) == 28
    assert len(modified) == 34
    assert len(plain) <= region_count_bound(two_timer)


def test_label_text_round_trip():
    for text in ["tau", "kill_x1", "(i,x1)", "(to:x2,-)", "i", "to:x1"]:
        assert str(parse_label(text)) == text


def test_lifting_the_pi_abstraction_keeps_its_trace(two_timer, runs):
    path = region_run_of(runs["pi"], mode="expanded")
    lifted = lift_path(two_timer, path)
    assert untimed_trace(lifted) == untimed_trace(runs["pi"])
    assert region_run_of(lifted, mode="expanded").labels == path.labels
