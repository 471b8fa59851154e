import random
from fractions import Fraction as F

import pytest

from atimers import (TAU, Act, ExhaustedToBound, Input, Kill, NotRaceAvoiding, RaceAvoiding,
                     StaticSingleTimer, Timeout, UnknownBeyondBound, append_unwigglable_widget,
                     block_graph, block_graph_cyclic_word, is_padded,
                     lift_to_timed_run, parse_at, parse_run_word, phi_matches, random_at,
                     reachable, region_run_of, run_from_word, search_unwigglable,
                     static_single_timer_check, two_timer_source, untimed_trace)
from atimers.avoidance import decode_word, iter_padded_words
from atimers.errors import MalformedWord, UnknownName
from atimers.regions import parse_label
from atimers.semantics import delay, discrete_step, initial_configuration

from golden import FIXTURES, PI_MODIFIED_LABELS

i, go = Input("i"), Input("go")


def _word(labels):
    return tuple(parse_label(t) for t in labels)


# ---------------------------------------------------------------------------
# reachability


def test_two_timer_reaches_q3(two_timer):
    res = reachable(two_timer, "q3")
    assert res.reachable
    assert res.witness_run.final.state == "q3"
    assert res.explored <= 288


def test_initial_state_is_reachable_at_once(two_timer):
    res = reachable(two_timer, "q0")
    assert res.reachable and res.witness_run.n == 0


def test_unknown_target(two_timer):
    with pytest.raises(UnknownName):
        reachable(two_timer, "q9")


def test_isolated_state_is_unreachable():
    at = parse_at("input a\nstate s initial\nstate t\ntrans s a s none\ntrans t a s none\n")
    res = reachable(at, "t")
    assert not res.reachable and res.witness_run is None


def test_witness_follows_region_path(two_timer):
    for seed in range(20):
        at = random_at(seed, 4, 2, 2, 2)
        for q in at.states:
            res = reachable(at, q)
            if not res.reachable:
                continue
            run = res.witness_run
            assert run.final.state == q
            assert run_from_word(at, run.word(), run.final_delay) == run
            again = lift_to_timed_run(at, res.region_path)
            assert untimed_trace(again) == untimed_trace(run)


def _grid_reachable(at, horizon_steps: int) -> set:
    """States reached by concrete runs whose delays lie on the half-unit grid."""
    step = F(1, 2)
    seen, frontier = {initial_configuration(at)}, [initial_configuration(at)]
    for _ in range(horizon_steps):
        nxt = []
        for c in frontier:
            vals = [v for _, v in c.valuation]
            cap = min(vals) if vals else F(1)
            for k in range(int(cap / step) + 1):
                c1 = delay(c, k * step)
                for a in [Input(n) for n in at.inputs] + [Timeout(x) for x in c1.zero_timers()]:
                    c2, _ = discrete_step(at, c1, a)
                    if c2 not in seen:
                        seen.add(c2)
                        nxt.append(c2)
        frontier = nxt
    return {c.state for c in seen}


def test_grid_search_never_beats_region_search():
    for seed in range(25):
        at = random_at(seed, 4, 2, 1, 2)
        grid = _grid_reachable(at, 5)
        for q in at.states:
            if q in grid:
                assert reachable(at, q).reachable, (seed, q)


# ---------------------------------------------------------------------------
# words and the pattern matcher


def test_pi_modified_word_is_cyclic():
    w = _word(PI_MODIFIED_LABELS)
    assert phi_matches(w) and block_graph_cyclic_word(w)


def test_rho_word_is_acyclic(runs):
    w = region_run_of(runs["rho"], modified=True).labels
    assert not phi_matches(w) and not block_graph_cyclic_word(w)


def test_kill_attributed_to_previous_owner():
    # in pi the third i restarts x1; the kill belongs to the first block, not the third
    dec = decode_word(_word(PI_MODIFIED_LABELS))
    assert dec.block_at[6] == 1
    assert dec.discarder == {6: 5}
    assert [b.fate.value for b in dec.blocks] == ["moon", "bot", "cross"]


def test_kill_does_not_race_with_other_symbols_of_its_instant():
    # y-block at 2 precedes x-block at 3; at the second instant the discarder (j,-)
    # comes first, then kill_x, then the y timeout.  Only the discarder races the kill.
    w = (TAU, Act(i, "y"), Act(i, "x"), TAU, Act(Input("j"), None), Kill("x"),
         Act(Timeout("y"), None), TAU)
    assert decode_word(w).edges() == {(1, 2), (3, 1), (3, 2)}
    assert not block_graph_cyclic_word(w)
    assert not phi_matches(w)


def test_shared_symbol_closes_chain():
    base = parse_at("input a\nstate s initial\ntrans s a s none\n")
    at = append_unwigglable_widget(base, "s")
    run = run_from_word(at, *parse_run_word("1 go 0 go 1 to:zp 0 go 1/2"))
    w = region_run_of(run, modified=True).labels
    assert [str(x) for x in w] == ["tau", "(go,z)", "(go,zp)", "tau", "(to:zp,-)", "(go,-)",
                                   "kill_z", "tau"]
    assert block_graph_cyclic_word(w) and phi_matches(w)
    assert not block_graph(run).is_acyclic()


def test_phi_needs_tau_at_both_ends():
    w = _word(PI_MODIFIED_LABELS)
    assert not phi_matches(w[:-1])
    assert not phi_matches(w[1:])


@pytest.mark.parametrize("labels", [
    [Kill("x1")],
    [TAU, Act(i, "x1"), TAU, Act(i, None), Kill("x2")],
    [Act(Timeout("x1"), None)],
    [Act(i, "x1"), TAU, Act(Timeout("x1"), "x2")],
    [Act(i, "x1"), Act(i, None), Kill("x1"), Kill("x1")],
])
def test_malformed_words(labels):
    with pytest.raises(MalformedWord):
        decode_word(labels)


def test_enumerated_words_are_padded_paths(two_timer):
    for w in iter_padded_words(two_timer, 4):
        assert w[0] is TAU and w[-1] is TAU
        assert all(not (a is TAU and b is TAU) for a, b in zip(w, w[1:]))


# ---------------------------------------------------------------------------
# bounded search


def test_static_check(two_timer):
    assert not static_single_timer_check(two_timer)
    single = parse_at((FIXTURES / "single_timer.at").read_text())
    assert static_single_timer_check(single)
    assert search_unwigglable(single) == RaceAvoiding(StaticSingleTimer())


def test_two_timer_witness_is_pi_shaped(two_timer, runs):
    v = search_unwigglable(two_timer, max_actions=6)
    assert isinstance(v, NotRaceAvoiding)
    assert untimed_trace(v.witness) == untimed_trace(runs["pi"])
    assert is_padded(v.witness)
    assert v.certificate.total == 0
    assert phi_matches(v.word)


def test_larger_bounds_keep_the_witness(two_timer):
    first = search_unwigglable(two_timer, max_actions=5)
    for bound in (6, 8):
        v = search_unwigglable(two_timer, max_actions=bound)
        assert v.witness == first.witness


def test_small_bound_is_inconclusive(two_timer):
    assert search_unwigglable(two_timer, max_actions=2) == UnknownBeyondBound(2)


def test_bound_must_be_positive(two_timer):
    with pytest.raises(ValueError):
        search_unwigglable(two_timer, max_actions=0)


def test_variant_without_restart_loop():
    src = (two_timer_source().replace("trans q2 i q2 start x1 1", "trans q2 i q2 none")
           .replace("trans q2 to:x2 q1 none", "trans q2 to:x2 q0 none"))
    at = parse_at(src)
    assert search_unwigglable(at, max_actions=8, use_static=False) == \
        RaceAvoiding(ExhaustedToBound(4, saturated=True))
    assert not any(block_graph_cyclic_word(w) for w in iter_padded_words(at, 8))


def test_widget_on_single_state():
    base = parse_at("input a\nstate s initial\ntrans s a s none\n")
    v = search_unwigglable(append_unwigglable_widget(base, "s"))
    assert isinstance(v, NotRaceAvoiding)
    timers = {b.timer for b in v.certificate.cycle.blocks}
    assert {"z", "zp"} <= timers


def test_widget_on_two_timer_is_local(two_timer):
    v = search_unwigglable(append_unwigglable_widget(two_timer, "q0"))
    assert isinstance(v, NotRaceAvoiding)
    assert v.witness.n == 4
    visited = untimed_trace(v.witness)[2::2]
    assert not set(visited) & set(two_timer.states)


def test_designed_widget_run_has_two_block_cycle(two_timer):
    at = append_unwigglable_widget(two_timer, "q0")
    run = run_from_word(at, *parse_run_word("1 go 0 go 1 to:zp 0 to:z 1"))
    g = block_graph(run)
    assert [(b.timer, b.actions) for b in g.blocks] == [("z", (1, 4)), ("zp", (2, 3))]
    assert {(e.source.index, e.target.index) for e in g.edges} == {(1, 2), (2, 1)}


def test_search_is_deterministic():
    rng = random.Random(7)
    for _ in range(5):
        at = random_at(rng.randint(0, 999), 3, 2, 1, 2)
        assert search_unwigglable(at, 5) == search_unwigglable(at, 5)
