import io
import subprocess
import sys

import pytest

from atimers import (Input, Timeout, parse_at, parse_lbtm, parse_run_word, print_at, print_lbtm,
                     print_run_word)
from atimers.cli import main
from atimers.errors import ParseError
from atimers.formats import parse_tape

from golden import FIXTURES, WORDS

FIG = str(FIXTURES / "two_timer.at")


def test_fixture_matches_bundled_copy(two_timer):
    assert parse_at((FIXTURES / "two_timer.at").read_text()) == two_timer


def test_printed_model_is_canonical(two_timer):
    text = print_at(two_timer)
    assert text.splitlines()[:4] == ["timer x1", "timer x2", "input i", "state q0 initial"]
    assert parse_at(text) == two_timer


def test_comments_and_blank_lines_are_ignored(two_timer):
    text = "# two timers\n\n" + print_at(two_timer).replace("\n", "  # trailing\n")
    assert parse_at(text) == two_timer


@pytest.mark.parametrize("text,line,col", [
    ("timer x\ntimer x\n", 2, 7),
    ("input i\nstate p initial\nstate p\n", 3, 7),
    ("input i\nstate p initial\ntrans p i q none\n", 3, 11),
    ("input i\nstate p initial\ntrans p i p start\n", 3, 13),
    ("input i\nstate p initial\ntrans p i p maybe\n", 3, 13),
    ("input i\nstate p\n", 3, 1),
    ("bogus\n", 1, 1),
    ("timer 9x\n", 1, 7),
])
def test_parse_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_at(text, validate=False)
    assert (info.value.line, info.value.col) == (line, col)


def test_run_words():
    word, final = parse_run_word(WORDS["rho"])
    assert [a for _, a in word] == [Input("i"), Input("i"), Timeout("x1"), Timeout("x2")]
    assert print_run_word(word, final) == "1 i 1 i 0 to:x1 2 to:x2 1/2"
    assert parse_run_word("1/2") == ([], parse_run_word("0.5")[1])
    for bad in ["", "1 i", "1 i -1", "x"]:
        with pytest.raises(ParseError):
            parse_run_word(bad)


def test_lbtm_round_trip_and_errors():
    m = parse_lbtm((FIXTURES / "flip.lbtm").read_text())
    assert parse_lbtm(print_lbtm(m)) == m
    with pytest.raises(ParseError):
        parse_lbtm("alphabet a\nstate p initial\n")
    with pytest.raises(ParseError):
        parse_lbtm("alphabet a\nstate p initial final\nltrans p read b write a move R p\n")
    assert parse_tape("a1, a2 a1") == ("a1", "a2", "a1")


def _run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_cli_validate(tmp_path):
    assert _run("validate", FIG) == (0, "ok\n")
    bad = tmp_path / "bad.at"
    bad.write_text("timer x\ninput i\ninput j\nstate p initial\ntrans p i p none\n")
    code, out = _run("validate", str(bad))
    assert code == 1 and out.startswith("input-total at (p, j)")


def test_cli_simulate():
    code, out = _run("simulate", FIG, WORDS["rho"])
    assert code == 0
    assert out.splitlines()[-2:] == ["trace q0 i q1 i q2 to:x1 q3 to:x2 q0", "padded yes"]


def test_cli_blocks_and_graph():
    code, out = _run("blocks", FIG, WORDS["pi"])
    assert out.splitlines() == ["B1=(1; x1; moon)", "B2=(2 4; x2; bot)", "B3=(3 5; x1; cross)",
                                "B1 -> B2 [zero(1,2)]", "B2 -> B3 [zero(4,5)]",
                                "B3 -> B1 [moon(3,1)]"]
    code, out = _run("graph", FIG, WORDS["rho"])
    assert out == "B1:x1:bot ->\nB2:x2:bot -> B1\nacyclic\n"


def test_cli_wiggle():
    code, out = _run("wiggle", FIG, WORDS["pi"])
    assert code == 1
    assert out == "unwigglable\ncycle B1 -> B2 -> B3 -> B1; reltime 0 + 2 + 0 - 1 + 0 - 1 = 0\n"
    code, out = _run("wiggle", FIG, WORDS["rho"])
    assert code == 0
    assert out.count("to:x") == 2


def test_cli_reach():
    code, out = _run("reach", FIG, "--target", "q3")
    assert code == 0 and out.startswith("reachable\nwitness ")
    assert _run("reach", FIG, "--target", "q9")[0] == 2


def test_cli_race_avoiding():
    code, out = _run("race-avoiding", FIG, "--max-actions", "6")
    assert code == 1 and out.startswith("not race-avoiding\n")
    assert _run("race-avoiding", FIG, "--max-actions", "2") == (
        0, "unknown (no witness up to 2 actions)\n")
    code, out = _run("race-avoiding", str(FIXTURES / "single_timer.at"))
    assert (code, out) == (0, "race-avoiding (every state has at most one active timer)\n")


def test_cli_region_stats():
    code, out = _run("region-stats", FIG)
    assert out.splitlines() == ["states 4", "timers 2", "max-constant 2", "bound 288",
                                "reachable-regions 28", "reachable-modified-regions 34"]
    code, out = _run("region-stats", FIG, "--dot")
    assert out.startswith("digraph regions {\n") and out.endswith("}\n")


def test_cli_gen(two_timer):
    code, out = _run("gen", "widget", FIG, "q0")
    assert code == 0 and "timer zp" in out
    code, out = _run("gen", "lbtm", str(FIXTURES / "flip.lbtm"), "a1,a2")
    assert parse_at(out).has_state("r_done")


def test_cli_error_codes():
    assert _run("simulate", FIG, "1 i 3")[0] == 3
    assert _run("simulate", FIG, "1 j 1")[0] == 2
    assert _run("validate", "/nonexistent/file.at")[0] == 2
    assert _run("race-avoiding", FIG, "--max-actions", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "atimers", "validate", FIG],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "ok\n"
