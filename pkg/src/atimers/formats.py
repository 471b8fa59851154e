"""Line-oriented text formats for automata, run words and LBTMs.

Automaton format::

    timer x1
    input i
    state q0 initial
    state q1 active x1
    trans q0 i q1 start x1 1
    trans q1 to:x1 q1 none

Run words alternate delays and actions: ``1 i 0 to:x1 1/2``.
``#`` starts a comment in model files.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError, ValidationError
from .generators import LBTM, LTransition
from .model import (IDENTIFIER, AutomatonWithTimers, Input, Start, Timeout,
                    action_key, update_str, validate_automaton)
from .semantics import TimedRun

_DELAY = re.compile(r"(\d+(\.\d+)?|\d+/\d+)\Z")
_INT = re.compile(r"\d+\Z")


def _tokens(line: str):
    """Split a line into ``(column, token)`` pairs, dropping comments."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _ident(lineno: int, tok, kind: str) -> str:
    col, text = tok
    if not IDENTIFIER.match(text):
        raise ParseError(lineno, col, f"invalid {kind} name {text!r}")
    return text


def _parse_action(lineno: int, tok):
    col, text = tok
    if text.startswith("to:"):
        return Timeout(_ident(lineno, (col + 3, text[3:]), "timer"))
    return Input(_ident(lineno, tok, "input"))


def parse_at(text: str, validate: bool = True) -> AutomatonWithTimers:
    timers, inputs, states = {}, {}, {}
    active, initial = {}, None
    trans = {}
    refs = []  # (kind, name, line, col) checked after all declarations are read
    nlines = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        nlines = lineno
        toks = _tokens(line)
        if not toks:
            continue
        col, kw = toks[0]
        rest = toks[1:]
        if kw in ("timer", "input"):
            if len(rest) != 1:
                raise ParseError(lineno, col, f"'{kw}' takes exactly one name")
            name = _ident(lineno, rest[0], kw)
            table = timers if kw == "timer" else inputs
            if name in table:
                raise ParseError(lineno, rest[0][0], f"duplicate {kw} {name!r}")
            table[name] = lineno
        elif kw == "state":
            if not rest:
                raise ParseError(lineno, col, "'state' needs a name")
            name = _ident(lineno, rest[0], "state")
            if name in states:
                raise ParseError(lineno, rest[0][0], f"duplicate state {name!r}")
            states[name] = lineno
            pos = 1
            if pos < len(rest) and rest[pos][1] == "initial":
                if initial is not None:
                    raise ParseError(lineno, rest[pos][0],
                                     f"second initial state (first is {initial!r})")
                initial = name
                pos += 1
            act = []
            if pos < len(rest) and rest[pos][1] == "active":
                for tok in rest[pos + 1:]:
                    t = _ident(lineno, tok, "timer")
                    if t in act:
                        raise ParseError(lineno, tok[0], f"timer {t!r} listed twice")
                    act.append(t)
                    refs.append(("timer", t, lineno, tok[0]))
                pos = len(rest)
            if pos < len(rest):
                raise ParseError(lineno, rest[pos][0], f"unexpected {rest[pos][1]!r}")
            active[name] = act
        elif kw == "trans":
            if len(rest) < 4:
                raise ParseError(lineno, col, "'trans' needs: source action target update")
            src = _ident(lineno, rest[0], "state")
            act = _parse_action(lineno, rest[1])
            dst = _ident(lineno, rest[2], "state")
            ucol, utext = rest[3]
            if utext == "none":
                if len(rest) != 4:
                    raise ParseError(lineno, rest[4][0], "unexpected token after 'none'")
                upd = None
            elif utext == "start":
                if len(rest) != 6:
                    raise ParseError(lineno, ucol, "'start' needs a timer and a value")
                t = _ident(lineno, rest[4], "timer")
                vcol, vtext = rest[5]
                if not _INT.match(vtext):
                    raise ParseError(lineno, vcol, f"invalid start value {vtext!r}")
                upd = Start(t, int(vtext))
                refs.append(("timer", t, lineno, rest[4][0]))
            else:
                raise ParseError(lineno, ucol, f"expected 'none' or 'start', got {utext!r}")
            refs.append(("state", src, lineno, rest[0][0]))
            refs.append(("state", dst, lineno, rest[2][0]))
            if isinstance(act, Timeout):
                refs.append(("timer", act.timer, lineno, rest[1][0] + 3))
            else:
                refs.append(("input", act.name, lineno, rest[1][0]))
            if (src, act) in trans:
                raise ParseError(lineno, col, f"duplicate transition from {src} on {act}")
            trans[(src, act)] = (dst, upd)
        else:
            raise ParseError(lineno, col, f"unknown keyword {kw!r}")
    tables = {"timer": timers, "input": inputs, "state": states}
    for kind, name, lineno, col in refs:
        if name not in tables[kind]:
            raise ParseError(lineno, col, f"undeclared {kind} {name!r}")
    for name in timers:
        if name in inputs:
            raise ParseError(inputs[name], 1, f"{name!r} is both a timer and an input")
    if initial is None:
        raise ParseError(nlines + 1, 1, "no initial state declared")
    at = AutomatonWithTimers(timers, inputs, states, initial, active, trans)
    if validate:
        report = validate_automaton(at)
        if not report.ok:
            raise ValidationError(report)
    return at


def print_at(at: AutomatonWithTimers) -> str:
    lines = [f"timer {x}" for x in at.timers]
    lines += [f"input {i}" for i in at.inputs]
    for q in at.states:
        parts = ["state", q]
        if q == at.initial:
            parts.append("initial")
        if at.active[q]:
            parts.append("active")
            parts += sorted(at.active[q], key=at.timers.index)
        lines.append(" ".join(parts))
    order = {q: n for n, q in enumerate(at.states)}
    for (q, a), (q2, u) in sorted(at.delta.items(),
                                  key=lambda kv: (order[kv[0][0]], action_key(kv[0][1]))):
        lines.append(f"trans {q} {a} {q2} {update_str(u)}")
    return "\n".join(lines) + "\n"


def fraction_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_delay(text: str, col: int = 1, lineno: int = 1) -> Fraction:
    if not _DELAY.match(text):
        raise ParseError(lineno, col, f"invalid delay {text!r}")
    return Fraction(text)


def parse_run_word(text: str):
    """Parse ``d1 a1 ... dn an d(n+1)`` into ``(word, final_delay)``."""
    toks = _tokens(text.replace("\n", " "))
    if not toks:
        raise ParseError(1, 1, "empty run word")
    if len(toks) % 2 == 0:
        col, t = toks[-1]
        raise ParseError(1, col, "run word must end with a delay")
    word = []
    for k in range(0, len(toks) - 1, 2):
        d = parse_delay(toks[k][1], toks[k][0])
        word.append((d, _parse_action(1, toks[k + 1])))
    return word, parse_delay(toks[-1][1], toks[-1][0])


def print_run_word(word, final_delay) -> str:
    parts = []
    for d, a in word:
        parts.append(fraction_str(Fraction(d)))
        parts.append(str(a))
    parts.append(fraction_str(Fraction(final_delay)))
    return " ".join(parts)


def run_to_word_text(run: TimedRun) -> str:
    return print_run_word(run.word(), run.final_delay)


def parse_lbtm(text: str) -> LBTM:
    alphabet, states = None, []
    initial, finals = None, []
    trans = []
    nlines = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        nlines = lineno
        toks = _tokens(line)
        if not toks:
            continue
        col, kw = toks[0]
        rest = toks[1:]
        if kw == "alphabet":
            if alphabet is not None:
                raise ParseError(lineno, col, "duplicate alphabet line")
            if not rest:
                raise ParseError(lineno, col, "empty alphabet")
            alphabet = []
            for tok in rest:
                s = _ident(lineno, tok, "symbol")
                if s in alphabet:
                    raise ParseError(lineno, tok[0], f"duplicate symbol {s!r}")
                alphabet.append(s)
        elif kw == "state":
            if not rest:
                raise ParseError(lineno, col, "'state' needs a name")
            name = _ident(lineno, rest[0], "state")
            if name in states:
                raise ParseError(lineno, rest[0][0], f"duplicate state {name!r}")
            states.append(name)
            for tok in rest[1:]:
                if tok[1] == "initial":
                    if initial is not None:
                        raise ParseError(lineno, tok[0], "second initial state")
                    initial = name
                elif tok[1] == "final":
                    finals.append(name)
                else:
                    raise ParseError(lineno, tok[0], f"unexpected {tok[1]!r}")
        elif kw == "ltrans":
            shape = ["q", "read", "a", "write", "b", "move", "d", "q"]
            if len(rest) != len(shape):
                raise ParseError(lineno, col,
                                 "expected: ltrans q read a write b move L|R q'")
            for tok, want in zip(rest, shape):
                if want in ("read", "write", "move") and tok[1] != want:
                    raise ParseError(lineno, tok[0], f"expected {want!r}")
            mcol, move = rest[6]
            if move not in ("L", "R"):
                raise ParseError(lineno, mcol, f"move must be L or R, got {move!r}")
            trans.append((lineno, rest, LTransition(rest[0][1], rest[2][1], rest[4][1],
                                                    move, rest[7][1])))
        else:
            raise ParseError(lineno, col, f"unknown keyword {kw!r}")
    if alphabet is None:
        raise ParseError(nlines + 1, 1, "no alphabet declared")
    if initial is None:
        raise ParseError(nlines + 1, 1, "no initial state declared")
    if len(finals) != 1:
        raise ParseError(nlines + 1, 1, f"expected exactly one final state, got {len(finals)}")
    seen = set()
    for lineno, toks, t in trans:
        for tok, name, pool, kind in ((toks[0], t.source, states, "state"),
                                      (toks[2], t.read, alphabet, "symbol"),
                                      (toks[4], t.write, alphabet, "symbol"),
                                      (toks[7], t.target, states, "state")):
            if name not in pool:
                raise ParseError(lineno, tok[0], f"undeclared {kind} {name!r}")
        if t in seen:
            raise ParseError(lineno, 1, "duplicate transition")
        seen.add(t)
    return LBTM(tuple(alphabet), tuple(states), initial, finals[0],
                tuple(t for _, _, t in trans))


def print_lbtm(m: LBTM) -> str:
    lines = ["alphabet " + " ".join(m.alphabet)]
    for q in m.states:
        parts = ["state", q]
        if q == m.initial:
            parts.append("initial")
        if q == m.final:
            parts.append("final")
        lines.append(" ".join(parts))
    for t in m.transitions:
        lines.append(f"ltrans {t.source} read {t.read} write {t.write} move {t.move} {t.target}")
    return "\n".join(lines) + "\n"


def parse_tape(text: str) -> tuple:
    """A tape word given as symbols separated by commas and/or spaces."""
    return tuple(s for s in re.split(r"[,\s]+", text.strip()) if s)
