"""Model generators: LBTM reduction, the unwigglable widget, random automata and runs."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import AnchorHasActiveTimers, MalformedLBTM, UsageError
from .model import AutomatonWithTimers, Input, Start, Timeout, validate_automaton
from .semantics import delay, discrete_step, initial_configuration


@dataclass(frozen=True)
class LTransition:
    source: str
    read: str
    write: str
    move: str  # "L" or "R"
    target: str


@dataclass(frozen=True)
class LBTM:
    """Linear-bounded Turing machine over a fixed tape (input alphabet = tape alphabet)."""

    alphabet: tuple
    states: tuple
    initial: str
    final: str
    transitions: tuple

    def check(self) -> None:
        if not self.alphabet:
            raise MalformedLBTM("empty alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MalformedLBTM("duplicate symbols")
        if len(set(self.states)) != len(self.states):
            raise MalformedLBTM("duplicate states")
        for q in (self.initial, self.final):
            if q not in self.states:
                raise MalformedLBTM(f"unknown state {q!r}")
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise MalformedLBTM(f"transition {t} uses an unknown state")
            if t.read not in self.alphabet or t.write not in self.alphabet:
                raise MalformedLBTM(f"transition {t} uses an unknown symbol")
            if t.move not in ("L", "R"):
                raise MalformedLBTM(f"transition {t} has move {t.move!r}")


def lbtm_accepts(m: LBTM, w) -> bool:
    """Exhaustive search of the configuration graph (head confined to the tape)."""
    m.check()
    w = tuple(w)
    if not w:
        raise MalformedLBTM("empty input word")
    start = (m.initial, w, 0)
    seen = {start}
    todo = deque([start])
    while todo:
        q, tape, pos = todo.popleft()
        if q == m.final:
            return True
        for t in m.transitions:
            if t.source != q or tape[pos] != t.read:
                continue
            npos = pos - 1 if t.move == "L" else pos + 1
            if not 0 <= npos < len(tape):
                continue
            nxt = (t.target, tape[:pos] + (t.write,) + tape[pos + 1:], npos)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


def lbtm_to_at(m: LBTM, w, ticks_per_symbol: int = 3) -> AutomatonWithTimers:
    """Automaton whose state ``r_done`` is reachable iff ``m`` accepts ``w``.

    Timer ``x`` drives a cyclic clock; timer ``x<i>`` encodes tape cell ``i``
    by the clock value at which it times out.  With ``ticks_per_symbol=2``
    symbol ``a_j`` is stored as value ``2j``; a cell timer started at the
    same instant as a clock tick can then be read one tick early and yield
    the wrong symbol.  The default of 3 ticks stores ``a_j`` as ``3j+1``,
    which keeps every possible reading inside the symbol's slot.
    """
    m.check()
    w = tuple(w)
    n, k = len(w), len(m.alphabet)
    if n < 1:
        raise MalformedLBTM("empty input word")
    for s in w:
        if s not in m.alphabet:
            raise MalformedLBTM(f"symbol {s!r} not in alphabet")
    if ticks_per_symbol < 2:
        raise UsageError("ticks_per_symbol must be at least 2")
    ticks = ticks_per_symbol
    period = ticks * (k + 1)
    sym_index = {a: j for j, a in enumerate(m.alphabet, start=1)}

    def cell_value(j: int) -> int:
        return ticks * j + (1 if ticks >= 3 else 0)

    cells = [f"x{i}" for i in range(1, n + 1)]
    timers = ["x"] + cells
    t_names = [f"t{j}" for j in range(1, len(m.transitions) + 1)]
    inputs = ["go"] + t_names
    qidx = {q: j for j, q in enumerate(m.states)}

    def tup(q, i, sym, clk):
        return f"c{qidx[q]}_{i}_{sym}_{clk}"

    r = [f"r{i}" for i in range(n + 1)]
    done, sink = "r_done", "r_sink"
    states = r + [done, sink]
    active = {r[0]: (), done: (), sink: ()}
    for i in range(1, n + 1):
        active[r[i]] = ["x"] + cells[:i - 1]
    delta = {}
    go = Input("go")

    def to_sink(q):
        for a in inputs:
            delta.setdefault((q, Input(a)), (sink, None))
        for x in active[q]:
            delta.setdefault((q, Timeout(x)), (sink, None))

    first = (m.initial, 1, 0, 0)
    delta[(r[0], go)] = (r[1], Start("x", 1))
    for i in range(1, n + 1):
        nxt = r[i + 1] if i < n else tup(*first)
        delta[(r[i], go)] = (nxt, Start(cells[i - 1], cell_value(sym_index[w[i - 1]])))
    for q in r + [done, sink]:
        to_sink(q)

    # only tuples reachable in the control graph are materialised
    seen = {first}
    todo = deque([first])
    order = []
    while todo:
        node = todo.popleft()
        order.append(node)
        q, i, sym, clk = node
        name = tup(*node)
        active[name] = timers
        succ = []
        if clk > 0 or sym == 0:
            nxt = (q, i, sym, (clk + 1) % period)
            delta[(name, Timeout("x"))] = (tup(*nxt), Start("x", 1))
            succ.append(nxt)
        else:
            delta[(name, Timeout("x"))] = (sink, None)
        for li, cell in enumerate(cells, start=1):
            if li == i:
                nxt = (q, i, clk // ticks, clk)
                delta[(name, Timeout(cell))] = (tup(*nxt), Start(cell, period))
                succ.append(nxt)
            else:
                delta[(name, Timeout(cell))] = (name, Start(cell, period))
        if sym > 0 and clk == 0:
            for tname, t in zip(t_names, m.transitions):
                if t.source != q or sym_index[t.read] != sym:
                    continue
                ni = i - 1 if t.move == "L" else i + 1
                if not 1 <= ni <= n:
                    continue
                nxt = (t.target, ni, 0, 0)
                delta[(name, Input(tname))] = (tup(*nxt), Start(cells[i - 1],
                                                                cell_value(sym_index[t.write])))
                succ.append(nxt)
        if q == m.final:
            delta[(name, go)] = (done, None)
        for a in inputs:
            delta.setdefault((name, Input(a)), (sink, None))
        for s in succ:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    states += [tup(*node) for node in order]
    return AutomatonWithTimers(timers, inputs, states, r[0], active, delta)


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def append_unwigglable_widget(at: AutomatonWithTimers, anchor: str,
                              go: str = "go") -> AutomatonWithTimers:
    """Attach the two-timer gadget ``anchor -go-> s1 -go-> s2 -to:z'-> s3 -to:z-> s4``.

    Every run that reaches ``anchor`` can be extended by a run whose block
    graph is cyclic.  The input ``go`` is reused if it already exists
    (the anchor's ``go`` transition is then replaced); otherwise it is
    added and every original state sends it to a fresh sink.
    """
    at.check_state(anchor)
    if at.active[anchor]:
        raise AnchorHasActiveTimers(f"anchor {anchor} has active timers "
                                    f"{sorted(at.active[anchor])}")
    if go in at.timers:
        raise UsageError(f"{go!r} is a timer name")
    names = set(at.timers) | set(at.inputs) | set(at.states)
    z = _fresh("z", names)
    names.add(z)
    zp = _fresh("zp", names)
    names.add(zp)
    s = []
    for j in range(1, 5):
        s.append(_fresh(f"s{j}", names))
        names.add(s[-1])
    sink = _fresh("s_sink", names)
    timers = at.timers + (z, zp)
    inputs = at.inputs if go in at.inputs else at.inputs + (go,)
    states = at.states + tuple(s) + (sink,)
    active = dict(at.active)
    active.update({s[0]: {z}, s[1]: {z, zp}, s[2]: {z}, s[3]: set(), sink: set()})
    delta = dict(at.delta)
    g = Input(go)
    if go not in at.inputs:
        for q in at.states:
            delta[(q, g)] = (sink, None)
    delta[(anchor, g)] = (s[0], Start(z, 1))
    delta[(s[0], g)] = (s[1], Start(zp, 1))
    delta[(s[1], Timeout(zp))] = (s[2], None)
    delta[(s[2], Timeout(z))] = (s[3], None)
    for q in s + [sink]:
        for i in inputs:
            delta.setdefault((q, Input(i)), (sink, None))
        for x in active[q]:
            delta.setdefault((q, Timeout(x)), (sink, None))
    return AutomatonWithTimers(timers, inputs, states, at.initial, active, delta)


def random_at(seed, n_states: int, n_timers: int, n_inputs: int,
              max_constant: int, start_bias: float = 0.6) -> AutomatonWithTimers:
    """A valid automaton drawn deterministically from ``seed``.

    Active sets are drawn first (the initial state gets none); each
    transition then picks a random target and an update compatible with
    the constraints, retrying with other targets when needed.  The initial
    state is always a valid fallback target with no update.
    """
    if min(n_states, n_inputs, max_constant) < 1 or n_timers < 0:
        raise UsageError("sizes must be positive")
    rng = random.Random(seed)
    timers = [f"x{j}" for j in range(1, n_timers + 1)]
    inputs = [f"i{j}" for j in range(1, n_inputs + 1)]
    states = [f"q{j}" for j in range(n_states)]
    active = {states[0]: frozenset()}
    for q in states[1:]:
        active[q] = frozenset(x for x in timers if rng.random() < 0.5)
    delta = {}

    def options(src, action, dst):
        a_src, a_dst = active[src], active[dst]
        own = action.timer if isinstance(action, Timeout) else None
        opts = []
        if a_dst <= a_src and own not in a_dst:
            opts.append(None)
        for x in sorted(a_dst):
            if own is not None and x != own:
                continue
            if a_dst - {x} <= a_src:
                opts.append(x)
        return opts

    for q in states:
        acts = [Input(i) for i in inputs] + [Timeout(x) for x in sorted(active[q])]
        for a in acts:
            targets = states[:]
            rng.shuffle(targets)
            choice = None
            for dst in targets:
                opts = options(q, a, dst)
                if not opts:
                    continue
                starts = [o for o in opts if o is not None]
                if starts and (None not in opts or rng.random() < start_bias):
                    x = rng.choice(starts)
                    choice = (dst, Start(x, rng.randint(1, max_constant)))
                else:
                    choice = (dst, None)
                break
            if choice is None:
                choice = (states[0], None)
            delta[(q, a)] = choice
    at = AutomatonWithTimers(timers, inputs, states, states[0], active, delta)
    assert validate_automaton(at).ok
    return at


def random_word(at: AutomatonWithTimers, rng: random.Random, n_actions: int,
                step=Fraction(1, 2), zero_bias: float = 0.35):
    """Random feasible padded word with ``n_actions`` free actions on a half-unit grid.

    Delays favour zero and "exactly until the next timeout" so that the
    resulting runs contain many races.  After the free actions, timers
    sitting at zero are fired (with zero delay) so that a positive final
    delay exists.  Returns ``(word, final_delay)``.
    """
    def pick_delay(c, positive: bool):
        vals = [v for _, v in c.valuation]
        cap = min(vals) if vals else Fraction(2)
        if not positive and rng.random() < zero_bias:
            return Fraction(0)
        if vals and rng.random() < 0.4:
            return cap
        lo = 1 if positive else 0
        m = int(cap / step)
        if m < lo:
            return cap / 2
        return step * rng.randint(lo, m)

    c = initial_configuration(at)
    word = []
    for j in range(n_actions):
        d = pick_delay(c, j == 0)
        c = delay(c, d)
        acts = [Input(i) for i in at.inputs] + [Timeout(x) for x in c.zero_timers()]
        a = rng.choice(acts)
        c, _ = discrete_step(at, c, a)
        word.append((d, a))
    while c.zero_timers():
        a = Timeout(c.zero_timers()[0])
        c, _ = discrete_step(at, c, a)
        word.append((Fraction(0), a))
    vals = [v for _, v in c.valuation]
    final = min(vals) / 2 if vals else step
    return word, final
