"""Region abstraction of timer valuations and the (modified) region automaton.

A region records, for every active timer, its integer part, whether its
fractional part is zero, and the order of the nonzero fractional parts.
Timers only count down and never exceed the largest start constant, so
no "above C" class is needed.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import (NotPending, PendingDiscards, TimeoutNotRipe, UndefinedTransition,
                     ValueExceedsC)
from .model import AutomatonWithTimers, Input, Timeout, discard_set, max_constant
from .semantics import (Configuration, TimedRun, delay, discrete_step, initial_configuration,
                        run_from_word)


@dataclass(frozen=True)
class Region:
    ints: tuple = ()                    # (timer, integer part), sorted by timer
    zero: frozenset = frozenset()       # timers with zero fractional part
    classes: tuple = ()                 # nonzero-fraction timers, ascending fraction

    def timers(self) -> tuple:
        return tuple(x for x, _ in self.ints)

    def integer(self, x: str) -> int:
        return dict(self.ints)[x]

    def at_zero(self) -> tuple:
        """Timers whose value is exactly 0."""
        return tuple(x for x, n in self.ints if n == 0 and x in self.zero)

    def is_open(self) -> bool:
        """True when small positive delays stay inside the region."""
        return not self.zero

    def __str__(self) -> str:
        parts = []
        for x, n in self.ints:
            parts.append(f"{x}={n}" if x in self.zero else f"{n}<{x}<{n + 1}")
        if sum(len(c) for c in self.classes) > 1:
            parts.append("frac " + " < ".join("=".join(c) for c in self.classes))
        return "[" + ", ".join(parts) + "]"

    def sort_key(self) -> tuple:
        return (self.ints, tuple(sorted(self.zero)), self.classes)


def _canonical(values: dict) -> Region:
    ints, zero, fracs = [], set(), {}
    for x, v in sorted(values.items()):
        n = math.floor(v)
        ints.append((x, n))
        f = v - n
        if f == 0:
            zero.add(x)
        else:
            fracs.setdefault(f, []).append(x)
    classes = tuple(tuple(sorted(fracs[f])) for f in sorted(fracs))
    return Region(tuple(ints), frozenset(zero), classes)


def region_of(c: Configuration, C: int) -> Region:
    for x, v in c.valuation:
        if v > C:
            raise ValueExceedsC(f"timer {x} = {v} exceeds the largest constant {C}")
    return _canonical(dict(c.valuation))


def timer_equivalent(k1, k2) -> bool:
    """Whether two valuations (mappings timer -> value) lie in the same region."""
    k1, k2 = dict(k1), dict(k2)
    if k1.keys() != k2.keys():
        return False
    to_f = {x: Fraction(v) for x, v in k1.items()}
    to_g = {x: Fraction(v) for x, v in k2.items()}
    return _canonical(to_f) == _canonical(to_g)


@dataclass(frozen=True)
class RegionState:
    state: str
    region: Region

    def __str__(self) -> str:
        return f"({self.state}, {self.region})"


@dataclass(frozen=True)
class ModifiedRegionState:
    state: str
    region: Region
    pending: frozenset = frozenset()

    def __str__(self) -> str:
        d = ",".join(sorted(self.pending))
        return f"({self.state}, {self.region}, {{{d}}})"


class _Tau:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TAU"

    def __str__(self) -> str:
        return "tau"

    def __reduce__(self):
        return (_Tau, ())


TAU = _Tau()


@dataclass(frozen=True)
class Act:
    action: object
    updated: Optional[str] = None

    def __str__(self) -> str:
        return f"({self.action},{self.updated or '-'})"


@dataclass(frozen=True)
class Kill:
    timer: str

    def __str__(self) -> str:
        return f"kill_{self.timer}"


def label_str(label) -> str:
    return str(label)


def parse_label(text: str):
    """Inverse of ``str`` on labels: ``tau``, ``kill_x``, ``(a,x)``, ``(a,-)`` or a bare action."""
    text = text.strip()
    if text == "tau":
        return TAU
    if text.startswith("kill_"):
        return Kill(text[5:])
    if text.startswith("(") and text.endswith(")"):
        a, _, u = text[1:-1].partition(",")
        return Act(_action(a), None if u == "-" else u)
    return _action(text)


def _action(text: str):
    return Timeout(text[3:]) if text.startswith("to:") else Input(text)


# ---------------------------------------------------------------------------
# successors


def delay_successor(rs):
    """The next region reached by letting time pass, or ``None`` if time cannot pass
    or the region never changes (no active timers)."""
    r = rs.region
    if r.at_zero() or not r.ints:
        return None
    if r.zero:
        z = tuple(sorted(r.zero))
        ints = tuple((x, n - 1 if x in r.zero else n) for x, n in r.ints)
        new = Region(ints, frozenset(), r.classes + (z,))
    else:
        new = Region(r.ints, frozenset(r.classes[0]), r.classes[1:])
    return replace(rs, region=new)


def _after_step(r: Region, keep, started: Optional[tuple]) -> Region:
    keep = set(keep)
    if started is not None:
        keep.discard(started[0])
    ints = {x: n for x, n in r.ints if x in keep}
    zero = {x for x in r.zero if x in keep}
    classes = tuple(c for c in (tuple(x for x in cls if x in keep) for cls in r.classes) if c)
    if started is not None:
        ints[started[0]] = started[1]
        zero.add(started[0])
    return Region(tuple(sorted(ints.items())), frozenset(zero), classes)


def _discrete(at: AutomatonWithTimers, state: str, r: Region, a):
    t = at.delta.get((state, a))
    if t is None:
        at.check_state(state)
        at.check_action(a)
        raise UndefinedTransition(state, a)
    q2, u = t
    if isinstance(a, Timeout) and a.timer not in r.at_zero():
        raise TimeoutNotRipe(a.timer, "nonzero")
    r2 = _after_step(r, at.active[q2], (u.timer, u.value) if u else None)
    at_zero = set(r.at_zero())
    dead = discard_set(at.active[state], at.active[q2], a, u) & at_zero
    return q2, u, r2, frozenset(dead)


def discrete_successor(at: AutomatonWithTimers, s, a):
    """Fire ``a`` from a region state.

    For a :class:`ModifiedRegionState` the result carries the set of
    timers discarded at value zero and the label is ``Act(a, updated)``;
    for a plain :class:`RegionState` the label is the action itself.
    """
    if isinstance(s, ModifiedRegionState):
        if s.pending:
            raise PendingDiscards(f"pending discards {sorted(s.pending)} must be killed first")
        q2, u, r2, dead = _discrete(at, s.state, s.region, a)
        return ModifiedRegionState(q2, r2, dead), Act(a, u.timer if u else None)
    q2, u, r2, _ = _discrete(at, s.state, s.region, a)
    return RegionState(q2, r2), a


def kill_step(s: ModifiedRegionState, x: str):
    if x not in s.pending:
        raise NotPending(f"timer {x} is not pending")
    return replace(s, pending=s.pending - {x}), Kill(x)


def enabled_actions(at: AutomatonWithTimers, state: str, r: Region) -> list:
    """Inputs in declaration order, then ripe timeouts by timer name."""
    acts = [Input(i) for i in at.inputs]
    acts += [Timeout(x) for x in sorted(r.at_zero()) if (state, Timeout(x)) in at.delta]
    return acts


def successors(at: AutomatonWithTimers, s) -> list:
    """Immediate successors ``(label, state)``: kills first if pending, else tau then actions."""
    if isinstance(s, ModifiedRegionState) and s.pending:
        x = min(s.pending)
        s2, lab = kill_step(s, x)
        return [(lab, s2)]
    out = []
    nxt = delay_successor(s)
    if nxt is not None:
        out.append((TAU, nxt))
    for a in enabled_actions(at, s.state, s.region):
        s2, lab = discrete_successor(at, s, a)
        out.append((lab, s2))
    return out


def initial_region_state(at: AutomatonWithTimers, modified: bool = False):
    r = Region()
    return ModifiedRegionState(at.initial, r) if modified else RegionState(at.initial, r)


# ---------------------------------------------------------------------------
# abstraction of concrete runs


@dataclass(frozen=True)
class RegionPath:
    states: tuple                # one more than labels
    labels: tuple

    def steps(self) -> list:
        return list(zip(self.states[1:], self.labels))

    def word(self) -> tuple:
        return self.labels

    def __len__(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        out = [str(self.states[0])]
        for lab, s in zip(self.labels, self.states[1:]):
            out.append(f"  --{lab}--> {s}")
        return "\n".join(out)


def _wrap(modified: bool, q: str, r: Region, pending=frozenset()):
    return ModifiedRegionState(q, r, pending) if modified else RegionState(q, r)


def region_run_of(run: TimedRun, mode: str = "collapsed", modified: bool = False) -> RegionPath:
    """Abstract a concrete run into a path of the (modified) region automaton.

    ``collapsed`` emits one tau per positive delay; ``expanded`` emits one
    tau per region boundary crossed (a single self-loop tau when a positive
    delay stays inside one region).
    """
    if mode not in ("collapsed", "expanded"):
        raise ValueError(f"mode must be 'collapsed' or 'expanded', not {mode!r}")
    at = run.at
    C = max_constant(at)
    cur = _wrap(modified, run.initial.state, region_of(run.initial, C))
    states, labels = [cur], []

    def do_delay(k: int):
        nonlocal cur
        d = run.delays[k - 1]
        if d == 0:
            return
        target = _wrap(modified, cur.state, region_of(run.configs[2 * k - 1], C))
        if mode == "collapsed" or target == cur:
            cur = target
            states.append(cur)
            labels.append(TAU)
            return
        while cur != target:
            cur = delay_successor(cur)
            if cur is None:
                raise AssertionError("concrete delay left the region successor chain")
            states.append(cur)
            labels.append(TAU)

    for k in range(1, run.n + 1):
        do_delay(k)
        cur, lab = discrete_successor(at, cur, run.action(k))
        states.append(cur)
        labels.append(lab)
        if modified:
            while cur.pending:
                cur, lab = kill_step(cur, min(cur.pending))
                states.append(cur)
                labels.append(lab)
    do_delay(run.n + 1)
    return RegionPath(tuple(states), tuple(labels))


def region_count_bound(at: AutomatonWithTimers) -> int:
    nx = len(at.timers)
    C = max_constant(at)
    return len(at.states) * math.factorial(nx) * 2 ** nx * (C + 1) ** nx


# ---------------------------------------------------------------------------
# explicit exploration


@dataclass
class RegionGraph:
    nodes: list = field(default_factory=list)        # region states, in discovery order
    edges: list = field(default_factory=list)        # (source index, label, target index)

    def __len__(self) -> int:
        return len(self.nodes)


def explore(at: AutomatonWithTimers, modified: bool = False,
            limit: Optional[int] = None) -> RegionGraph:
    """Breadth-first enumeration of every reachable region state."""
    s0 = initial_region_state(at, modified)
    index = {s0: 0}
    g = RegionGraph([s0], [])
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for lab, s2 in successors(at, s):
            j = index.get(s2)
            if j is None:
                if limit is not None and len(g.nodes) >= limit:
                    continue
                j = index[s2] = len(g.nodes)
                g.nodes.append(s2)
                queue.append(s2)
            g.edges.append((index[s], lab, j))
    return g


# ---------------------------------------------------------------------------
# concretisation


def delay_into(c: Configuration, target: Region) -> Fraction:
    """A positive delay taking ``c`` into ``target`` (midpoint of the feasible interval)."""
    if not c.valuation:
        return Fraction(1)
    ints = dict(target.ints)
    lo, hi, exact = Fraction(0), None, None
    for x, v in c.valuation:
        n = ints[x]
        if x in target.zero:
            d = v - n
            if exact is not None and exact != d:
                raise ValueError("target region not reachable by one delay")
            exact = d
        else:
            lo = max(lo, v - n - 1)
            hi = v - n if hi is None else min(hi, v - n)
    if exact is not None:
        if not (exact > 0 and exact > lo and (hi is None or exact < hi)):
            raise ValueError("target region not reachable by one delay")
        d = exact
    else:
        if hi is None or hi <= lo:
            raise ValueError("target region not reachable by one delay")
        d = (lo + hi) / 2
    if _canonical(dict(delay(c, d).valuation)) != target:
        raise ValueError("target region not reachable by one delay")
    return d


def lift_path(at: AutomatonWithTimers, path: RegionPath, final_delay=None) -> TimedRun:
    """A concrete run whose abstraction follows ``path``.

    Consecutive taus become one delay.  Without trailing taus the final
    delay is ``final_delay`` (default 0), except for the empty path which
    gets a final delay of 1.
    """
    c = initial_configuration(at)
    word, pending = [], Fraction(0)
    for lab, s in zip(path.labels, path.states[1:]):
        if lab is TAU:
            d = delay_into(c, s.region)
            c = delay(c, d)
            pending += d
        elif isinstance(lab, Kill):
            continue
        else:
            a = lab.action if isinstance(lab, Act) else lab
            c, _ = discrete_step(at, c, a)
            word.append((pending, a))
            pending = Fraction(0)
    if pending == 0:
        if final_delay is not None:
            pending = Fraction(final_delay)
        elif not path.labels:
            pending = Fraction(1)
    return run_from_word(at, word, pending)
