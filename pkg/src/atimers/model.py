"""Automata with timers: structure, validation and per-transition timer effects."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .errors import UndefinedTransition, UnknownName, UsageError

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Input:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Timeout:
    timer: str

    def __str__(self) -> str:
        return f"to:{self.timer}"


Action = Union[Input, Timeout]


@dataclass(frozen=True)
class Start:
    timer: str
    value: int

    def __str__(self) -> str:
        return f"({self.timer},{self.value})"


# ``None`` stands for "no update".
Update = Optional[Start]


def action_key(a: Action) -> tuple:
    """Total order on actions: inputs by name, then timeouts by timer name."""
    if isinstance(a, Input):
        return (0, a.name)
    return (1, a.timer)


def update_str(u: Update) -> str:
    return "none" if u is None else f"start {u.timer} {u.value}"


def discard_set(active_src: frozenset, active_dst: frozenset, action: Action,
                update: Update) -> frozenset:
    """Timers stopped or restarted by a transition, excluding its own timeout."""
    own = action.timer if isinstance(action, Timeout) else None
    restarted = update.timer if update is not None else None
    return frozenset(
        x for x in active_src
        if x != own and (x not in active_dst or x == restarted)
    )


class AutomatonWithTimers:
    """An automaton with timers.

    ``active`` maps every state to its set of running timers and ``delta``
    maps ``(state, action)`` pairs to ``(target, update)``.  Construction
    only checks that every referenced name is declared; the behavioural
    constraints are checked by :func:`validate_automaton`.
    """

    __slots__ = ("timers", "inputs", "states", "initial", "active", "delta",
                 "_timer_set", "_input_set", "_state_set")

    def __init__(self, timers: Iterable[str], inputs: Iterable[str],
                 states: Iterable[str], initial: str,
                 active: Mapping[str, Iterable[str]],
                 delta: Mapping[tuple, tuple]):
        timers, inputs, states = tuple(timers), tuple(inputs), tuple(states)
        for kind, names in (("timer", timers), ("input", inputs), ("state", states)):
            seen = set()
            for n in names:
                if not isinstance(n, str) or not IDENTIFIER.match(n):
                    raise UsageError(f"invalid {kind} name {n!r}")
                if n in seen:
                    raise UsageError(f"duplicate {kind} {n!r}")
                seen.add(n)
        clash = set(timers) & set(inputs)
        if clash:
            raise UsageError(f"names used both as timer and input: {sorted(clash)}")
        ts, ins, qs = frozenset(timers), frozenset(inputs), frozenset(states)
        if initial not in qs:
            raise UnknownName("state", initial)
        act = {}
        for q in states:
            s = frozenset(active.get(q, ()))
            for x in s:
                if x not in ts:
                    raise UnknownName("timer", x)
            act[q] = s
        for q in active:
            if q not in qs:
                raise UnknownName("state", q)
        dl = {}
        for (q, a), (q2, u) in delta.items():
            for s in (q, q2):
                if s not in qs:
                    raise UnknownName("state", s)
            _check_action(a, ts, ins)
            if u is not None:
                if not isinstance(u, Start):
                    raise UsageError(f"invalid update {u!r}")
                if u.timer not in ts:
                    raise UnknownName("timer", u.timer)
            dl[(q, a)] = (q2, u)
        self.timers, self.inputs, self.states = timers, inputs, states
        self.initial = initial
        self.active = MappingProxyType(act)
        self.delta = MappingProxyType(dl)
        self._timer_set, self._input_set, self._state_set = ts, ins, qs

    def __eq__(self, other) -> bool:
        if not isinstance(other, AutomatonWithTimers):
            return NotImplemented
        return (self.timers == other.timers and self.inputs == other.inputs
                and self.states == other.states and self.initial == other.initial
                and dict(self.active) == dict(other.active)
                and dict(self.delta) == dict(other.delta))

    def __hash__(self):
        return hash((self.timers, self.inputs, self.states, self.initial))

    def __repr__(self) -> str:
        return (f"AutomatonWithTimers(|Q|={len(self.states)}, X={list(self.timers)}, "
                f"I={list(self.inputs)})")

    def has_state(self, q: str) -> bool:
        return q in self._state_set

    def check_state(self, q: str) -> None:
        if q not in self._state_set:
            raise UnknownName("state", q)

    def check_action(self, a: Action) -> None:
        _check_action(a, self._timer_set, self._input_set)

    def input_actions(self) -> tuple:
        return tuple(Input(i) for i in self.inputs)

    def actions_from(self, q: str) -> list:
        """Actions for which delta is defined at ``q``, in canonical order."""
        acts = [a for (s, a) in self.delta if s == q]
        return sorted(acts, key=action_key)

    def replace(self, **kw) -> "AutomatonWithTimers":
        args = dict(timers=self.timers, inputs=self.inputs, states=self.states,
                    initial=self.initial, active=self.active, delta=self.delta)
        args.update(kw)
        return AutomatonWithTimers(**args)


def _check_action(a, timers: frozenset, inputs: frozenset) -> None:
    if isinstance(a, Input):
        if a.name not in inputs:
            raise UnknownName("input", a.name)
    elif isinstance(a, Timeout):
        if a.timer not in timers:
            raise UnknownName("timer", a.timer)
    else:
        raise UsageError(f"not an action: {a!r}")


@dataclass(frozen=True)
class Violation:
    rule: str
    locus: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{v.rule} at {v.locus}: {v.message}" for v in self.violations)


def _fmt(names) -> str:
    return "{" + ", ".join(sorted(names)) + "}"


def validate_automaton(at: AutomatonWithTimers) -> ValidationReport:
    """Check the five structural constraints and input totality.

    Every violation is reported, each with the state or transition it
    concerns.  Rule identifiers are stable strings usable in scripts.
    """
    out = []
    q0 = at.initial
    if at.active[q0]:
        out.append(Violation("initial-timers", q0,
                             f"initial state has active timers {_fmt(at.active[q0])}"))
    for q in at.states:
        for i in at.inputs:
            if (q, Input(i)) not in at.delta:
                out.append(Violation("input-total", f"({q}, {i})",
                                     "no transition on input"))
        for x in sorted(at.active[q]):
            if (q, Timeout(x)) not in at.delta:
                out.append(Violation("timeout-missing", f"({q}, to:{x})",
                                     f"timer {x} is active but its timeout is undefined"))
    for (q, a), (q2, u) in at.delta.items():
        loc = f"({q}, {a})"
        src, dst = at.active[q], at.active[q2]
        if isinstance(a, Timeout) and a.timer not in src:
            out.append(Violation("timeout-inactive", loc,
                                 f"timer {a.timer} is not active in {q}"))
        if u is None:
            if not dst <= src:
                out.append(Violation("stop-subset", loc,
                                     f"no update but {_fmt(dst - src)} become active in {q2}"))
            if isinstance(a, Timeout) and a.timer in dst:
                out.append(Violation("timeout-still-active", loc,
                                     f"timer {a.timer} stays active after its timeout "
                                     "without restart"))
        else:
            if u.value < 1:
                out.append(Violation("start-value", loc,
                                     f"start value {u.value} is not positive"))
            if isinstance(a, Timeout) and u.timer != a.timer:
                out.append(Violation("timeout-restart", loc,
                                     f"timeout of {a.timer} restarts {u.timer}"))
            if u.timer not in dst:
                out.append(Violation("start-inactive", loc,
                                     f"started timer {u.timer} is not active in {q2}"))
            extra = dst - {u.timer} - src
            if extra:
                out.append(Violation("start-subset", loc,
                                     f"timers {_fmt(extra)} become active without start"))
    return ValidationReport(tuple(out))


def transition(at: AutomatonWithTimers, q: str, a: Action):
    """Return ``(target, update)`` or ``None`` when undefined."""
    at.check_state(q)
    at.check_action(a)
    return at.delta.get((q, a))


def discarded_timers(at: AutomatonWithTimers, q: str, a: Action) -> frozenset:
    t = transition(at, q, a)
    if t is None:
        raise UndefinedTransition(q, a)
    q2, u = t
    return discard_set(at.active[q], at.active[q2], a, u)


def max_constant(at: AutomatonWithTimers) -> int:
    """Largest value any transition starts a timer with (0 if none)."""
    return max((u.value for (_, u) in at.delta.values() if u is not None), default=0)
