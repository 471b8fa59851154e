"""Exact timed semantics: configurations, delay and discrete steps, timed runs.

All timer values and delays are :class:`fractions.Fraction`.  Timers count
down; a timer may time out only when its value is exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (DelayTooLarge, NegativeDelay, StepError, TimeoutNotRipe,
                     UndefinedTransition)
from .model import Action, AutomatonWithTimers, Timeout, Update, discard_set


def as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class Configuration:
    """A state plus the values of its active timers (sorted by timer name)."""

    state: str
    valuation: tuple = ()

    @staticmethod
    def make(state: str, values: Mapping[str, object] | None = None) -> "Configuration":
        vals = values or {}
        return Configuration(state, tuple(sorted((x, as_fraction(v)) for x, v in vals.items())))

    @property
    def values(self) -> dict:
        return dict(self.valuation)

    def value(self, x: str) -> Fraction:
        for y, v in self.valuation:
            if y == x:
                return v
        raise KeyError(x)

    def timers(self) -> tuple:
        return tuple(x for x, _ in self.valuation)

    def zero_timers(self) -> tuple:
        return tuple(x for x, v in self.valuation if v == 0)

    def __str__(self) -> str:
        inner = ", ".join(f"{x}={_num(v)}" for x, v in self.valuation)
        return f"({self.state}, {{{inner}}})"


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def initial_configuration(at: AutomatonWithTimers) -> Configuration:
    return Configuration(at.initial, ())


def delay(c: Configuration, d) -> Configuration:
    d = as_fraction(d)
    if d < 0:
        raise NegativeDelay(d)
    if d == 0:
        return c
    for x, v in c.valuation:
        if v < d:
            raise DelayTooLarge(x, v, d)
    return Configuration(c.state, tuple((x, v - d) for x, v in c.valuation))


def discrete_step(at: AutomatonWithTimers, c: Configuration, a: Action):
    """Fire ``a`` from ``c``; return ``(successor, update)``."""
    t = at.delta.get((c.state, a))
    if t is None:
        at.check_state(c.state)
        at.check_action(a)
        raise UndefinedTransition(c.state, a)
    q2, u = t
    vals = dict(c.valuation)
    if isinstance(a, Timeout):
        v = vals.get(a.timer)
        if v != 0:
            raise TimeoutNotRipe(a.timer, v)
    new = {}
    for x in at.active[q2]:
        if u is not None and u.timer == x:
            new[x] = Fraction(u.value)
        else:
            new[x] = vals[x]
    return Configuration(q2, tuple(sorted(new.items()))), u


@dataclass(frozen=True)
class TimedRun:
    """A finite timed run ``d1 a1 d2 a2 ... dn an d(n+1)``.

    ``configs`` caches the configuration at every point: the initial one,
    then alternately after each delay and after each action, ending with
    the configuration after the final delay (length ``2n + 2``).  Action
    indices used by accessors are 1-based.
    """

    at: AutomatonWithTimers = field(compare=False, repr=False)
    delays: tuple
    actions: tuple
    updates: tuple
    configs: tuple

    @property
    def n(self) -> int:
        return len(self.actions)

    @property
    def initial(self) -> Configuration:
        return self.configs[0]

    @property
    def final(self) -> Configuration:
        return self.configs[-1]

    @property
    def final_delay(self) -> Fraction:
        return self.delays[-1]

    def pre(self, k: int) -> Configuration:
        """Configuration right before action ``k``."""
        return self.configs[2 * k - 1]

    def post(self, k: int) -> Configuration:
        """Configuration right after action ``k``."""
        return self.configs[2 * k]

    def action(self, k: int) -> Action:
        return self.actions[k - 1]

    def update(self, k: int) -> Update:
        return self.updates[k - 1]

    def delay_before(self, k: int) -> Fraction:
        return self.delays[k - 1]

    def discarded(self, k: int) -> frozenset:
        at = self.at
        src, dst = self.pre(k).state, self.post(k).state
        return discard_set(at.active[src], at.active[dst], self.action(k), self.update(k))

    def word(self) -> list:
        return list(zip(self.delays[:-1], self.actions))

    def elapsed(self, k: int, k2: int) -> Fraction:
        """Total delay between action ``k`` and a later action ``k2``."""
        return sum(self.delays[k:k2], Fraction(0))


def run_from_word(at: AutomatonWithTimers, word: Iterable, final_delay=0) -> TimedRun:
    """Execute ``word`` (pairs of delay and action) from the initial configuration.

    The first infeasible step raises its error with ``index`` set.
    """
    c = initial_configuration(at)
    configs = [c]
    delays, actions, updates = [], [], []
    k = 0
    for k, (d, a) in enumerate(word, start=1):
        d = as_fraction(d)
        try:
            c = delay(c, d)
            configs.append(c)
            c, u = discrete_step(at, c, a)
        except StepError as e:
            raise e.at_index(k)
        configs.append(c)
        delays.append(d)
        actions.append(a)
        updates.append(u)
    fd = as_fraction(final_delay)
    try:
        c = delay(c, fd)
    except StepError as e:
        raise e.at_index(k + 1)
    configs.append(c)
    delays.append(fd)
    return TimedRun(at, tuple(delays), tuple(actions), tuple(updates), tuple(configs))


def rerun(run: TimedRun, delays: Sequence) -> TimedRun:
    """Replay the actions of ``run`` with a new delay vector."""
    delays = list(delays)
    return run_from_word(run.at, zip(delays[:-1], run.actions), delays[-1])


def untimed_trace(run: TimedRun) -> tuple:
    """Alternating states and actions: ``(q0, a1, q1, ..., an, qn)``."""
    out = [run.initial.state]
    for k in range(1, run.n + 1):
        out.append(run.action(k))
        out.append(run.post(k).state)
    return tuple(out)


def trace_str(trace: Sequence) -> str:
    return " ".join(str(x) for x in trace)


def is_padded(run: TimedRun) -> bool:
    return (run.delays[0] > 0 and run.delays[-1] > 0
            and all(v != 0 for _, v in run.final.valuation))
