"""Moving blocks in time to remove races without changing the untimed trace."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .blocks import (Block, CanonicalCycle, Fate, block_graph, cycle_positions,
                     extend_run, find_canonical_cycle, reltime_pair)
from .errors import InfeasibleMove, NoSlack, NotPadded, StepError
from .semantics import TimedRun, is_padded, rerun, untimed_trace


@dataclass(frozen=True)
class WiggleMove:
    block: Block
    epsilon: Fraction


@dataclass(frozen=True)
class UnwigglableCertificate:
    cycle: CanonicalCycle
    positions: tuple   # closed sequence of extended-run positions
    terms: tuple       # signed elapsed time between consecutive positions
    total: Fraction

    def __str__(self) -> str:
        terms = " + ".join(str(t) for t in self.terms).replace("+ -", "- ")
        return f"cycle {self.cycle}; reltime {terms} = {self.total}"


def shifted_delays(run: TimedRun, block: Block, epsilon) -> list:
    """Delay vector after moving ``block`` by ``epsilon`` (other actions stay put)."""
    eps = Fraction(epsilon)
    mine = set(block.actions)
    d = list(run.delays)
    n = run.n
    for k in block.actions:
        if k == 1 or k - 1 not in mine:
            d[k - 1] += eps
        if k == n or k + 1 not in mine:
            d[k] -= eps
    return d


def apply_wiggle(run: TimedRun, move) -> TimedRun:
    """Re-simulate ``run`` with ``move.block`` shifted by ``move.epsilon``."""
    if not is_padded(run):
        raise NotPadded("wiggling needs a padded run")
    block, eps = move.block, Fraction(move.epsilon)
    if eps == 0:
        raise InfeasibleMove("epsilon must be nonzero")
    d = shifted_delays(run, block, eps)
    bad = [j + 1 for j, v in enumerate(d) if v < 0]
    if bad:
        raise InfeasibleMove(f"delay d{bad[0]} would become {d[bad[0] - 1]}")
    if d[0] <= 0 or d[-1] <= 0:
        raise InfeasibleMove("first and last delays must stay positive")
    try:
        new = rerun(run, d)
    except StepError as e:
        raise InfeasibleMove(f"re-simulation fails: {e}") from e
    if untimed_trace(new) != untimed_trace(run):
        raise InfeasibleMove("untimed trace changed")
    if not is_padded(new):
        raise InfeasibleMove("a timer ends at zero")
    return new


def can_wiggle_block(g, b: Block) -> bool:
    return not (g.predecessors(b) and g.successors(b))


def slack_set(run: TimedRun, b: Block, direction: str) -> list:
    """Quantities that shrink when ``b`` moves in ``direction``."""
    mine = set(b.actions)
    n = run.n
    out = []
    if direction == "right":
        for k in b.actions:
            if k == n or k + 1 not in mine:
                out.append(run.delays[k])
            for x in run.discarded(k):
                out.append(run.pre(k).value(x))
    elif direction == "left":
        for k in b.actions:
            if k == 1 or k - 1 not in mine:
                out.append(run.delays[k - 1])
        if b.fate is not Fate.BOT:
            if b.discard_index is not None:
                out.append(run.pre(b.discard_index).value(b.timer))
            else:
                out.append(run.final.value(b.timer))
    else:
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    return out


def choose_epsilon(run: TimedRun, b: Block, direction: str) -> Fraction:
    s = min(slack_set(run, b, direction))
    if s <= 0:
        raise NoSlack(f"B{b.index} cannot move {direction}")
    return s / 2 if direction == "right" else -s / 2


def certificate(run: TimedRun, cycle: CanonicalCycle) -> UnwigglableCertificate:
    ext = extend_run(run)
    pos = cycle_positions(ext, cycle)
    terms = tuple(reltime_pair(ext, a, c) for a, c in zip(pos, pos[1:]))
    return UnwigglableCertificate(cycle, tuple(pos), terms, sum(terms, Fraction(0)))


def wiggle_run(run: TimedRun):
    """A race-free run with the same untimed trace, or a certificate that none exists.

    Blocks without successors are moved right one at a time; each move
    isolates the moved block, so the number of race edges strictly drops.
    """
    if not is_padded(run):
        raise NotPadded("wiggling needs a padded run")
    g = block_graph(run)
    if not g.is_acyclic():
        return certificate(run, find_canonical_cycle(g, run))
    cur = run
    while g.edges:
        racing = {e.source.index for e in g.edges} | {e.target.index for e in g.edges}
        sinks = [b for b in g.blocks if b.index in racing and not g.successors(b)]
        b = max(sinks, key=lambda blk: blk.first)
        nxt = apply_wiggle(cur, WiggleMove(b, choose_epsilon(cur, b, "right")))
        g2 = block_graph(nxt)
        if len(g2.edges) >= len(g.edges):
            raise AssertionError("wiggling did not remove any race")
        cur, g = nxt, g2
    return cur
