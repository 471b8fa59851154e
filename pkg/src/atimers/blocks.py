"""Blocks, races and block graphs of padded timed runs.

A block is a maximal chain of actions, started by an input, in which each
action (re)starts a timer whose timeout is the next action.  Two blocks
race when actions of both happen at the same instant, or when the timer
left running by one block reaches zero exactly when another action
discards it.  Blocks and positions are 1-based throughout.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Optional, Sequence

from .errors import NotPadded
from .model import Input, Timeout
from .semantics import TimedRun, is_padded


class Fate(enum.Enum):
    BOT = "bot"      # last action does not restart the timer
    MOON = "moon"    # restarted, then discarded while at zero
    CROSS = "cross"  # restarted, then discarded at a positive value or never

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Block:
    index: int
    actions: tuple
    timer: Optional[str]
    fate: Fate
    discard_index: Optional[int] = None

    @property
    def first(self) -> int:
        return self.actions[0]

    @property
    def last(self) -> int:
        return self.actions[-1]

    def label(self) -> str:
        return f"B{self.index}:{self.timer or '-'}:{self.fate}"

    def __str__(self) -> str:
        acts = " ".join(map(str, self.actions))
        return f"B{self.index}=({acts}; {self.timer or '-'}; {self.fate})"


@dataclass(frozen=True)
class ZeroDelay:
    first: int
    second: int

    kind = "zero"

    def __str__(self) -> str:
        return f"zero({self.first},{self.second})"


@dataclass(frozen=True)
class MoonDiscard:
    discarder: int
    restarter: int

    kind = "moon"

    def __str__(self) -> str:
        return f"moon({self.discarder},{self.restarter})"


@dataclass(frozen=True)
class RaceEdge:
    source: Block
    target: Block
    witness: object

    def __str__(self) -> str:
        return f"B{self.source.index} -> B{self.target.index} [{self.witness}]"


def _require_padded(run: TimedRun) -> None:
    if not is_padded(run):
        raise NotPadded("block analysis needs a padded run")


def triggers(run: TimedRun, k: int, k2: int) -> bool:
    if not 1 <= k < k2 <= run.n:
        return False
    u = run.update(k)
    if u is None or run.action(k2) != Timeout(u.timer):
        return False
    x = u.timer
    for m in range(k + 1, k2):
        if run.action(m) == Timeout(x) or x in run.discarded(m):
            return False
    return True


def decompose_blocks(run: TimedRun) -> tuple:
    """Partition the actions of a padded run into blocks, ordered by first action."""
    _require_padded(run)
    return _decompose(run)


def _decompose(run: TimedRun) -> tuple:
    owner = {}          # running timer -> list of action indices of its chain
    chains = []
    for k in range(1, run.n + 1):
        a = run.action(k)
        if isinstance(a, Input):
            chain = [k]
            chains.append(chain)
        else:
            chain = owner[a.timer]
            chain.append(k)
            del owner[a.timer]
        for x in run.discarded(k):
            owner.pop(x, None)
        u = run.update(k)
        if u is not None:
            owner[u.timer] = chain
    blocks = []
    for idx, chain in enumerate(chains, start=1):
        last = chain[-1]
        u = run.update(last)
        timer = run.update(chain[0]).timer if run.update(chain[0]) else None
        if isinstance(run.action(last), Timeout):
            timer = run.action(last).timer
        if u is None:
            blocks.append(Block(idx, tuple(chain), timer, Fate.BOT))
            continue
        x = u.timer
        fate, where = Fate.CROSS, None
        for m in range(last + 1, run.n + 1):
            if x in run.discarded(m):
                where = m
                fate = Fate.MOON if run.pre(m).value(x) == 0 else Fate.CROSS
                break
        blocks.append(Block(idx, tuple(chain), x, fate, where))
    return tuple(blocks)


def block_of_action(blocks: Sequence[Block]) -> dict:
    return {k: b for b in blocks for k in b.actions}


def races(run: TimedRun, blocks: Sequence[Block] | None = None) -> list:
    """All race edges, one per ordered pair of blocks, sorted by block indices.

    The witness is the earliest zero-delay pair if there is one, otherwise
    the discard that hit a timer at zero.
    """
    _require_padded(run)
    if blocks is None:
        blocks = _decompose(run)
    owner = block_of_action(blocks)
    edges = {}
    for k in range(1, run.n + 1):
        gap = Fraction(0)
        for k2 in range(k + 1, run.n + 1):
            gap += run.delay_before(k2)
            if gap > 0:
                break
            b, b2 = owner[k], owner[k2]
            if b is b2:
                raise AssertionError(f"actions {k} and {k2} of one block at the same instant")
            edges.setdefault((b.index, b2.index), RaceEdge(b, b2, ZeroDelay(k, k2)))
    for b in blocks:
        if b.fate is Fate.MOON:
            src = owner[b.discard_index]
            if src is b:
                raise AssertionError("block discards its own timer")
            edges.setdefault((src.index, b.index),
                             RaceEdge(src, b, MoonDiscard(b.discard_index, b.last)))
    return [edges[key] for key in sorted(edges)]


def witness_holds(run: TimedRun, edge: RaceEdge) -> bool:
    """Re-check a race witness directly against the run's delays and valuations."""
    w = edge.witness
    if isinstance(w, ZeroDelay):
        return (w.first < w.second and run.elapsed(w.first, w.second) == 0
                and w.first in edge.source.actions and w.second in edge.target.actions)
    u = run.update(w.restarter)
    if u is None or w.restarter != edge.target.last or w.discarder not in edge.source.actions:
        return False
    x = u.timer
    for m in range(w.restarter + 1, w.discarder):
        if x in run.discarded(m) or run.action(m) == Timeout(x):
            return False
    return x in run.discarded(w.discarder) and run.pre(w.discarder).value(x) == 0


@dataclass(frozen=True)
class BlockGraph:
    blocks: tuple
    edges: tuple

    def successors(self, b: Block) -> list:
        return [e.target for e in self.edges if e.source.index == b.index]

    def predecessors(self, b: Block) -> list:
        return [e.source for e in self.edges if e.target.index == b.index]

    def edge(self, i: int, j: int) -> Optional[RaceEdge]:
        for e in self.edges:
            if e.source.index == i and e.target.index == j:
                return e
        return None

    def is_acyclic(self) -> bool:
        ts = TopologicalSorter({b.index: set() for b in self.blocks})
        for e in self.edges:
            ts.add(e.target.index, e.source.index)
        try:
            ts.prepare()
        except CycleError:
            return False
        return True

    def adjacency(self) -> dict:
        adj = {b.index: [] for b in self.blocks}
        for e in self.edges:
            adj[e.source.index].append(e.target.index)
        return adj


def block_graph(run: TimedRun) -> BlockGraph:
    _require_padded(run)
    blocks = _decompose(run)
    return BlockGraph(blocks, tuple(races(run, blocks)))


# ---------------------------------------------------------------------------
# extended runs and relative elapsed time


@dataclass(frozen=True)
class ExtAction:
    kind: str                 # "action", "moon" or "cross"
    index: int                # action index in the base run (the discarder, for markers)
    timer: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "action":
            return f"a{self.index}"
        sym = "moon" if self.kind == "moon" else "cross"
        return f"{sym}({self.timer})"


@dataclass(frozen=True)
class ExtendedRun:
    base: TimedRun
    entries: tuple            # ExtAction per position (1-based via helpers)
    delays: tuple             # delay before each entry, plus the final delay

    def position_of(self, k: int) -> int:
        for p, e in enumerate(self.entries, start=1):
            if e.kind == "action" and e.index == k:
                return p
        raise KeyError(k)

    def marker_position(self, k: int, x: str) -> int:
        for p, e in enumerate(self.entries, start=1):
            if e.kind != "action" and e.index == k and e.timer == x:
                return p
        raise KeyError((k, x))

    def __len__(self) -> int:
        return len(self.entries)


def extend_run(run: TimedRun) -> ExtendedRun:
    """Insert a zero-delay marker after each discard (timers in name order)."""
    _require_padded(run)
    entries, delays = [], []
    for k in range(1, run.n + 1):
        entries.append(ExtAction("action", k))
        delays.append(run.delay_before(k))
        for x in sorted(run.discarded(k)):
            kind = "moon" if run.pre(k).value(x) == 0 else "cross"
            entries.append(ExtAction(kind, k, x))
            delays.append(Fraction(0))
    delays.append(run.final_delay)
    return ExtendedRun(run, tuple(entries), tuple(delays))


def reltime_pair(ext: ExtendedRun, p: int, p2: int) -> Fraction:
    if p == p2:
        return Fraction(0)
    lo, hi = min(p, p2), max(p, p2)
    gap = sum(ext.delays[lo:hi], Fraction(0))
    return gap if p < p2 else -gap


def reltime(ext: ExtendedRun, positions: Sequence[int]) -> Fraction:
    """Signed elapsed time along a sequence of positions of an extended run."""
    return sum((reltime_pair(ext, a, b) for a, b in zip(positions, positions[1:])),
               Fraction(0))


# ---------------------------------------------------------------------------
# canonical cycles


@dataclass(frozen=True)
class CanonicalCycle:
    blocks: tuple             # B0 .. B(k-1); the edge B(l) -> B(l+1 mod k) is in the graph
    edges: tuple
    violations: tuple = ()    # clause failures; empty for a well-formed cycle

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return " -> ".join(f"B{b.index}" for b in self.blocks) + f" -> B{self.blocks[0].index}"


def _shortest_cycle(adj: dict) -> Optional[list]:
    best = None
    for s in sorted(adj):
        parent = {s: None}
        queue = deque([s])
        found = None
        while queue and found is None:
            v = queue.popleft()
            for w in adj[v]:
                if w == s:
                    found = v
                    break
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        if found is None:
            continue
        path = [found]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        if best is None or len(path) < len(best):
            best = path
    return best


def _simple_cycles(adj: dict, limit: int):
    """Simple cycles (as vertex lists starting at their smallest vertex), short first."""
    verts = sorted(adj)
    for length in range(2, min(limit, len(verts)) + 1):
        for start in verts:
            stack = [(start, [start])]
            while stack:
                v, path = stack.pop()
                for w in sorted(adj[v], reverse=True):
                    if w == start and len(path) == length:
                        yield list(path)
                    elif w > start and w not in path and len(path) < length:
                        stack.append((w, path + [w]))


def _instant_group(run: TimedRun, k: int) -> range:
    """Indices of the actions occurring at the same instant as action ``k``."""
    lo = k
    while lo > 1 and run.delay_before(lo) == 0:
        lo -= 1
    hi = k
    while hi < run.n and run.delay_before(hi + 1) == 0:
        hi += 1
    return range(lo, hi + 1)


def _race_event(run: TimedRun, edge: RaceEdge):
    w = edge.witness
    if isinstance(w, ZeroDelay):
        g = _instant_group(run, w.first)
        return ("zero", g.start)
    return ("moon", w.discarder, edge.target.index)


def cycle_violations(run: TimedRun, g: BlockGraph, cycle: Sequence[Block]) -> list:
    """Check the three shape properties of a well-formed race cycle.

    1. every block takes part in two distinct races of the cycle;
    2. every race of the cycle involves exactly two of the cycle's blocks;
    3. every block has at least two actions, or one action and fate moon.
    """
    out = []
    k = len(cycle)
    owner = block_of_action(g.blocks)
    members = {b.index for b in cycle}
    edges = [g.edge(cycle[j].index, cycle[(j + 1) % k].index) for j in range(k)]
    if any(e is None for e in edges):
        return ["not a cycle of the graph"]
    events = [_race_event(run, e) for e in edges]
    for j, b in enumerate(cycle):
        if events[j - 1] == events[j]:
            out.append(f"B{b.index} takes part twice in one race")
    for e, ev in zip(edges, events):
        if ev[0] == "zero":
            grp = _instant_group(run, e.witness.first)
            inside = {owner[m].index for m in grp} & members
            if len(inside) != 2:
                out.append(f"race of B{e.source.index}->B{e.target.index} involves "
                           f"{len(inside)} cycle blocks")
    for b in cycle:
        if len(b.actions) < 2 and b.fate is not Fate.MOON:
            out.append(f"B{b.index} has a single action and fate {b.fate}")
    return out


def find_canonical_cycle(g: BlockGraph, run: TimedRun) -> Optional[CanonicalCycle]:
    """A shortest cycle of ``g`` that satisfies the shape properties, if any.

    Returns ``None`` for acyclic graphs.  If no cycle up to a small length
    satisfies all shape properties, the shortest cycle is returned with its
    violations recorded.
    """
    adj = g.adjacency()
    shortest = _shortest_cycle(adj)
    if shortest is None:
        return None
    by_index = {b.index: b for b in g.blocks}

    def build(vertices):
        j = vertices.index(min(vertices))
        vertices = vertices[j:] + vertices[:j]
        blocks = tuple(by_index[v] for v in vertices)
        edges = tuple(g.edge(vertices[t], vertices[(t + 1) % len(vertices)])
                      for t in range(len(vertices)))
        return CanonicalCycle(blocks, edges, tuple(cycle_violations(run, g, blocks)))

    first = build(shortest)
    if first.ok:
        return first
    for cyc in itertools.islice(_simple_cycles(adj, len(shortest) + 4), 5000):
        cand = build(cyc)
        if cand.ok:
            return cand
    return first


def cycle_positions(ext: ExtendedRun, cycle: CanonicalCycle) -> list:
    """The closed sequence of extended-run positions visited by the cycle's races.

    For each edge the position of the source-side action is followed by
    the target-side one (the marker of the target's timer for a discard
    at zero); the sequence ends where it started.
    """
    pos = []
    for e in cycle.edges:
        w = e.witness
        if isinstance(w, ZeroDelay):
            pos += [ext.position_of(w.first), ext.position_of(w.second)]
        else:
            x = ext.base.update(w.restarter).timer
            pos += [ext.position_of(w.discarder), ext.marker_position(w.discarder, x)]
    return pos + pos[:1]
