"""Race avoidance: a static sufficient check, word-level race analysis and a
bounded search for padded runs whose block graph has a cycle.

Words are label sequences of the modified region automaton: ``TAU`` for a
positive delay, ``Act(action, updated)`` for a discrete step and
``Kill(x)`` right after a step that discarded ``x`` at value zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Iterator, Optional, Union

from .blocks import Fate, block_graph
from .errors import MalformedWord
from .model import AutomatonWithTimers, Input, Timeout
from .regions import (TAU, Act, Kill, ModifiedRegionState, Region, RegionPath,
                      delay_successor, discrete_successor, enabled_actions, kill_step,
                      lift_path, region_run_of)
from .semantics import TimedRun, is_padded
from .wiggle import UnwigglableCertificate, wiggle_run


def static_single_timer_check(at: AutomatonWithTimers) -> bool:
    return all(len(at.active[q]) <= 1 for q in at.states)


# ---------------------------------------------------------------------------
# decoding words into blocks and races


@dataclass(frozen=True)
class WordBlock:
    index: int
    positions: tuple          # positions of the block's Act symbols (1-based)
    timer: Optional[str]
    fate: Fate
    kill_position: Optional[int] = None


@dataclass(frozen=True)
class DecodedWord:
    labels: tuple
    blocks: tuple
    block_at: dict            # Act/Kill position -> block index; a kill maps to the killed block
    discarder: dict           # Kill position -> position of the Act it follows

    def races(self) -> list:
        """Race pairs ``(p, q, source block, target block)`` in position order."""
        out = []
        acts = [p for p, lab in enumerate(self.labels, 1) if isinstance(lab, Act)]
        for i, p in enumerate(acts):
            for q in acts[i + 1:]:
                if any(self.labels[m - 1] is TAU for m in range(p + 1, q)):
                    break
                out.append((p, q, self.block_at[p], self.block_at[q]))
        for r, p in self.discarder.items():
            out.append((p, r, self.block_at[p], self.block_at[r]))
        return sorted(out)

    def edges(self) -> set:
        return {(src, tgt) for _, _, src, tgt in self.races()}


def decode_word(word) -> DecodedWord:
    labels = tuple(word)
    owner = {}
    snapshot = None
    act_pos = None
    killed = set()
    positions, timers, fates, kills = [], [], [], []
    last_update = []
    block_at, discarder = {}, {}
    for p, lab in enumerate(labels, start=1):
        if lab is TAU:
            snapshot, act_pos = None, None
            continue
        if isinstance(lab, Kill):
            x = lab.timer
            if act_pos is None:
                raise MalformedWord(f"position {p}: {lab} does not follow an action")
            if x in killed or (killed and x < max(killed)):
                raise MalformedWord(f"position {p}: kills must be distinct and in name order")
            b = snapshot.get(x)
            if b is None:
                raise MalformedWord(f"position {p}: {x} was not running")
            if b == block_at[act_pos]:
                raise MalformedWord(f"position {p}: a block cannot discard its own timer")
            killed.add(x)
            if owner.get(x) == b:
                del owner[x]
            fates[b] = Fate.MOON
            kills[b] = p
            block_at[p] = b
            discarder[p] = act_pos
            continue
        if not isinstance(lab, Act):
            raise MalformedWord(f"position {p}: unexpected symbol {lab!r}")
        snapshot, act_pos, killed = dict(owner), p, set()
        a, y = lab.action, lab.updated
        if isinstance(a, Input):
            b = len(positions)
            positions.append([p])
            timers.append(y)
            fates.append(None)
            kills.append(None)
            last_update.append(y)
        elif isinstance(a, Timeout):
            b = owner.pop(a.timer, None)
            if b is None:
                raise MalformedWord(f"position {p}: {a} without a running timer")
            if y not in (None, a.timer):
                raise MalformedWord(f"position {p}: a timeout may only restart its own timer")
            positions[b].append(p)
            last_update[b] = y
        else:
            raise MalformedWord(f"position {p}: unexpected action {a!r}")
        block_at[p] = b
        if y is not None:
            owner[y] = b
    blocks = []
    for b, pos in enumerate(positions):
        fate = fates[b]
        if fate is None:
            fate = Fate.BOT if last_update[b] is None else Fate.CROSS
        blocks.append(WordBlock(b + 1, tuple(pos), timers[b], fate, kills[b]))
    return DecodedWord(labels, tuple(blocks),
                       {p: b + 1 for p, b in block_at.items()}, discarder)


def _has_cycle(nodes, edges) -> bool:
    ts = TopologicalSorter({v: set() for v in nodes})
    for s, t in edges:
        ts.add(t, s)
    try:
        ts.prepare()
    except CycleError:
        return True
    return False


def block_graph_cyclic_word(word) -> bool:
    """Whether the block graph encoded by ``word`` has a cycle."""
    dec = decode_word(word)
    for p, q, s, t in dec.races():
        if s == t:
            raise MalformedWord(f"positions {p} and {q}: one block twice at one instant")
    return _has_cycle([b.index for b in dec.blocks], dec.edges())


def phi_matches(word) -> bool:
    """Pattern matcher for padded words containing a closed chain of races.

    Looks for race pairs ``(p1, q1), ..., (pm, qm)`` with
    ``p1 < q1 <= p2 < q2 <= ...`` (after sorting), no tau strictly inside
    any pair, and every ``qk`` in the same block as some ``pl``.  A pair is
    either two actions of different blocks or a discarding action followed
    by the kill symbol it produced.
    """
    labels = tuple(word)
    dec = decode_word(labels)
    if not labels or labels[0] is not TAU or labels[-1] is not TAU:
        return False
    pairs = dec.races()
    for p, q, s, t in pairs:
        if s == t:
            raise MalformedWord(f"positions {p} and {q}: one block twice at one instant")

    def compatible(e, f) -> bool:
        return e[1] <= f[0] or f[1] <= e[0]

    n = len(pairs)

    def extend(start: int, chain: list) -> bool:
        last = pairs[chain[-1]]
        if last[3] == pairs[start][2] and len(chain) > 1:
            return True
        for j in range(start + 1, n):
            e = pairs[j]
            if j in chain or e[2] != last[3]:
                continue
            if all(compatible(e, pairs[i]) for i in chain):
                chain.append(j)
                if extend(start, chain):
                    return True
                chain.pop()
        return False

    return any(extend(i, [i]) for i in range(n))


# ---------------------------------------------------------------------------
# word enumeration


def _drain(s: ModifiedRegionState):
    labels, states = [], []
    while s.pending:
        s, lab = kill_step(s, min(s.pending))
        labels.append(lab)
        states.append(s)
    return s, labels, states


def _tau_targets(s: ModifiedRegionState) -> list:
    out = [s] if s.region.is_open() else []
    nxt = delay_successor(s)
    while nxt is not None:
        out.append(nxt)
        nxt = delay_successor(nxt)
    return out


def _act_steps(at: AutomatonWithTimers, s: ModifiedRegionState):
    for a in enabled_actions(at, s.state, s.region):
        s2, lab = discrete_successor(at, s, a)
        s3, kl, ks = _drain(s2)
        yield a, s3, (lab, *kl), (s2, *ks)


def iter_padded_words(at: AutomatonWithTimers, max_actions: int) -> Iterator[tuple]:
    """Every padded word with at most ``max_actions`` actions, depth first.

    Words start and end with tau, never repeat tau, and end in a region
    where no timer is exactly zero.
    """
    s0 = ModifiedRegionState(at.initial, Region())

    def walk(s, word, n, after_tau):
        if after_tau and not s.region.at_zero():
            yield word
        if not after_tau:
            for t in _tau_targets(s):
                yield from walk(t, word + (TAU,), n, True)
        if n < max_actions:
            for _, s2, labs, _ in _act_steps(at, s):
                yield from walk(s2, word + labs, n + 1, False)

    yield from walk(s0, (TAU,), 0, True)


# ---------------------------------------------------------------------------
# bounded search


@dataclass(frozen=True)
class StaticSingleTimer:
    def __str__(self) -> str:
        return "every state has at most one active timer"


@dataclass(frozen=True)
class ExhaustedToBound:
    length: int
    saturated: bool = False   # the abstract state space was fully explored

    def __str__(self) -> str:
        if self.saturated:
            return f"state space exhausted after {self.length} actions"
        return f"no witness up to {self.length} actions"


@dataclass(frozen=True)
class RaceAvoiding:
    proof: Union[StaticSingleTimer, ExhaustedToBound]


@dataclass(frozen=True)
class NotRaceAvoiding:
    witness: TimedRun
    certificate: UnwigglableCertificate
    word: tuple


@dataclass(frozen=True)
class UnknownBeyondBound:
    length: int


@dataclass(frozen=True)
class _Node:
    s: ModifiedRegionState
    reach: frozenset          # (x, y): the block owning x reaches the block owning y
    flags: frozenset          # owners that reach some action of the current instant
    cyclic: bool
    after_tau: bool


_NEW = ("new",)


def _closure(nodes, rel: set) -> set:
    rel = set(rel)
    for k in nodes:
        for i in nodes:
            if (i, k) in rel:
                for j in nodes:
                    if (k, j) in rel:
                        rel.add((i, j))
    return rel


def _act_node(n: _Node, a, lab: Act, killed: frozenset, s_end: ModifiedRegionState) -> _Node:
    old = n.s.region.timers()
    ids = [("t", x) for x in old]
    b = _NEW if isinstance(a, Input) else ("t", a.timer)
    nodes = ids + ([_NEW] if b is _NEW else [])
    flags = {("t", x) for x in n.flags}
    rel = {(("t", x), ("t", y)) for x, y in n.reach}
    rel |= {(v, b) for v in flags}
    if b in flags:
        rel.add((b, b))
    rel |= {(b, ("t", x)) for x in killed}
    rel = _closure(nodes, rel)
    cyclic = n.cyclic or any((v, v) in rel for v in nodes)
    members = flags | {b}
    new_flags = {v for v in nodes if v in members or any((v, m) in rel for m in members)}
    rename = {}
    for y in s_end.region.timers():
        rename[y] = b if y == lab.updated else ("t", y)
    live = {v: y for y, v in rename.items()}
    reach = frozenset((live[u], live[v]) for u, v in rel if u in live and v in live)
    return _Node(s_end, reach, frozenset(live[v] for v in new_flags if v in live),
                 cyclic, False)


def search_unwigglable(at: AutomatonWithTimers, max_actions: int = 12,
                       use_static: bool = True):
    """Look for a padded run with at most ``max_actions`` actions whose block graph is cyclic.

    The search is breadth first over an exact finite abstraction (region
    state plus reachability among running blocks), so the first witness
    found is one with the fewest actions.  When a level adds no new
    abstract state the whole space has been covered and the verdict holds
    for runs of any length.
    """
    if max_actions < 1:
        raise ValueError("max_actions must be at least 1")
    if use_static and static_single_timer_check(at):
        return RaceAvoiding(StaticSingleTimer())
    s0 = ModifiedRegionState(at.initial, Region())
    root = _Node(s0, frozenset(), frozenset(), False, True)
    parent = {root: None}
    level = [root]
    for k in range(max_actions + 1):
        extra = []
        for n in level:
            if n.after_tau:
                continue
            for t in _tau_targets(n.s):
                m = _Node(t, n.reach, frozenset(), n.cyclic, True)
                if m not in parent:
                    parent[m] = (n, (TAU,), (t,))
                    extra.append(m)
        for n in level + extra:
            if n.cyclic and n.after_tau and not n.s.region.at_zero():
                return _witness(at, n, parent)
        if k == max_actions:
            break
        nxt = []
        for n in level + extra:
            for a, s_end, labs, states in _act_steps(at, n.s):
                killed = frozenset(lab.timer for lab in labs[1:])
                m = _act_node(n, a, labs[0], killed, s_end)
                if m not in parent:
                    parent[m] = (n, labs, states)
                    nxt.append(m)
        if not nxt:
            return RaceAvoiding(ExhaustedToBound(k, saturated=True))
        level = nxt
    return UnknownBeyondBound(max_actions)


def _witness(at: AutomatonWithTimers, n: _Node, parent: dict) -> NotRaceAvoiding:
    labels, states = [], []
    while parent[n] is not None:
        prev, labs, sts = parent[n]
        labels[:0] = labs
        states[:0] = sts
        n = prev
    s0 = n.s
    word = (TAU,) + tuple(labels)
    path = RegionPath((s0, s0) + tuple(states), word)
    run = lift_path(at, path)
    if not is_padded(run) or block_graph(run).is_acyclic():
        raise AssertionError("lifted witness is not an unwigglable padded run")
    if region_run_of(run, modified=True).labels != word:
        raise AssertionError("lifted witness does not follow its word")
    if not block_graph_cyclic_word(word):
        raise AssertionError("witness word decodes to an acyclic graph")
    cert = wiggle_run(run)
    if not isinstance(cert, UnwigglableCertificate) or cert.total != 0:
        raise AssertionError("witness run was wiggled")
    return NotRaceAvoiding(run, cert, word)
