"""State reachability by breadth-first search over the region automaton."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .errors import UnknownName
from .model import AutomatonWithTimers
from .regions import (TAU, RegionPath, initial_region_state, lift_path, region_run_of,
                      successors)
from .semantics import TimedRun


@dataclass(frozen=True)
class ReachabilityResult:
    reachable: bool
    region_path: Optional[RegionPath]
    witness_run: Optional[TimedRun]
    explored: int


def reachable(at: AutomatonWithTimers, target: str) -> ReachabilityResult:
    if not at.has_state(target):
        raise UnknownName("state", target)
    s0 = initial_region_state(at)
    parent = {s0: None}
    queue = deque([s0])
    found = s0 if s0.state == target else None
    while queue and found is None:
        s = queue.popleft()
        for lab, s2 in successors(at, s):
            if s2 in parent:
                continue
            parent[s2] = (s, lab)
            if s2.state == target:
                found = s2
                break
            queue.append(s2)
    if found is None:
        return ReachabilityResult(False, None, None, len(parent))
    states, labels = [found], []
    while parent[states[-1]] is not None:
        prev, lab = parent[states[-1]]
        states.append(prev)
        labels.append(lab)
    path = RegionPath(tuple(reversed(states)), tuple(reversed(labels)))
    run = lift_to_timed_run(at, path)
    return ReachabilityResult(True, path, run, len(parent))


def lift_to_timed_run(at: AutomatonWithTimers, region_path: RegionPath) -> TimedRun:
    """A concrete run following ``region_path``; it ends right after the last action."""
    run = lift_path(at, region_path)
    if _discrete_steps(region_run_of(run, mode="expanded")) != _discrete_steps(region_path):
        raise AssertionError("lifted run does not follow the region path")
    return run


def _discrete_steps(path: RegionPath) -> tuple:
    return tuple((lab, s) for s, lab in path.steps() if lab is not TAU)
