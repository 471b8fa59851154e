"""Automata with timers: exact simulation, race analysis, regions and reachability."""

from .avoidance import (ExhaustedToBound, NotRaceAvoiding, RaceAvoiding, StaticSingleTimer,
                        UnknownBeyondBound, block_graph_cyclic_word, phi_matches,
                        search_unwigglable, static_single_timer_check)
from .blocks import (Block, BlockGraph, CanonicalCycle, Fate, block_graph, decompose_blocks,
                     extend_run, find_canonical_cycle, races, reltime, triggers)
from .dot import emit_dot
from .formats import parse_at, parse_lbtm, parse_run_word, print_at, print_lbtm, print_run_word
from .generators import LBTM, append_unwigglable_widget, lbtm_accepts, lbtm_to_at, random_at
from .model import (AutomatonWithTimers, Input, Start, Timeout, ValidationReport,
                    discarded_timers, transition, validate_automaton)
from .reach import ReachabilityResult, lift_to_timed_run, reachable
from .regions import (TAU, Act, Kill, ModifiedRegionState, Region, RegionState,
                      delay_successor, discrete_successor, kill_step, region_count_bound,
                      region_of, region_run_of, timer_equivalent)
from .semantics import (Configuration, TimedRun, delay, discrete_step, is_padded,
                        run_from_word, untimed_trace)
from .wiggle import (UnwigglableCertificate, WiggleMove, apply_wiggle, can_wiggle_block,
                     choose_epsilon, wiggle_run)


__all__ = [
    "Act", "append_unwigglable_widget", "apply_wiggle", "AutomatonWithTimers", "Block",
    "block_graph", "block_graph_cyclic_word", "BlockGraph", "can_wiggle_block",
    "CanonicalCycle", "choose_epsilon", "Configuration", "decompose_blocks", "delay",
    "delay_successor", "discarded_timers", "discrete_step", "discrete_successor", "emit_dot",
    "ExhaustedToBound", "extend_run", "Fate", "find_canonical_cycle", "Input",
    "is_padded", "Kill", "kill_step", "LBTM", "lbtm_accepts", "lbtm_to_at",
    "lift_to_timed_run", "ModifiedRegionState", "NotRaceAvoiding", "parse_at", "parse_lbtm",
    "parse_run_word", "phi_matches", "print_at", "print_lbtm", "print_run_word",
    "RaceAvoiding", "races", "random_at", "ReachabilityResult", "reachable", "Region",
    "region_count_bound", "region_of", "region_run_of", "RegionState", "reltime",
    "run_from_word", "search_unwigglable", "Start", "static_single_timer_check",
    "StaticSingleTimer", "TAU", "TimedRun", "Timeout", "timer_equivalent", "transition",
    "triggers", "two_timer_source", "UnknownBeyondBound", "untimed_trace", "UnwigglableCertificate",
    "validate_automaton", "ValidationReport", "wiggle_run", "WiggleMove",
]


def two_timer_source() -> str:
    """Text of the bundled two-timer example automaton."""
    from importlib.resources import files
    return files(__name__).joinpath("data/two_timer.at").read_text(encoding="utf-8")
