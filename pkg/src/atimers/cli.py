"""Command-line interface.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
parse error, 3 semantic error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import avoidance, blocks, dot, formats, generators, model, reach, regions, semantics, wiggle
from .errors import SemanticError, UsageError

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_SEMANTIC = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _load_at(path: str) -> model.AutomatonWithTimers:
    return formats.parse_at(_read(path))


def _load_run(args) -> semantics.TimedRun:
    at = _load_at(args.at)
    word, final = formats.parse_run_word(args.word)
    return semantics.run_from_word(at, word, final)


def cmd_validate(args, out) -> int:
    at = formats.parse_at(_read(args.at), validate=False)
    report = model.validate_automaton(at)
    if report.ok:
        print("ok", file=out)
        return EXIT_OK
    for v in report.violations:
        print(f"{v.rule} at {v.locus}: {v.message}", file=out)
    return EXIT_NEGATIVE


def cmd_simulate(args, out) -> int:
    run = _load_run(args)
    print(f"start {run.initial}", file=out)
    for k in range(1, run.n + 1):
        print(f"delay {formats.fraction_str(run.delay_before(k))} -> {run.pre(k)}", file=out)
        print(f"{run.action(k)} / {model.update_str(run.update(k))} -> {run.post(k)}", file=out)
    print(f"delay {formats.fraction_str(run.final_delay)} -> {run.final}", file=out)
    print(f"trace {semantics.trace_str(semantics.untimed_trace(run))}", file=out)
    print(f"padded {'yes' if semantics.is_padded(run) else 'no'}", file=out)
    return EXIT_OK


def cmd_blocks(args, out) -> int:
    run = _load_run(args)
    g = blocks.block_graph(run)
    for b in g.blocks:
        print(b, file=out)
    for e in g.edges:
        print(e, file=out)
    return EXIT_OK


def cmd_graph(args, out) -> int:
    g = blocks.block_graph(_load_run(args))
    if args.dot:
        out.write(dot.emit_dot(g))
    else:
        for b in g.blocks:
            succ = " ".join(f"B{s.index}" for s in g.successors(b))
            print(f"{b.label()} -> {succ}".rstrip(), file=out)
        print("acyclic" if g.is_acyclic() else "cyclic", file=out)
    return EXIT_OK


def cmd_wiggle(args, out) -> int:
    res = wiggle.wiggle_run(_load_run(args))
    if isinstance(res, wiggle.UnwigglableCertificate):
        print("unwigglable", file=out)
        print(res, file=out)
        return EXIT_NEGATIVE
    print(formats.run_to_word_text(res), file=out)
    return EXIT_OK


def cmd_reach(args, out) -> int:
    at = _load_at(args.at)
    res = reach.reachable(at, args.target)
    if not res.reachable:
        print(f"unreachable ({res.explored} region states explored)", file=out)
        return EXIT_NEGATIVE
    print("reachable", file=out)
    print(f"witness {formats.run_to_word_text(res.witness_run)}", file=out)
    print("path " + " ".join(str(lab) for lab in res.region_path.labels), file=out)
    return EXIT_OK


def cmd_region_stats(args, out) -> int:
    at = _load_at(args.at)
    g = regions.explore(at)
    if args.dot:
        out.write(dot.emit_dot(g))
        return EXIT_OK
    gm = regions.explore(at, modified=True)
    print(f"states {len(at.states)}", file=out)
    print(f"timers {len(at.timers)}", file=out)
    print(f"max-constant {model.max_constant(at)}", file=out)
    print(f"bound {regions.region_count_bound(at)}", file=out)
    print(f"reachable-regions {len(g)}", file=out)
    print(f"reachable-modified-regions {len(gm)}", file=out)
    return EXIT_OK


def cmd_race_avoiding(args, out) -> int:
    at = _load_at(args.at)
    v = avoidance.search_unwigglable(at, args.max_actions)
    if isinstance(v, avoidance.RaceAvoiding):
        print(f"race-avoiding ({v.proof})", file=out)
        return EXIT_OK
    if isinstance(v, avoidance.UnknownBeyondBound):
        print(f"unknown (no witness up to {v.length} actions)", file=out)
        return EXIT_OK
    print("not race-avoiding", file=out)
    print(f"witness {formats.run_to_word_text(v.witness)}", file=out)
    print("word " + " ".join(str(lab) for lab in v.word), file=out)
    print(v.certificate, file=out)
    return EXIT_NEGATIVE


def cmd_gen(args, out) -> int:
    if args.kind == "lbtm":
        m = formats.parse_lbtm(_read(args.machine))
        at = generators.lbtm_to_at(m, formats.parse_tape(args.tape))
    elif args.kind == "widget":
        at = generators.append_unwigglable_widget(_load_at(args.at), args.anchor)
    else:
        at = generators.random_at(args.seed, args.states, args.timers, args.inputs,
                                  args.max_const)
    out.write(formats.print_at(at))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atimers",
                                description="Analyse automata with timers.")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="worker count for searches (all searches currently run single-threaded)")
    sub = p.add_subparsers(dest="command", required=True)

    def with_at(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("at", help="automaton file ('-' for stdin)")
        return sp

    with_at("validate", "check the automaton's well-formedness rules").set_defaults(fn=cmd_validate)
    for name, fn, help_ in (("simulate", cmd_simulate, "run a timed word"),
                            ("blocks", cmd_blocks, "list blocks and races of a padded run"),
                            ("graph", cmd_graph, "print the block graph of a padded run"),
                            ("wiggle", cmd_wiggle, "remove races or certify that none can be")):
        sp = with_at(name, help_)
        sp.add_argument("word", help="run word, e.g. '1 i 0 to:x1 1/2'")
        if name == "graph":
            sp.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
        sp.set_defaults(fn=fn)
    sp = with_at("reach", "decide whether a state is reachable")
    sp.add_argument("--target", required=True)
    sp.set_defaults(fn=cmd_reach)
    sp = with_at("region-stats", "count reachable region states")
    sp.add_argument("--dot", action="store_true", help="emit the region graph as DOT")
    sp.set_defaults(fn=cmd_region_stats)
    sp = with_at("race-avoiding", "search for a padded run whose races cannot be removed")
    sp.add_argument("--max-actions", type=int, default=12, metavar="N")
    sp.set_defaults(fn=cmd_race_avoiding)

    gen = sub.add_parser("gen", help="generate automata")
    gsub = gen.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("lbtm", help="reduction of an LBTM run on a tape")
    g.add_argument("machine")
    g.add_argument("tape", help="symbols separated by commas or spaces")
    g = gsub.add_parser("widget", help="attach the unwigglable gadget at an anchor state")
    g.add_argument("at")
    g.add_argument("anchor")
    g = gsub.add_parser("random", help="seeded random automaton")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--states", type=int, required=True)
    g.add_argument("--timers", type=int, required=True)
    g.add_argument("--inputs", type=int, required=True)
    g.add_argument("--max-const", type=int, required=True)
    gen.set_defaults(fn=cmd_gen)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if getattr(args, "max_actions", 1) < 1:
        print("error: --max-actions must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SemanticError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
