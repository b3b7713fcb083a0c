"""Command-line front end: solve programs, generate instances, verify models.

``aspen solve FILE``    enumerate stable models, optionally with built-in or
                        scripted propagators and heuristics. Prints one line
                        per model (space-separated true atoms, sorted), then
                        a verdict line, and exits 10 when coherent, 20 when
                        incoherent, 1 on error, 2 on usage problems.
``aspen gen-sm``        write a random stable-marriage instance, optionally
                        with the matching encoding appended.
``aspen verify``        check that a model file lists a stable model of a
                        program file; exits 0 when it does, 1 when it does
                        not, 2 when either file cannot be parsed.

Comment lines on stdout start with ``%`` so model lines stay machine
readable. The ``--report`` file is line oriented: ``key: value`` pairs
(verdict, wall_time, counters, ``dispatch NAME.METHOD`` counts) followed by
``model N: ...`` lines and, when the constraint checker ran, ``solution N:
var=value ...`` lines.
"""

from __future__ import annotations

import argparse
import sys
import threading
import time

from .builtins import (
    CaspCheck,
    MarriageEager,
    MarriageLazy,
    MarriagePost,
    encoding_lines,
    generate_sm_instance,
)
from .builtins.vsids import Vsids
from .bridge import spawn_plugin
from .engine import Solver, SolverConfig, model_atom_names
from .errors import ParseError, ResourceLimit, SolverError
from .parser import parse_program
from .semantics import is_stable_model

EXIT_COHERENT = 10
EXIT_INCOHERENT = 20
EXIT_ERROR = 1
EXIT_USAGE = 2

_BUILTIN_PROPAGATORS = {
    "sm-lazy": MarriageLazy,
    "sm-eager": MarriageEager,
    "sm-post": MarriagePost,
    "casp": CaspCheck,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aspen",
        description="Answer-set solver with external propagators and heuristics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="enumerate stable models of a ground program")
    solve.add_argument("file", help="ground program file ('-' for standard input)")
    solve.add_argument(
        "--models",
        type=int,
        default=1,
        metavar="N",
        help="how many models to enumerate, 0 for all (default 1)",
    )
    solve.add_argument("--seed", type=int, default=0, metavar="U64", help="random seed")
    solve.add_argument(
        "--heuristic",
        choices=["minisat", "vsids"],
        help="branching strategy (minisat is the built-in default)",
    )
    solve.add_argument(
        "--heuristic-script",
        metavar="CMD",
        help="run CMD as a scripted branching heuristic",
    )
    solve.add_argument(
        "--propagator",
        action="append",
        default=[],
        choices=sorted(_BUILTIN_PROPAGATORS),
        help="add a built-in propagator (repeatable)",
    )
    solve.add_argument(
        "--propagator-script",
        action="append",
        default=[],
        metavar="CMD",
        help="run CMD as a scripted propagator (repeatable)",
    )
    solve.add_argument("--stats", action="store_true", help="print search statistics")
    solve.add_argument("--report", metavar="FILE", help="write a structured run report")
    solve.add_argument(
        "--conflict-budget", type=int, metavar="N", help="give up after N conflicts"
    )
    solve.add_argument(
        "--timeout", type=float, metavar="SECONDS", help="give up after this long"
    )

    gen = sub.add_parser("gen-sm", help="generate a random stable-marriage instance")
    gen.add_argument("--n", type=int, required=True, help="number of men and of women")
    gen.add_argument(
        "--k",
        type=int,
        default=0,
        help="0..100: how many of each person's scores are demoted (percent)",
    )
    gen.add_argument("--seed", type=int, default=0, metavar="U64", help="random seed")
    gen.add_argument(
        "--full-encoding",
        action="store_true",
        help="append the matching rules so the instance is solvable as is",
    )
    gen.add_argument(
        "--with-r7",
        action="store_true",
        help="also spell out the stability test as ground constraints",
    )
    gen.add_argument(
        "--output", metavar="FILE", help="write here instead of standard output"
    )

    verify = sub.add_parser("verify", help="check a model against a program")
    verify.add_argument("program", help="ground program file")
    verify.add_argument("model", help="file listing the model's true atoms")
    return parser


def _check_seed(parser: argparse.ArgumentParser, seed: int) -> None:
    if not 0 <= seed < 2**64:
        parser.error("--seed must fit an unsigned 64-bit integer")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def run_solve(parser: argparse.ArgumentParser, args) -> int:
    _check_seed(parser, args.seed)
    if args.models < 0:
        parser.error("--models must be 0 or positive")
    if args.conflict_budget is not None and args.conflict_budget < 1:
        parser.error("--conflict-budget must be positive")
    if args.timeout is not None and args.timeout <= 0:
        parser.error("--timeout must be positive")
    if args.heuristic and args.heuristic_script:
        parser.error("--heuristic and --heuristic-script are mutually exclusive")

    try:
        text = _read(args.file)
    except OSError as exc:
        parser.error(f"cannot read {args.file}: {exc}")

    try:
        program = parse_program(text)
    except ParseError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    solutions: list[dict] = []
    propagators = []
    for name in args.propagator:
        cls = _BUILTIN_PROPAGATORS[name]
        propagators.append(
            cls(on_solution=solutions.append) if name == "casp" else cls()
        )

    spawned = []
    watchdog = None
    note = None
    try:
        try:
            for command in args.propagator_script:
                plugin = spawn_plugin(command, "propagator", program)
                spawned.append(plugin)
                propagators.append(plugin)
            heuristic = None
            if args.heuristic == "vsids":
                heuristic = Vsids()
            elif args.heuristic_script:
                heuristic = spawn_plugin(args.heuristic_script, "heuristic", program)
                spawned.append(heuristic)

            config = SolverConfig(
                seed=args.seed,
                conflict_budget=args.conflict_budget,
                time_budget=args.timeout,
            )
            solver = Solver(
                program, propagators=propagators, heuristic=heuristic, config=config
            )
            if args.timeout is not None:  # backstop watchdog for stuck dispatches
                watchdog = threading.Timer(args.timeout + 1.0, solver.abort)
                watchdog.daemon = True
                watchdog.start()
            started = time.monotonic()
            try:
                result = solver.enumerate(args.models)
                verdict = "COHERENT" if result.coherent else "INCOHERENT"
                models, stats = result.models, result.statistics
            except ResourceLimit as exc:
                verdict, note = "UNKNOWN", str(exc)
                models, stats = exc.models, exc.statistics
            wall = time.monotonic() - started
        except SolverError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    finally:
        if watchdog is not None:
            watchdog.cancel()
        for plugin in spawned:
            plugin.shutdown()

    lines = [" ".join(sorted(model_atom_names(program, model))) for model in models]
    for index, line in enumerate(lines):
        print(line)
        if index < len(solutions):
            binding = solutions[index]
            rendered = " ".join(f"{v}={binding[v]}" for v in sorted(binding))
            print(f"% casp: {rendered}".rstrip())
    print(verdict)
    if note:
        print(f"% {note}")

    counters = [
        ("models", len(models)),
        ("decisions", stats.decisions),
        ("conflicts", stats.conflicts),
        ("restarts", stats.restarts),
        ("assignments", stats.assignments),
        ("learned", stats.learned),
        ("deleted", stats.deleted),
    ]
    if args.stats:
        print(f"% wall_time: {wall:.3f}")
        for key, value in counters:
            print(f"% {key}: {value}")
        for key in sorted(stats.dispatches):
            print(f"% dispatch {key}: {stats.dispatches[key]}")

    if args.report:
        report = [f"verdict: {verdict}", f"wall_time: {wall:.3f}"]
        report += [f"{key}: {value}" for key, value in counters]
        report += [
            f"dispatch {key}: {stats.dispatches[key]}"
            for key in sorted(stats.dispatches)
        ]
        report += [f"model {i}: {line}" for i, line in enumerate(lines, start=1)]
        report += [
            "solution {}: {}".format(
                i, " ".join(f"{v}={b[v]}" for v in sorted(b))
            )
            for i, b in enumerate(solutions, start=1)
        ]
        try:
            with open(args.report, "w", encoding="utf-8") as handle:
                handle.write("\n".join(report) + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.report}: {exc}", file=sys.stderr)
            return EXIT_ERROR

    if verdict == "COHERENT":
        return EXIT_COHERENT
    if verdict == "INCOHERENT":
        return EXIT_INCOHERENT
    return EXIT_ERROR


def run_generate(parser: argparse.ArgumentParser, args) -> int:
    _check_seed(parser, args.seed)
    if args.n < 1:
        parser.error("--n must be at least 1")
    if not 0 <= args.k <= 100:
        parser.error("--k must be between 0 and 100")
    if args.with_r7 and not args.full_encoding:
        parser.error("--with-r7 only makes sense with --full-encoding")
    instance = generate_sm_instance(args.n, args.k, args.seed)
    text = instance
    if args.full_encoding:
        rules = encoding_lines(instance, blocking_constraints=args.with_r7)
        text = instance + "\n".join(rules) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            parser.error(f"cannot write {args.output}: {exc}")
    else:
        sys.stdout.write(text)
    return 0


def run_verify(parser: argparse.ArgumentParser, args) -> int:
    try:
        program_text = _read(args.program)
        model_text = _read(args.model)
    except OSError as exc:
        parser.error(f"cannot read input: {exc}")
    try:
        program = parse_program(program_text)
    except ParseError as exc:
        print(f"error: {args.program}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    model = set()
    for name in model_text.split():
        aid = program.atom_id(name)
        if aid is None:  # names outside the program are in no stable model
            return 1
        model.add(aid)
    return 0 if is_stable_model(program, model) else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve":
        return run_solve(parser, args)
    if args.command == "gen-sm":
        return run_generate(parser, args)
    return run_verify(parser, args)


if __name__ == "__main__":
    sys.exit(main())
