"""The ``gdlog`` command line.

Exit status: 0 on success, 1 on user errors (bad files, bad flags, invalid
programs), 2 on engine errors (zero-mass conditioning, failing runs, ...).
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from . import __version__
from .analysis import is_weakly_acyclic
from .chase import PARALLEL, POLICIES, SEQUENTIAL, ChaseError
from .dist import DistributionError
from .distio import JSON, TEXT, DistributionFormatError, dumps, load_input_pdb, loads
from .engine import (
    DEFAULT_MAX_DEPTH, EngineError, exact_enumerate, monte_carlo, project_distribution,
)
from .model import Instance, ProgramError, check_program
from .parser import ParseError, parse_facts, parse_program
from .ppdl import ConstraintError, condition, parse_constraint
from .translate import as_existential

EXIT_OK, EXIT_USER, EXIT_ENGINE = 0, 1, 2
_U64 = (1 << 64) - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= _U64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gdlog", description="Generative Datalog: chase, enumerate, sample.")
    p.add_argument("--version", action="version", version=f"gdlog {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("translate", help="print the existential translation")
    t.add_argument("program")
    t.add_argument("-o", "--output")

    c = sub.add_parser("check", help="validate and test weak acyclicity")
    c.add_argument("program")

    def inputs(sp):
        sp.add_argument("program")
        sp.add_argument("facts", nargs="?", help="input instance (.facts)")
        sp.add_argument("--pdb", help="input probabilistic database (distribution file)")
        sp.add_argument("--mode", choices=[SEQUENTIAL, PARALLEL], default=PARALLEL)
        sp.add_argument("--policy", choices=sorted(POLICIES), default="rule-index")
        sp.add_argument("--keep-aux", action="store_true",
                        help="keep auxiliary relations in the output worlds")
        sp.add_argument("--format", choices=[TEXT, JSON], default=TEXT)
        sp.add_argument("-o", "--output")

    e = sub.add_parser("enumerate", help="exact output distribution (finite-discrete programs)")
    inputs(e)
    e.add_argument("--max-depth", type=_nonneg, default=DEFAULT_MAX_DEPTH)

    r = sub.add_parser("run", help="Monte-Carlo sampling of the chase")
    inputs(r)
    default_seed = os.environ.get("GDLOG_SEED", "0")
    r.add_argument("--seed", type=_seed, default=default_seed)
    r.add_argument("--samples", "-n", type=_positive, default=10_000)
    r.add_argument("--budget", type=_nonneg, default=10_000)
    r.add_argument("--jobs", "-j", type=_positive, default=1)
    r.add_argument("--trace", metavar="FILE",
                   help="write per-step chase records ('-' for stderr)")

    k = sub.add_parser("condition", help="condition a saved distribution on a constraint")
    k.add_argument("distribution")
    k.add_argument("constraint")
    k.add_argument("--format", choices=[TEXT, JSON], default=TEXT)
    k.add_argument("-o", "--output")
    return p


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: Optional[str], out) -> None:
    if path is None or path == "-":
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load_program(path: str):
    return check_program(parse_program(_read(path), path))


def _load_input(args, program):
    if args.pdb and args.facts:
        raise UsageError("give either a facts file or --pdb, not both")
    if args.pdb:
        return load_input_pdb(_read(args.pdb), program, args.pdb)
    if args.facts:
        return parse_facts(_read(args.facts), program, args.facts)
    return Instance()


def _cmd_translate(args, out) -> int:
    prog = _load_program(args.program)
    _write(str(as_existential(prog)), args.output, out)
    return EXIT_OK


def _cmd_check(args, out) -> int:
    prog = _load_program(args.program)
    out.write(is_weakly_acyclic(prog).describe() + "\n")
    return EXIT_OK


def _extra(args, **kw) -> dict:
    extra = {"keep_aux": args.keep_aux}
    if args.mode == SEQUENTIAL:
        extra["policy"] = args.policy
    extra.update(kw)
    return extra


def _cmd_enumerate(args, out) -> int:
    prog = _load_program(args.program)
    inp = _load_input(args, prog)
    dist = exact_enumerate(prog, inp, args.mode, args.policy, args.max_depth)
    if not args.keep_aux:
        dist = project_distribution(dist)
    _write(dumps(dist, args.format, _extra(args)), args.output, out)
    return EXIT_OK


def _cmd_run(args, out, err) -> int:
    prog = _load_program(args.program)
    inp = _load_input(args, prog)
    trace = fh = None
    if args.trace:
        fh = err if args.trace == "-" else open(args.trace, "w", encoding="utf-8")

        def trace(run, rec):
            fh.write(f"{run}\t{rec.format()}\n")
    try:
        dist = monte_carlo(prog, inp, args.mode, args.policy, args.samples, args.budget,
                           args.seed, args.jobs, trace)
    finally:
        if fh is not None and fh is not err:
            fh.close()
    if not args.keep_aux:
        dist = project_distribution(dist)
    _write(dumps(dist, args.format, _extra(args)), args.output, out)
    return EXIT_OK


def _cmd_condition(args, out) -> int:
    dist = loads(_read(args.distribution), args.distribution)
    cstr = parse_constraint(_read(args.constraint), args.constraint)
    result = condition(dist, cstr)
    _write(dumps(result, args.format), args.output, out)
    return EXIT_OK


def execute(argv=None, out=None, err=None) -> int:
    """Run the command line with ``argv``; returns the exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USER
    try:
        if args.command == "translate":
            return _cmd_translate(args, out)
        if args.command == "check":
            return _cmd_check(args, out)
        if args.command == "enumerate":
            return _cmd_enumerate(args, out)
        if args.command == "run":
            return _cmd_run(args, out, err)
        return _cmd_condition(args, out)
    except (UsageError, ParseError, ProgramError, DistributionFormatError,
            ConstraintError) as exc:
        err.write(f"gdlog: error: {exc}\n")
        return EXIT_USER
    except (EngineError, ChaseError, DistributionError) as exc:
        err.write(f"gdlog: {type(exc).__name__}: {exc}\n")
        return EXIT_ENGINE


def main(argv=None) -> None:
    sys.exit(execute(argv))


if __name__ == "__main__":
    main()
