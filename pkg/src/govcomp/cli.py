"""Command-line entry point: ``govcomp {check,type,project,simulate,cosim}``."""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from .conformance import IllTyped, Typer
from .core import CompositeComponent
from .cosim import GenConfig, cosim_programs, generate
from .dsl import DslError, dumps_report, parse, render_type
from .extraction import local_protocol
from .projection import ProjectionError, show_local
from .semantics import Semantics, component_hash


class _Diagnostic(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _Diagnostic(f"{path}: {e.strerror}") from e
    try:
        return parse(text)
    except DslError as e:
        raise _Diagnostic(f"{path}:{e}") from e


def _component(program, name: Optional[str]):
    name = name or program.entry
    if name not in program.components:
        raise _Diagnostic(f"no component named {name}")
    return program.components[name]


def _print_type(t, as_json: bool, out) -> None:
    print(dumps_report(t) if as_json else render_type(t), file=out)


def _ill_typed(e: IllTyped, out) -> None:
    print(f"ill-typed: {e}", file=out)
    if e.derivation is not None:
        print(e.derivation.render(), file=out)


def cmd_check(args, out) -> int:
    program = _load(args.file)
    try:
        t = Typer(program.functions)(program.entry_component)
    except IllTyped as e:
        _ill_typed(e, out)
        return 1
    _print_type(t, args.json, out)
    return 0


def cmd_type(args, out) -> int:
    program = _load(args.file)
    try:
        t = Typer(program.functions).extract(_component(program, args.component))
    except IllTyped as e:
        _ill_typed(e, out)
        return 1
    _print_type(t, args.json, out)
    return 0


def cmd_project(args, out) -> int:
    program = _load(args.file)
    k = _component(program, args.component)
    if not isinstance(k, CompositeComponent):
        raise _Diagnostic(f"{k.name} is a base component and has no protocol")
    if args.role not in {r for r, _ in k.roles}:
        raise _Diagnostic(f"{k.name} has no role {args.role}")
    try:
        print(show_local(local_protocol(k, args.role)), file=out)
    except ProjectionError as e:
        raise _Diagnostic(f"projection failed: {e!r}") from e
    return 0


def cmd_simulate(args, out) -> int:
    program = _load(args.file)
    sem = Semantics(program.functions)
    rng = random.Random(args.seed)
    k = program.entry_component
    for n in range(1, args.steps + 1):
        moves = sem.enumerate(k, fresh=n)
        if not moves:
            break
        tr = rng.choice(moves)
        k = tr.target
        print(f"STEP {n} {tr.label} ;; {component_hash(k)}", file=out)
    return 0


def cmd_cosim(args, out) -> int:
    if args.generate == (args.file is not None):
        raise _Usage("cosim takes either FILE or --generate")
    if args.generate:
        cfg = GenConfig(tau_budget=args.tau)
        programs = [generate(seed, cfg) for seed in range(args.seeds)]
    else:
        programs = [_load(args.file)]
    for p in programs:
        try:
            Typer(p.functions)(p.entry_component)
        except IllTyped as e:
            _ill_typed(e, out)
            return 1
    report = cosim_programs(programs, args.depth, args.tau)
    print(json.dumps(report.to_dict(), indent=2) if args.json else report.render(), file=out)
    return 0 if report.ok else 1


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="govcomp", description="Governed components toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate and type a program")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("type", help="print the extracted type of a component")
    p.add_argument("file")
    p.add_argument("--component")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_type)

    p = sub.add_parser("project", help="print the local protocol of a role")
    p.add_argument("file")
    p.add_argument("--role", required=True)
    p.add_argument("--component")
    p.set_defaults(run=cmd_project)

    p = sub.add_parser("simulate", help="print a random execution trace")
    p.add_argument("file")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("cosim", help="check subject reduction and progress")
    p.add_argument("file", nargs="?")
    p.add_argument("--generate", action="store_true")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--tau", type=int, default=16)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_cosim)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.run(args, out)
    except _Usage as e:
        parser.print_usage(err)
        print(f"govcomp: error: {e}", file=err)
        return 2
    except _Diagnostic as e:
        print(str(e), file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
