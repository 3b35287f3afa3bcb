"""Command-line entry point: ``tores check | run | fmt``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tores.errors import EvalError, FuelExhausted
from tores.frontend.driver import Module, load_file, observe, run_definition
from tores.frontend.parser import ParseError, parse_program
from tores.frontend.printer import print_program, print_type, print_value
from tores.machine import deep_call, default_fuel

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--dump-ast", action="store_true", help="print the elaborated AST")
    common.add_argument("--trace", action="store_true", help="print one line per evaluation rule")

    ap = argparse.ArgumentParser(prog="tores", description="Check and run TORES programs.")
    sub = ap.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", parents=[common], help="kind and type check files")
    chk.add_argument("files", nargs="+")
    run = sub.add_parser("run", parents=[common], help="evaluate a definition")
    run.add_argument("file")
    run.add_argument("--main", required=True, help="name of the definition to evaluate")
    run.add_argument("--fuel", type=int, default=None, help="step budget (default: $TORES_FUEL or 10^6)")
    run.add_argument("--take", type=int, default=None, help="observe K elements of a stream result")
    fmt = sub.add_parser("fmt", parents=[common], help="pretty-print a file")
    fmt.add_argument("file")
    return ap


def _report(mods: list[Module], as_json: bool, out) -> None:
    diags = [d for m in mods for d in m.diagnostics]
    if as_json:
        json.dump({"ok": not diags, "diagnostics": [d.to_json() for d in diags]}, out, indent=2)
        out.write("\n")
    else:
        for d in diags:
            print(d.render(), file=out)


def _load(path: str, err) -> Module | None:
    if not Path(path).is_file():
        print(f"tores: no such file: {path}", file=err)
        return None
    return load_file(path)


def _dump(mod: Module, out) -> None:
    for name, c in mod.types.items():
        print(f"type {name} = {c.resolved!r}", file=out)
    for name, c in mod.defs.items():
        print(f"def {name} : {c.type!r}\n  = {c.resolved!r}", file=out)


def cmd_check(args, out, err) -> int:
    mods = []
    for path in args.files:
        mod = _load(path, err)
        if mod is None:
            return EXIT_USAGE
        mods.append(mod)
        if args.dump_ast:
            _dump(mod, out)
    _report(mods, args.json, out if args.json else err)
    if all(m.ok for m in mods):
        if not args.json:
            count = sum(len(m.types) + len(m.defs) for m in mods)
            print(f"ok: {count} declarations in {len(mods)} file(s)", file=out)
        return EXIT_OK
    return EXIT_DIAGNOSTICS


def cmd_run(args, out, err) -> int:
    mod = _load(args.file, err)
    if mod is None:
        return EXIT_USAGE
    if args.dump_ast:
        _dump(mod, out)
    if not mod.ok:
        _report([mod], args.json, out if args.json else err)
        return EXIT_DIAGNOSTICS
    if args.main not in mod.defs:
        print(f"tores: no definition named {args.main!r} in {args.file}", file=err)
        return EXIT_USAGE
    fuel = default_fuel() if args.fuel is None else args.fuel
    trace = (lambda line: print(line, file=err)) if args.trace else None

    def go():
        value, machine = run_definition(mod, args.main, fuel, trace)
        heads = observe(value, args.take, machine) if args.take else None
        return value, heads, machine.steps

    try:
        value, heads, steps = deep_call(go)
    except FuelExhausted as e:
        _runtime_failure(args, out, err, "fuel_exhausted", str(e))
        return EXIT_RUNTIME
    except (EvalError, RecursionError) as e:
        _runtime_failure(args, out, err, "internal_error", str(e))
        return EXIT_RUNTIME
    if args.json:
        payload = {"ok": True, "value": print_value(value), "steps": steps,
                   "type": print_type(mod.defs[args.main].type)}
        if heads is not None:
            payload["take"] = [print_value(h) for h in heads]
        json.dump(payload, out, indent=2)
        out.write("\n")
    elif heads is not None:
        for h in heads:
            print(print_value(h), file=out)
    else:
        print(print_value(value), file=out)
    return EXIT_OK


def _runtime_failure(args, out, err, outcome: str, detail: str) -> None:
    if args.json:
        json.dump({"ok": False, "outcome": outcome, "detail": detail}, out, indent=2)
        out.write("\n")
    else:
        print(f"tores: {outcome}: {detail}", file=err)


def cmd_fmt(args, out, err) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"tores: no such file: {path}", file=err)
        return EXIT_USAGE
    try:
        program = parse_program(path.read_text(encoding="utf-8"))
    except ParseError as e:
        print(f"{path}:{e.span.line}:{e.span.col}: error[syntax_error]: {e.message}", file=err)
        return EXIT_DIAGNOSTICS
    if args.dump_ast:
        for d in program.decls:
            print(repr(d), file=out)
    out.write(print_program(program))
    return EXIT_OK


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    handler = {"check": cmd_check, "run": cmd_run, "fmt": cmd_fmt}[args.command]
    return handler(args, out, err)


def entry() -> None:
    sys.exit(main())


__all__ = ["main", "entry"]


if __name__ == "__main__":
    entry()
