"""Command-line entry point: ``lamcost run | family | bench | check``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import SizeCapExceeded, size_cap
from .families import FamilyKind, check_index, family_size, gen_family
from .machine import run
from .metrics import MACHINES, bench, emit, make_machine
from .strategies import ri_normalize, wh_normalize
from .suite import SUITES, check_suite
from .terms import GRAMMAR, ParseError, parse, show

REFERENCES = {"ref-wh": wh_normalize, "ref-ri": ri_normalize}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n{GRAMMAR}\n")
        sys.exit(2)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lamcost", description="Instrumented abstract machines for the lambda calculus.",
                epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="evaluate one term on one machine")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr", help="term source text")
    src.add_argument("--file", help="file containing the term")
    r.add_argument("--machine", required=True, choices=[*MACHINES, *REFERENCES])
    r.add_argument("--fuel", type=int, default=10_000, help="maximum number of transitions")
    r.add_argument("--trace", help="write the transition dump to this path")
    r.add_argument("--metrics", help="write the JSON report to this path")

    f = sub.add_parser("family", help="generate a family member")
    f.add_argument("--name", required=True, choices=[k.value for k in FamilyKind])
    f.add_argument("--n", type=int, required=True)
    mode = f.add_mutually_exclusive_group()
    mode.add_argument("--print", action="store_true", help="print the term (default)")
    mode.add_argument("--size-only", action="store_true", help="print only the size")

    b = sub.add_parser("bench", help="run a grid of machines and families")
    b.add_argument("--machines", default=",".join(MACHINES))
    b.add_argument("--families", default="ui")
    b.add_argument("--n-min", type=int, default=1)
    b.add_argument("--n-max", type=int, default=10)
    b.add_argument("--fuel", type=int, default=1_000_000)
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("--out", help="output path (default: stdout)")

    c = sub.add_parser("check", help="conformance, invariant and bound suites")
    c.add_argument("--suite", choices=SUITES, default="all")
    c.add_argument("--corpus-seed", type=int, default=42)
    c.add_argument("--corpus-size", type=int, default=500)
    c.add_argument("--fuel", type=int, default=10_000)
    c.add_argument("--machines", default=",".join(MACHINES))
    return p


def _split(raw: str, allowed, what: str, parser) -> list[str]:
    names = [x for x in raw.split(",") if x]
    for x in names:
        if x not in allowed:
            parser.error(f"unknown {what} {x!r}")
    return names


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e


def _cmd_run(args, parser) -> int:
    if args.fuel < 1:
        parser.error("--fuel must be positive")
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            print(f"cannot read {args.file}: {e.strerror}", file=sys.stderr)
            return 2
    else:
        text = args.expr
    try:
        term = parse(text)
    except ParseError as e:
        print(f"syntax error at {e}\n\n{GRAMMAR}", file=sys.stderr)
        return 2
    if args.machine in REFERENCES:
        d = REFERENCES[args.machine](term, args.fuel, keep_terms=False)
        out = {"machine": args.machine, "term_size": term.size, "steps": d.length,
               "status": "fuel_exhausted" if d.exhausted else "final",
               "decoded_size": d.final.size}
        if d.final.size <= size_cap():
            out["decoded"] = show(d.final)
        text = json.dumps(out, indent=2, ensure_ascii=False) + "\n"
        trace = "".join(f"{i} beta 1 {s.size}\n" for i, s in enumerate(d.steps))
    else:
        report = run(make_machine(args.machine), term, args.fuel)
        out = report.to_json()
        if report.decode_notice:
            out["notice"] = report.decode_notice
        text = json.dumps(out, indent=2, ensure_ascii=False) + "\n"
        trace = report.trace.dump()
    sys.stdout.write(text)
    if args.trace:
        _write(args.trace, trace)
    if args.metrics:
        _write(args.metrics, text)
    return 0


def _cmd_family(args, parser) -> int:
    kind = FamilyKind(args.name)
    try:
        if args.size_only:
            check_index(kind, args.n)
            print(family_size(kind, args.n))
        else:
            print(show(gen_family(kind, args.n)))
    except ValueError as e:
        parser.error(str(e))
    except SizeCapExceeded as e:
        print(f"{e}; use --size-only for the analytic size", file=sys.stderr)
        return 1
    return 0


def _cmd_bench(args, parser) -> int:
    machines = _split(args.machines, MACHINES, "machine", parser)
    families = [FamilyKind(x) for x in _split(args.families, [k.value for k in FamilyKind], "family", parser)]
    if args.n_min > args.n_max:
        parser.error("--n-min exceeds --n-max")
    try:
        rows, slopes = bench(families, machines, range(args.n_min, args.n_max + 1), args.fuel)
    except (ValueError, SizeCapExceeded) as e:
        print(str(e), file=sys.stderr)
        return 1
    text = emit(rows, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    for (m, fam), slope in sorted(slopes.items()):
        print(f"slope {m} {fam} {slope:.4f}", file=sys.stderr)
    return 0


def _cmd_check(args, parser) -> int:
    machines = _split(args.machines, MACHINES, "machine", parser)
    print(f"corpus seed {args.corpus_seed}, {args.corpus_size} terms, fuel {args.fuel}")
    failures = check_suite(args.suite, args.corpus_seed, args.corpus_size, args.fuel, machines)
    for line in failures[:50]:
        print(line)
    if len(failures) > 50:
        print(f"... and {len(failures) - 50} more")
    print(f"suite {args.suite}: {'PASS' if not failures else f'FAIL ({len(failures)} failures)'}")
    return 0 if not failures else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "family": _cmd_family, "bench": _cmd_bench, "check": _cmd_check}[args.command]
    try:
        return handler(args, parser)
    except OSError as e:
        print(str(e), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
