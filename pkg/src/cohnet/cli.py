"""``cohnet`` command line.

Exit status is 0 on success, 1 when a check fails (after printing a
witness) and 2 for usage, file or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dsl, formats, nn
from .constructions import PrecomposeError, hard_code, schema_to_theory
from .minifloat import FloatFormat
from .schema import check_functorial
from .semantics import check_model
from .syntax import Sequent

OK, FAILED, USAGE = 0, 1, 2


def _read(path: str) -> str:
    return Path(path).read_text()


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _schema_and_instance(args):
    d = formats.parse_schema(_read(args.schema))
    return d, formats.parse_instance(_read(args.instance), d)


def cmd_schema_check(args) -> int:
    d, inst = _schema_and_instance(args)
    v = check_functorial(inst)
    if v is None:
        print("functorial")
        return OK
    p, q = v.sides
    print(f"not functorial: equation {v.equation} "
          f"({formats.path_text(p)} = {formats.path_text(q)}) fails at element {v.witness}")
    return FAILED


def cmd_schema_to_theory(args) -> int:
    sys.stdout.write(dsl.print_theory(schema_to_theory(formats.parse_schema(_read(args.schema)))))
    return OK


def cmd_hardcode(args) -> int:
    _, inst = _schema_and_instance(args)
    sys.stdout.write(dsl.print_theory(hard_code(inst)))
    return OK


def _report(report, thy) -> int:
    if report.valid:
        print("valid")
        return OK
    print(report.describe())
    ax = thy.axioms[report.axiom]
    if isinstance(ax, Sequent):
        print(dsl.print_axiom(ax, thy.signature))
    return FAILED


def cmd_theory_check(args) -> int:
    thy = dsl.parse(_read(args.theory))
    m = formats.parse_structure(_read(args.model), thy.signature)
    return _report(check_model(m, thy, jobs=args.jobs), thy)


def _network(args):
    fmt = FloatFormat.parse(args.float)
    arch = nn.Architecture.parse(args.arch, fmt)
    G, iota = nn.architecture_theory(arch)
    constraints = getattr(args, "constraints", None)
    if constraints:
        G, iota = nn.apply_constraints(G, iota, formats.parse_constraints(_read(constraints)), arch)
    return fmt, arch, G, iota


def cmd_nn_build(args) -> int:
    _, _, G, iota = _network(args)
    _write(args.theory, dsl.print_theory(G))
    _write(args.interpretation, dsl.print_interpretation(iota))
    if args.source:
        _write(args.source, dsl.print_theory(iota.source))
    return OK


def _params(args, arch):
    p = formats.parse_params(_read(args.params))
    p.check(arch)
    return p


def cmd_nn_check(args) -> int:
    _, arch, G, _ = _network(args)
    M = nn.build_model(G, arch, _params(args, arch))
    return _report(check_model(M, G, jobs=args.jobs), G)


def cmd_nn_infer(args) -> int:
    fmt, arch, G, iota = _network(args)
    M = nn.build_model(G, arch, _params(args, arch))
    report = check_model(M, G, jobs=args.jobs)
    if not report.valid:
        return _report(report, G)
    try:
        data = nn.infer(G, iota, M)
    except PrecomposeError as exc:
        print(exc)
        return FAILED
    _write(args.out, formats.write_dataset(data, fmt))
    return OK


def cmd_nn_oracle(args) -> int:
    fmt = FloatFormat.parse(args.float)
    arch = nn.Architecture.parse(args.arch, fmt)
    _write(args.out, formats.write_dataset(nn.oracle_dataset(arch, _params(args, arch)), fmt))
    return OK


def cmd_dataset_diff(args) -> int:
    fa, a = formats.parse_dataset(_read(args.a))
    fb, b = formats.parse_dataset(_read(args.b))
    k = None if fa == fb else -1
    if k is None:
        k = formats.first_difference(a, b)
    if k is None:
        print("identical")
        return OK
    if k == -1:
        print("datasets differ in format or shape")
        return FAILED
    (xa, ya), (xb, yb) = a.rows()[k], b.rows()[k]
    show = lambda v: " ".join(f"{x:#x}" for x in v)
    print(f"row {k} differs: {show(xa)} -> {show(ya)} vs {show(xb)} -> {show(yb)}")
    return FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cohnet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    schema = sub.add_parser("schema").add_subparsers(dest="action", required=True)
    p = schema.add_parser("check", help="check that an instance satisfies the path equations")
    p.add_argument("schema")
    p.add_argument("instance")
    p.set_defaults(func=cmd_schema_check)
    p = schema.add_parser("to-theory", help="print the theory of a schema")
    p.add_argument("schema")
    p.set_defaults(func=cmd_schema_to_theory)

    p = sub.add_parser("hardcode", help="print the hard-coding theory of an instance")
    p.add_argument("schema")
    p.add_argument("instance")
    p.set_defaults(func=cmd_hardcode)

    theory = sub.add_parser("theory").add_subparsers(dest="action", required=True)
    p = theory.add_parser("check", help="model-check a structure against a theory")
    p.add_argument("theory")
    p.add_argument("model")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_theory_check)

    net = sub.add_parser("nn").add_subparsers(dest="action", required=True)

    def common(p, constraints=True):
        p.add_argument("--arch", required=True, help="e.g. 2-relu-2-id-1")
        p.add_argument("--float", default="s1e2m1", help="e.g. s1e2m1, s1e3m4:sat")
        if constraints:
            p.add_argument("--constraints", help="tie/fix file")
        return p

    p = common(net.add_parser("build", help="write the network theory and interpretation"))
    p.add_argument("--theory", required=True, help="output file for the theory")
    p.add_argument("--interpretation", required=True, help="output file for the interpretation")
    p.add_argument("--source", help="output file for the span theory")
    p.set_defaults(func=cmd_nn_build)
    for name, func, helptext in (("check", cmd_nn_check, "model-check a parameter file"),
                                 ("infer", cmd_nn_infer, "inference by precomposition")):
        p = common(net.add_parser(name, help=helptext))
        p.add_argument("--params", required=True)
        p.add_argument("--jobs", type=int, default=1)
        if name == "infer":
            p.add_argument("--out", required=True)
        p.set_defaults(func=func)
    p = common(net.add_parser("oracle", help="direct numeric evaluation"), constraints=False)
    p.add_argument("--params", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_nn_oracle)

    data = sub.add_parser("dataset").add_subparsers(dest="action", required=True)
    p = data.add_parser("diff", help="compare two datasets bit for bit")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_dataset_diff)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        # every parse, format and shape error in the package is a ValueError
        print(f"cohnet: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
