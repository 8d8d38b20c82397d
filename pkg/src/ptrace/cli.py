"""Command-line entry point.

Exit codes: 0 on success, 1 when a violation (or an invalid certificate or
a failed reproduction) is found, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import axioms as ax
from .intp import Intp, load_path
from .kleene import is_defined
from .pathcomp import (
    CertificateError,
    certificate_from,
    check_certificate,
    dump_certificate,
    path_from,
    search_equiv,
    soundness_spot_check,
)
from .ratlin import Matrix, format_matrix, parse_matrix
from .render import path_dot, plot_partial_sums, plot_suite
from .vectcat import PROVIDER_NAMES, DirectSum, float_partial_sums, provider

EXACT_BASES = ("hs", "ki", "sum-exact", "kleene", "kron", "substoch")


class UsageError(Exception):
    pass


def _format_float(m: np.ndarray) -> str:
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in m]
    return "\n".join(lines)


def _format_value(x) -> str:
    return format_matrix(x) if isinstance(x, Matrix) else _format_float(np.asarray(x))


def _read_matrix(path: str) -> Matrix:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_matrix(text)


def _split(text: str, f: Matrix, unit: int) -> tuple[int, int, int]:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--split wants A,U[,B], got {text!r}") from None
    if len(parts) not in (2, 3) or min(parts) < 0:
        raise UsageError(f"--split wants A,U[,B], got {text!r}")
    a, u = parts[:2]
    if len(parts) == 3:
        return a, u, parts[2]
    if unit == 0:
        return a, u, f.rows - u
    if u == 0 or f.rows % u:
        raise UsageError(f"cannot split U={u} off {f.rows} rows")
    return a, u, f.rows // u


def cmd_trace(args) -> int:
    kw = {"horizon": args.horizon, "tol": args.tol} if args.impl == "sum-float" else {}
    p = provider(args.impl, **kw)
    f = _read_matrix(args.file)
    a, u, b = _split(args.split, f, p.unit)
    if (p.tensor_obj(b, u), p.tensor_obj(a, u)) != f.shape:
        raise UsageError(f"a {f.rows}x{f.cols} matrix does not split as A={a}, U={u}, B={b}")
    res = p.trace(p.lift(f), a, u, b)
    if is_defined(res):
        print("DEFINED")
        print(_format_value(res))
    else:
        print(f"UNDEFINED {res.reason}")
    if args.plot:
        if p.unit != 0:
            raise UsageError("--plot draws partial sums, which only exist for direct sums")
        sums = float_partial_sums(f, a, u, b, args.horizon)
        plot_partial_sums(sums, args.plot, title=f"partial sums, U={u}")
    return 0


def cmd_axioms_run(args) -> int:
    kw = {"horizon": args.horizon, "tol": args.tol} if args.impl == "sum-float" else {}
    p = provider(args.impl, **kw)
    reports = ax.run_suite(p, n=args.cases, seed=args.seed, max_dim=args.max_dim,
                           workers=args.workers)
    summary = ax.summarize(reports)
    bad = [r for r in reports if r.verdict == "violation"]
    if args.json:
        json.dump({
            "impl": args.impl,
            "cases": args.cases,
            "seed": args.seed,
            "summary": summary,
            "reports": [r.to_json() for r in reports] if args.all else [r.to_json() for r in bad],
        }, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
    else:
        print("axiom\tpass\tviolation\tunstable")
        for name, row in summary.items():
            print(f"{name}\t{row['pass']}\t{row['violation']}\t{row['unstable']}")
        for r in bad:
            print(f"VIOLATION\t{r.axiom}\t{r.instance}\t{r.relation}")
    if args.plot:
        plot_suite(summary, args.plot, title=f"{args.impl}: {args.cases} cases, seed {args.seed}")
    return 1 if bad else 0


def cmd_repro(args) -> int:
    rep = ax.REPROS[args.name]()
    sys.stdout.write(rep.text)
    return 0 if rep.ok else 1


def _intp(base: str) -> Intp:
    return Intp(provider(base))


def cmd_intp_compose(args) -> int:
    ip = _intp(args.base)
    p = load_path(args.path, ip)
    res = ip.compose(p)
    if is_defined(res):
        print("DEFINED")
        print(f"type {res.dom!r} -> {res.cod!r}")
        print(format_matrix(res.under))
    else:
        print(f"UNDEFINED {res.reason}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(path_dot(p))
    return 0


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_complete_equiv(args) -> int:
    ip = _intp(args.base)
    lhs = path_from(_load_json(args.lhs), ip)
    rhs = path_from(_load_json(args.rhs), ip)
    cert = search_equiv(ip, lhs, rhs, args.depth)
    if not is_defined(cert):
        print(f"NOT FOUND within depth {args.depth} ({cert.reason})")
        return 0
    print(f"EQUIVALENT steps={len(cert)}")
    for k, s in enumerate(cert.steps):
        kind = s.rule.rule + (" inverse" if s.rule.inverse else "")
        print(f"{k + 1}\t{kind}\tspan={s.rule.span[0]}..{s.rule.span[1]}\tlength={len(s.result)}")
    if args.emit_cert:
        dump_certificate(cert, args.emit_cert, instance=f"intp:{args.base}")
    return 0


def cmd_complete_check(args) -> int:
    data = _load_json(args.cert)
    instance = data.get("instance", "intp:ki")
    kind, _, base = instance.partition(":")
    if kind != "intp" or base not in EXACT_BASES:
        raise UsageError(f"unknown certificate instance {instance!r}")
    ip = _intp(base)
    try:
        cert = certificate_from(data, ip)
    except (CertificateError, ValueError) as exc:
        print(f"INVALID malformed: {exc}")
        return 1
    ok = check_certificate(ip, cert)
    sound = soundness_spot_check(ip, cert) if ok else False
    print(f"{'VALID' if ok else 'INVALID'} steps={len(cert)} sound={'yes' if sound else 'no'}")
    return 0 if ok and sound else 1


def cmd_render(args) -> int:
    p = load_path(args.dot, Intp(DirectSum("ki")))
    text = path_dot(p)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptrace", description="Partial traces on rational matrix categories.")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace", help="compute a partial trace of a matrix file")
    t.add_argument("--impl", choices=PROVIDER_NAMES, required=True)
    t.add_argument("--split", required=True, help="A,U[,B] object sizes")
    t.add_argument("--horizon", type=int, default=64)
    t.add_argument("--tol", type=float, default=1e-9)
    t.add_argument("--plot", metavar="PNG", help="write a partial-sum figure")
    t.add_argument("file", help="matrix file, or - for stdin")
    t.set_defaults(func=cmd_trace)

    a = sub.add_parser("axioms", help="axiom suites and reproductions")
    asub = a.add_subparsers(dest="axioms_command", required=True)
    run = asub.add_parser("run", help="run the seeded axiom suite")
    run.add_argument("--impl", choices=PROVIDER_NAMES, required=True)
    run.add_argument("--cases", type=int, default=1000)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--max-dim", type=int, default=4)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--horizon", type=int, default=256)
    run.add_argument("--tol", type=float, default=1e-9)
    run.add_argument("--json", action="store_true", help="JSON report instead of the table")
    run.add_argument("--all", action="store_true", help="with --json, include passing reports")
    run.add_argument("--plot", metavar="PNG", help="write a bar chart of verdicts")
    run.set_defaults(func=cmd_axioms_run)
    rep = asub.add_parser("repro", help="print a reproduction transcript")
    rep.add_argument("name", choices=sorted(ax.REPROS))
    rep.set_defaults(func=cmd_repro)

    r = sub.add_parser("repro", help="print a reproduction transcript")
    r.add_argument("name", choices=sorted(ax.REPROS))
    r.set_defaults(func=cmd_repro)

    i = sub.add_parser("intp", help="compose paths in the partial Int construction")
    isub = i.add_subparsers(dest="intp_command", required=True)
    comp = isub.add_parser("compose")
    comp.add_argument("--base", choices=EXACT_BASES, default="ki")
    comp.add_argument("--path", required=True)
    comp.add_argument("--dot", metavar="OUT")
    comp.set_defaults(func=cmd_intp_compose)

    c = sub.add_parser("complete", help="path equivalence in the completion")
    csub = c.add_subparsers(dest="complete_command", required=True)
    eq = csub.add_parser("equiv")
    eq.add_argument("--base", choices=EXACT_BASES, default="ki")
    eq.add_argument("--lhs", required=True)
    eq.add_argument("--rhs", required=True)
    eq.add_argument("--depth", type=int, default=8)
    eq.add_argument("--emit-cert", metavar="OUT")
    eq.set_defaults(func=cmd_complete_equiv)
    chk = csub.add_parser("check-cert")
    chk.add_argument("cert")
    chk.set_defaults(func=cmd_complete_check)

    d = sub.add_parser("render", help="DOT diagram of an Int path")
    d.add_argument("--dot", required=True, metavar="PATH_JSON")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "depth", 1) < 1:
        parser.error("--depth must be at least 1")
    if getattr(args, "cases", 1) < 1:
        parser.error("--cases must be at least 1")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"ptrace: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
