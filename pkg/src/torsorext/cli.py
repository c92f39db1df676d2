"""Command-line front end.

Exit codes: 0 on success, 1 on input errors, 2 when a mathematical guard fails
(finiteness guard, blow-up cap) or a verification does not pass.
"""

import argparse
import random
import sys

from . import groebner
from .catalog import EXAMPLES
from .coeffs import CoeffScalar
from .document import Document, group_block, scheme_block, torsor_block, write_document
from .errors import GuardFailure, InputError, TorsorError
from .hopf import blowup_group, verify_hopf
from .poly import MultiPoly
from .schemes import flat_closure, neron_blowup
from .torsors import blowup_torsor, extend_torsor, m_torsor_roundtrip, verify_torsor


class VerificationFailed(GuardFailure):
    pass


def _emit(text, out):
    out.write(text)


def _apply_caps(doc, args):
    deg = getattr(args, "degree_cap", None) or doc.options.get("degree-cap")
    size = getattr(args, "size_cap", None) or doc.options.get("size-cap")
    groebner.set_limits(int(deg) if deg else None, int(size) if size else None)


def _report_items(report):
    return [(f"check.{i + 1:02d}", line) for i, line in enumerate(report.lines())]


def cmd_verify(doc, args, out):
    label = doc.target
    kind = doc.kind(label)
    if kind == "torsor":
        T = doc.block(label, "torsor")
        report = verify_torsor(T)
    elif kind == "group":
        report = verify_hopf(doc.block(label, "group"))
    else:
        raise InputError(f"verify needs a torsor or group target, got a {kind}")
    for line in report.lines():
        out.write(line + "\n")
    for f in report.failures:
        out.write(f"  failure: {f}\n")
    out.write(f"result: {'PASS' if report.passed else 'FAIL'}\n")
    if not report.passed:
        raise VerificationFailed("verification failed")


def cmd_extend(doc, args, out):
    T = doc.block(doc.target, "torsor")
    _, section = doc.blocks[doc.target]
    xname = doc.get(section, "base")
    X = doc.block(xname, "scheme")
    x = doc.scheme_section(xname)
    cap = args.max_blowups if getattr(args, "max_blowups", None) is not None else doc.options.get("max-blowups")
    res = extend_torsor(X, x, T, max_blowups=int(cap) if cap is not None else None, names=doc.names(doc.target))
    trace = list(res.log)
    trace.append(f"groebner bases computed: {len(groebner.STATS)}, largest: {max(groebner.STATS, default=0)}")
    _comments(args, trace, out)
    blocks = [scheme_block("base", res.base), group_block("group", res.group),
              torsor_block("model", res.torsor, "base", "group")]
    extra = {"result": [("blowups", res.count), ("verified", res.report.passed)] + _report_items(res.report),
             **_trace_section(trace)}
    _emit(write_document(doc.p, "verify", "model", blocks, extra), _output(args, out))


def _output(args, out):
    path = getattr(args, "output", None)
    if not path:
        return out
    return _FileSink(path)


class _FileSink:
    def __init__(self, path):
        self.path = path

    def write(self, text):
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _comments(args, lines, out):
    if getattr(args, "trace", False):
        for line in lines:
            out.write(f"# {line}\n")


def _trace_section(lines):
    return {"trace": [(f"line.{i + 1:03d}", t) for i, t in enumerate(lines)]}


def cmd_blowup(doc, args, out):
    label = doc.target
    kind = doc.kind(label)
    times = args.times if getattr(args, "times", None) is not None else int(doc.options.get("times", 1))
    if kind == "scheme":
        X = doc.block(label, "scheme")
        x = doc.scheme_section(label)
        if not X.flat:
            X = flat_closure(X)
            x = type(x)(X, x.assignments)
        Y, trace = neron_blowup(X, x, times, names=doc.names(label))
        lines = trace.lines()
        _comments(args, lines, out)
        _emit(write_document(doc.p, "flat-closure", "blown", [scheme_block("blown", Y)], _trace_section(lines)),
              _output(args, out))
    elif kind == "group":
        G = blowup_group(doc.block(label, "group"), times)
        _emit(write_document(doc.p, "verify", "blown", [group_block("blown", G)]), _output(args, out))
    else:
        T = doc.block(label, "torsor")
        section = doc.torsor_section(label, "blowup-section")
        lines = []
        for i in range(times):
            T = blowup_torsor(T, section)
            lines += [f"step {i + 1}: {line}" for line in T.history[-1].lines()]
        _comments(args, lines, out)
        blocks = [scheme_block("base", T.base), group_block("group", T.group),
                  torsor_block("model", T, "base", "group")]
        _emit(write_document(doc.p, "verify", "model", blocks, _trace_section(lines)), _output(args, out))


def cmd_flat_closure(doc, args, out):
    X = doc.block(doc.target, "scheme")
    _emit(write_document(doc.p, "flat-closure", "closed", [scheme_block("closed", flat_closure(X))]),
          _output(args, out))


def run_document(text, args, out, source="<input>", command=None):
    doc = Document(text, source)
    groebner.STATS.clear()
    _apply_caps(doc, args)
    command = command or doc.command
    handlers = {"verify": cmd_verify, "extend": cmd_extend, "blowup": cmd_blowup,
                "flat-closure": cmd_flat_closure}
    if command not in handlers:
        raise InputError(f"{source}: unknown command {command!r}")
    handlers[command](doc, args, out)


def random_a(rng, p, degree, pi_degree=3):
    """Random a in R[x] with deg_x <= degree and coefficients of pi-degree <= pi_degree."""
    terms = {}
    for e in range(degree + 1):
        coeffs = tuple(rng.randrange(p) for _ in range(pi_degree + 1))
        c = CoeffScalar(coeffs, (1,), p)
        if c:
            terms[(("x", e),) if e else ()] = c
    return MultiPoly(terms, p, ("x",))


def cmd_fuzz(args, out):
    rng = random.Random(args.seed)
    ok = 0
    for i in range(args.count):
        a = random_a(rng, args.p, args.degree)
        good = m_torsor_roundtrip(a, p=args.p)
        ok += good
        if not good:
            out.write(f"mismatch: a = {a}\n")
    out.write(f"round-trip: {ok}/{args.count} agree (p = {args.p}, degree <= {args.degree})\n")
    if ok != args.count:
        raise VerificationFailed("round-trip mismatch")


def build_parser():
    ap = argparse.ArgumentParser(prog="torsorext", description="Flat models of torsors via Neron blow-ups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--input", "-i", default="-", help="problem document (default: stdin)")
        sp.add_argument("--output", "-o", help="write the result document here")
        sp.add_argument("--trace", action="store_true", help="print the trace")
        sp.add_argument("--degree-cap", type=int)
        sp.add_argument("--size-cap", type=int)

    for name in ("verify", "flat-closure"):
        common(sub.add_parser(name))
    ext = sub.add_parser("extend")
    common(ext)
    ext.add_argument("--max-blowups", type=int)
    bl = sub.add_parser("blowup")
    common(bl)
    bl.add_argument("--times", type=int)
    ex = sub.add_parser("examples")
    ex.add_argument("--id", choices=sorted(EXAMPLES), help="run one example (default: list them)")
    ex.add_argument("--trace", action="store_true")
    ex.add_argument("--show", action="store_true", help="print the problem document only")
    fz = sub.add_parser("fuzz-roundtrip")
    fz.add_argument("--count", type=int, default=200)
    fz.add_argument("--p", type=int, default=2)
    fz.add_argument("--degree", type=int, default=4)
    fz.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            if not args.id:
                for k in sorted(EXAMPLES):
                    out.write(k + "\n")
                return 0
            text = EXAMPLES[args.id]
            if args.show:
                out.write(text)
                return 0
            args.output = None
            args.times = None
            args.max_blowups = None
            run_document(text, args, out, f"<example {args.id}>")
        elif args.command == "fuzz-roundtrip":
            cmd_fuzz(args, out)
        else:
            if args.input == "-":
                text, source = sys.stdin.read(), "<stdin>"
            else:
                try:
                    with open(args.input, encoding="utf-8") as fh:
                        text = fh.read()
                except OSError as exc:
                    raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
                source = args.input
            run_document(text, args, out, source, args.command)
    except GuardFailure as exc:
        err.write(f"guard failure ({type(exc).__name__}): {exc}\n")
        fiber = getattr(exc, "fiber", None)
        if fiber is not None:
            err.write(f"  offending fibre: {fiber}\n")
        return 2
    except (InputError, TorsorError) as exc:
        err.write(f"error ({type(exc).__name__}): {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
