"""Command-line interface.

Exit codes: 0 success (or a PROVED* / PROBABILISTIC verdict), 1 failed
verification, 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .certificate import default_out_dir, read_certificate, render_int, write_certificate
from .certify import (certify_det4_rank12, certify_det_lower, certify_perm_finite_char, certify_perm_table,
                      verify_certificate)
from .errors import BudgetExceeded, KoszulError
from .exact.modp import PRIMES_62, det_crt, det_mod_p, hadamard_bound, primes_for_bound, rank_mod_p
from .exact.rational import det_rational, rank_rational
from .flattening import FlatteningPlan, border_bound, divisor, rkf_matrix
from .sparse import SparseMatrix
from .symmetry import connected_components, symmetric_rank
from .tensor import Tensor, det_tensor, loads_terms, perm_tensor, verify_decomposition

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _UsageError(Exception):
    pass


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags; accepted before or after the subcommand."""
    sup = None if defaults else argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0 if defaults else sup, help="PRNG seed (default 0)")
    g.add_argument("--prime", type=int, default=sup, help="work over F_p for this prime")
    g.add_argument("--threads", type=int, default=1 if defaults else sup, help="worker processes")
    g.add_argument("--out-dir", default=sup, help="certificate directory (default $KOSZULRANK_OUT_DIR or ./certificates)")
    g.add_argument("--exhaustive", action="store_true", default=False if defaults else sup,
                   help="exact CRT determinants instead of congruences")
    g.add_argument("--budget-seconds", type=float, default=sup, help="wall-clock budget")
    g.add_argument("--json", action="store_true", default=False if defaults else sup, help="machine-readable output")
    g.add_argument("--fast", action="store_true", default=False if defaults else sup,
                   help="random-point identity tests instead of full grids")
    g.add_argument("--extended", action="store_true", default=False if defaults else sup,
                   help="allow multi-hour runs (perm table n = 7)")
    return p


def _tensor_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="tensor file (text format)")
    p.add_argument("--tensor", choices=("det", "perm"), help="built-in tensor instead of a file")
    p.add_argument("--n", type=int, help="size for --tensor")


def _plan_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", dest="exponents", help="Koszul exponents, comma separated (default 1,2,...,d-2)")
    p.add_argument("--modes", help="Koszul modes, comma separated (default 1,2,...)")
    p.add_argument("--contraction", type=int, help="dualized mode (default d-1)")
    p.add_argument("--output", type=int, help="output mode (default d)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="koszulrank", parents=[_common(True)],
                                     description="Recursive Koszul flattenings and border-rank certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    common = _common(False)

    p = sub.add_parser("gen", parents=[common], help="write det_n or perm_n in the tensor text format")
    p.add_argument("--tensor", choices=("det", "perm"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--out", help="output file (default stdout)")

    p = sub.add_parser("flatten", parents=[common], help="build a flattening matrix (.smat)")
    _tensor_args(p)
    _plan_args(p)
    p.add_argument("-o", "--out", help="output file (default stdout)")

    p = sub.add_parser("rank", parents=[common], help="rank of a .smat matrix (over Q, or F_p with --prime)")
    p.add_argument("file")

    p = sub.add_parser("det", parents=[common], help="determinant of a square .smat matrix")
    p.add_argument("file")

    p = sub.add_parser("bound", parents=[common], help="border-rank lower bound from a flattening")
    _tensor_args(p)
    _plan_args(p)

    p = sub.add_parser("decompose", parents=[common], help="component / orbit decomposition report")
    _tensor_args(p)
    p.add_argument("--matrix", help="decompose a .smat file into connected components instead")

    p = sub.add_parser("certify", parents=[common], help="run a certification workflow")
    p.add_argument("tag", choices=("det-lower", "det4-rank12", "perm-table", "perm-finite-char"))
    p.add_argument("--n", type=int)
    p.add_argument("--char", type=int, default=0, help="characteristic for det4-rank12 (0 or an odd prime)")
    p.add_argument("--checkpoint", help="checkpoint file for perm-table")

    p = sub.add_parser("verify-certificate", parents=[common], help="re-verify a stored certificate")
    p.add_argument("file")
    p.add_argument("--no-replay", action="store_true", help="only re-check stored submatrices")

    p = sub.add_parser("verify-decomposition", parents=[common], help="check a rank-one decomposition exactly")
    _tensor_args(p)
    p.add_argument("--terms", required=True, help="decomposition file ('terms d m1 ... md' header)")
    return parser


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise _UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _load_tensor(args) -> tuple[Tensor, str]:
    if args.tensor:
        if args.n is None:
            raise _UsageError("--tensor needs --n")
        t = det_tensor(args.n) if args.tensor == "det" else perm_tensor(args.n)
        return t, f"{args.tensor}_{args.n}"
    if not args.file:
        raise _UsageError("give a tensor file or --tensor/--n")
    return Tensor.load(args.file), args.file


def _plan(args, order: int) -> FlatteningPlan:
    exps = _ints(args.exponents)
    if exps is None:
        return FlatteningPlan.default(order)
    return FlatteningPlan.parse(order, exps, args.contraction, args.output, _ints(args.modes))


def _deadline(args) -> float | None:
    b = getattr(args, "budget_seconds", None)
    return None if b is None else time.monotonic() + b


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, default=str))
    else:
        print(text)


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    t = det_tensor(args.n) if args.tensor == "det" else perm_tensor(args.n)
    _write(args, t.dumps())
    return EXIT_OK


def cmd_flatten(args) -> int:
    t, _ = _load_tensor(args)
    m = rkf_matrix(t, _plan(args, t.order))
    _write(args, m.dumps())
    return EXIT_OK


def cmd_rank(args) -> int:
    m = SparseMatrix.load(args.file)
    prime = getattr(args, "prime", None)
    if prime is not None:
        r = rank_mod_p(m, prime, deadline=_deadline(args))
        field = f"F_{prime}"
    elif m.field != "Q":
        r = rank_mod_p(m, m.field, deadline=_deadline(args))
        field = f"F_{m.field}"
    else:
        r = rank_rational(m)
        field = "Q"
    _emit(args, str(r), {"rank": r, "field": field, "shape": [m.rows, m.cols]})
    return EXIT_OK


def cmd_det(args) -> int:
    m = SparseMatrix.load(args.file)
    prime = getattr(args, "prime", None)
    if prime is not None:
        d = det_mod_p(m, prime)
        _emit(args, str(d), {"det_mod_p": d, "prime": prime})
        return EXIT_OK
    if args.exhaustive:
        bound = hadamard_bound(m)
        d = det_crt(m, primes_for_bound(bound), bound)
    else:
        d = det_rational(m)
    text = render_int(d) if isinstance(d, int) else str(d)
    _emit(args, text, {"det": str(d), "factored": text})
    return EXIT_OK


def _rank_for_bound(t: Tensor, plan: FlatteningPlan, prime: int, args) -> tuple[int, str]:
    n = t.order
    invariant = all(m == n for m in t.dims) and plan == FlatteningPlan.default(n) and n >= 6
    if invariant:
        res = symmetric_rank(t, plan, prime, threads=args.threads, deadline=_deadline(args))
        return res.rank, "orbit classes"
    return rank_mod_p(rkf_matrix(t, plan), prime, deadline=_deadline(args)), "direct"


def cmd_bound(args) -> int:
    t, name = _load_tensor(args)
    plan = _plan(args, t.order)
    prime = getattr(args, "prime", None) or PRIMES_62[0]
    r, how = _rank_for_bound(t, plan, prime, args)
    div = divisor(plan, t.dims)
    b = border_bound(r, div)
    _emit(args, str(b), {"tensor": name, "plan": str(plan), "prime": prime, "rank": r,
                         "divisor": div, "bound": b, "method": how})
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.matrix:
        m = SparseMatrix.load(args.matrix)
        dec = connected_components(m)
        lines = [f"# {len(dec.components)} components, {len(dec.orphan_cols)} orphan columns"]
        for c in dec.components:
            lines.append(f"rep {c.representative + 1}: {len(c.rows)}x{len(c.cols)} rows "
                         f"{[r + 1 for r in c.rows]} cols {[x + 1 for x in c.cols]}")
        if dec.orphan_cols:
            lines.append(f"orphans {[c + 1 for c in dec.orphan_cols]}")
        _emit(args, "\n".join(lines), {"components": [{"rows": [r + 1 for r in c.rows], "cols": [x + 1 for x in c.cols]}
                                                       for c in dec.components],
                                        "orphan_cols": [c + 1 for c in dec.orphan_cols]})
        return EXIT_OK
    t, _ = _load_tensor(args)
    prime = getattr(args, "prime", None) or PRIMES_62[0]
    res = symmetric_rank(t, None, prime, threads=args.threads, deadline=_deadline(args))
    if args.json:
        print(res.to_json())
    else:
        sys.stdout.write(res.report())
    return EXIT_OK


def cmd_certify(args) -> int:
    tag = args.tag
    prime = getattr(args, "prime", None)
    if tag == "det-lower":
        if args.n is None:
            raise _UsageError("certify det-lower needs --n")
        cert = certify_det_lower(args.n, prime, seed=args.seed, exhaustive=args.exhaustive)
    elif tag == "det4-rank12":
        cert = certify_det4_rank12(args.char, seed=args.seed, fast=args.fast)
    elif tag == "perm-table":
        if args.n is None:
            raise _UsageError("certify perm-table needs --n")
        cert = certify_perm_table(args.n, prime or PRIMES_62[0], threads=args.threads, deadline=_deadline(args),
                                  checkpoint=args.checkpoint, extended=args.extended)
    else:
        if args.n is None:
            raise _UsageError("certify perm-finite-char needs --n")
        cert = certify_perm_finite_char(args.n, seed=args.seed)
    path = write_certificate(cert, getattr(args, "out_dir", None) or default_out_dir())
    if args.json:
        print(cert.to_json())
    else:
        print(f"{cert.tag}: {cert.verdict}  {cert.get('claim', '')}".rstrip())
        for key in ("fact.size", "fact.rank", "fact.det", "fact.bound", "fact.lower_bound", "fact.partial_rank"):
            if key in cert.fields:
                v = cert[key]
                print(f"  {key[5:]} = {render_int(v) if key == 'fact.det' else v}")
        print(f"  certificate: {path}")
    if cert.get("status") == "budget-exceeded":
        return EXIT_BUDGET
    return EXIT_OK if cert.ok else EXIT_FAILED


def cmd_verify_certificate(args) -> int:
    cert = read_certificate(args.file)
    ok, msgs = verify_certificate(cert, replay=not args.no_replay)
    _emit(args, "\n".join([f"{cert.tag}: {'PASS' if ok else 'FAIL'}"] + ["  " + m for m in msgs]),
          {"tag": cert.tag, "pass": ok, "messages": msgs})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_decomposition(args) -> int:
    t, name = _load_tensor(args)
    terms = loads_terms(Path(args.terms).read_text(encoding="utf-8"))
    ok = verify_decomposition(t, terms)
    _emit(args, f"{name}: {len(terms)} rank-one terms {'sum exactly to' if ok else 'do NOT sum to'} the tensor",
          {"tensor": name, "terms": len(terms), "pass": ok})
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "gen": cmd_gen,
    "flatten": cmd_flatten,
    "rank": cmd_rank,
    "det": cmd_det,
    "bound": cmd_bound,
    "decompose": cmd_decompose,
    "certify": cmd_certify,
    "verify-certificate": cmd_verify_certificate,
    "verify-decomposition": cmd_verify_decomposition,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (_UsageError, KoszulError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
