"""Command-line front end.

    python -m saddleorder resonance-data 1 1 6
    python -m saddleorder saddle-values --input sys.json --max-order 10 --method both
    python -m saddleorder witness 1 1 6 --eps 1/1000 --jet 1
    python -m saddleorder certificate 1 1 6

Exit codes: 0 success, 1 usage or input error, 2 a mathematical expectation
was falsified (rank deficit, failed certificate, engine disagreement).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from math import gcd
from pathlib import Path

from .exactpoly import BivarPoly, format_scalar, to_rational
from .perturb import PERTSYS1, PERTSYS2, PerturbFamily, jet_saddle_values, linear_saddle_values
from .resonance import ResonanceError, resonance_data, row_index
from .saddle import (FIRST_INTEGRAL, NORMAL_FORM, SaddleSystem, SystemError_, default_max_order,
                     first_nonzero, saddle_values_integral, saddle_values_nf)
from .witness import (GateError, WitnessError, build_matrix_A, check_gate, find_unit, lift_degree,
                      rank_exact, synth_theorem1, system_to_doc,
                      theorem3_certificate, theorem4_certificate)

SCHEMA_VERSION = 1
JET_ENV = "SADDLEORDER_JET"


class UsageError(Exception):
    """Bad arguments, unreadable input or schema violations (exit 1)."""


class Falsified(Exception):
    """A mathematical expectation failed (exit 2); carries the report."""

    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- documents ----------------------------------------------------------------

def load_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: top level must be a JSON object")
    return doc


def _poly_field(doc: dict, key: str, required: bool = True) -> BivarPoly | None:
    if key not in doc:
        if required:
            raise UsageError(f"schema: missing field {key!r}")
        return None
    if not isinstance(doc[key], list):
        raise UsageError(f"schema: field {key!r} must be a list of {{i, j, c}} records")
    try:
        return BivarPoly.from_records(doc[key])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"schema: field {key!r}, {exc}") from exc


def _pq(doc: dict) -> tuple[int, int]:
    out = []
    for key in ("p", "q"):
        v = doc.get(key)
        if not isinstance(v, int) or isinstance(v, bool):
            raise UsageError(f"schema: field {key!r} must be an integer")
        out.append(v)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise UsageError(f"schema: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return out[0], out[1]


def parse_system(doc: dict) -> SaddleSystem:
    p, q = _pq(doc)
    P, Q, U = _poly_field(doc, "P"), _poly_field(doc, "Q"), _poly_field(doc, "U", required=False)
    try:
        return SaddleSystem(p, q, P, Q, U)
    except SystemError_ as exc:
        raise UsageError(f"schema: {exc}") from exc


def parse_family(doc: dict) -> PerturbFamily:
    p, q = _pq(doc)
    P, Q, U = _poly_field(doc, "P"), _poly_field(doc, "Q"), _poly_field(doc, "U", required=False)
    form = doc.get("eps_form", PERTSYS2 if U else PERTSYS1)
    if form not in (PERTSYS1, PERTSYS2):
        raise UsageError(f"schema: eps_form must be {PERTSYS1!r} or {PERTSYS2!r}, got {form!r}")
    if form == PERTSYS1 and U:
        raise UsageError("schema: eps_form 'pertsys1' does not take a unit factor U")
    if form == PERTSYS2 and not U:
        raise UsageError("schema: eps_form 'pertsys2' requires a nonzero U")
    try:
        return PerturbFamily(p, q, P, Q, U)
    except ValueError as exc:
        raise UsageError(f"schema: {exc}") from exc


def system_document(sys_: SaddleSystem) -> dict:
    doc = system_to_doc(sys_)
    doc["schema_version"] = SCHEMA_VERSION
    return doc


def digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def default_jet() -> int:
    raw = os.environ.get(JET_ENV, "1")
    try:
        J = int(raw)
    except ValueError as exc:
        raise UsageError(f"{JET_ENV}={raw!r} is not an integer") from exc
    if J < 1:
        raise UsageError(f"{JET_ENV} must be at least 1")
    return J


def _rational_arg(text: str):
    try:
        return to_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected an exact rational like 3/7, got {text!r}") from exc


def _records(values) -> list[dict]:
    return [{"k": rec.k, "value": format_scalar(rec.value)} for rec in values]


def _order_str(order, K) -> str | int:
    return order if order is not None else f">={K + 1}"


# -- commands -----------------------------------------------------------------

def cmd_saddle_values(args) -> dict:
    doc = args.doc
    sys_ = parse_system(doc)
    K = args.max_order or default_max_order(sys_)
    if K < 1:
        raise UsageError("--max-order must be positive")
    methods = {"nf": [NORMAL_FORM], "integral": [FIRST_INTEGRAL], "both": [NORMAL_FORM, FIRST_INTEGRAL]}[args.method]
    report = {"max_order": K, "methods": {}}
    orders = {}
    for method in methods:
        vals = saddle_values_nf(sys_, K) if method == NORMAL_FORM else saddle_values_integral(sys_, K)
        orders[method] = first_nonzero(vals)
        report["methods"][method] = {"values": _records(vals), "saddle_order": _order_str(orders[method], K)}
    agree = len(set(orders.values())) == 1
    report["saddle_order"] = _order_str(next(iter(orders.values())), K)
    report["agree"] = agree
    if not agree:
        raise Falsified(report, f"engines disagree on saddle order: {orders}")
    return report


def cmd_linearize(args) -> dict:
    doc = args.doc
    fam = parse_family(doc)
    K = args.max_order or 12
    J = args.jet or default_jet()
    lin = linear_saddle_values(fam, K)
    jets = jet_saddle_values(fam, K, J)
    rows, bad = [], []
    for k, (a, jet) in enumerate(zip(lin, jets), 1):
        rows.append({"k": k, "linear": str(a), "jet": format_scalar(jet)})
        if jet[0] != 0 or jet[1] != a:
            bad.append(k)
    order = next((r["k"] for r in rows if to_rational(r["linear"])), None)
    report = {"max_order": K, "jet_order": J, "eps_form": fam.eps_form, "values": rows,
              "first_order_saddle_order": _order_str(order, K), "agree": not bad}
    if bad:
        raise Falsified(report, f"linear extraction and jet engine disagree at k = {bad}")
    return report


def cmd_resonance_data(args) -> dict:
    try:
        rd = resonance_data(args.p, args.q, args.n)
        table = []
        for m in range(1, args.n + 2):
            r = row_index(rd, m)
            table.append({"m": m, "i": r.i_m, "j": r.j_m, "l": r.l_m})
    except ResonanceError as exc:
        raise UsageError(str(exc)) from exc
    return {"resonance": rd.as_dict(), "rows": table}


def _witness_args(args):
    try:
        check_gate(args.p, args.q, args.n, args.gate)
        return resonance_data(args.p, args.q, args.n)
    except (GateError, ResonanceError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_matrix(args) -> dict:
    rd = _witness_args(args)
    choice = find_unit(rd, seed=args.seed)
    A_sym = build_matrix_A(rd, choice.pencil)
    sym = rank_exact(A_sym)
    report = {"resonance": rd.as_dict(), "g_branch": choice.pencil.branch, "fallback_seed": choice.pencil.seed,
              "g": choice.pencil.g.to_records(), "f": choice.pencil.f.to_records(),
              "g_attempts": choice.attempts, "symbolic_rank": sym.as_dict()}
    if args.mu is not None:
        A = A_sym.at(args.mu)
        cert = rank_exact(A)
        report.update({"mu": str(args.mu), "rank_at_mu": cert.as_dict()})
        report["matrix"] = A.to_strings()
        rank = cert.rank
    else:
        report["matrix"] = A_sym.to_strings()
        report["mu"] = "symbolic"
        rank = sym.rank
    report["rank"] = rank
    report["full_rank"] = rank == rd.n + 1
    report["_csv"] = report["matrix"]
    if rank != rd.n + 1:
        raise Falsified(report, f"rank {rank} < n+1 = {rd.n + 1}")
    return report


def cmd_witness(args) -> dict:
    _witness_args(args)
    J = args.jet or default_jet()
    rep = synth_theorem1(args.p, args.q, args.n, epsilon=args.eps, J=J, gate=args.gate,
                         seed=args.seed, mu=args.mu)
    report = rep.as_dict()
    if not rep.ok:
        failed = [k for k, v in rep.checks.items() if not v]
        raise Falsified(report, f"witness checks failed: {failed}")
    return report


def cmd_certificate(args) -> dict:
    _witness_args(args)
    fn = theorem4_certificate if args.theorem == 4 else theorem3_certificate
    try:
        cert = fn(args.p, args.q, args.n, args.gate)
    except (GateError, ResonanceError) as exc:
        raise UsageError(str(exc)) from exc
    report = cert.as_dict()
    if not cert.verdict:
        raise Falsified(report, "non-membership certificate failed")
    return report


def cmd_lift(args) -> dict:
    doc = args.doc
    sys_ = parse_system(doc)
    if args.r < 0:
        raise UsageError("--r must be nonnegative")
    lifted = lift_degree(sys_, args.r)
    K = args.max_order or default_max_order(sys_)
    before = {m: first_nonzero(fn(sys_, K)) for m, fn in
              ((NORMAL_FORM, saddle_values_nf), (FIRST_INTEGRAL, saddle_values_integral))}
    after = {m: first_nonzero(fn(lifted, K)) for m, fn in
             ((NORMAL_FORM, saddle_values_nf), (FIRST_INTEGRAL, saddle_values_integral))}
    preserved = len(set(before.values()) | set(after.values())) == 1
    report = {"r": args.r, "max_order": K, "degree_before": sys_.degree, "degree_after": lifted.degree,
              "saddle_order_before": {m: _order_str(v, K) for m, v in before.items()},
              "saddle_order_after": {m: _order_str(v, K) for m, v in after.items()},
              "preserved": preserved, "system": system_document(lifted)}
    if not preserved:
        raise Falsified(report, "lift changed the saddle order")
    return report


def cmd_verify_homo(args) -> dict:
    doc = args.doc
    sys_ = parse_system(doc)
    P, Q = sys_.nonlinear()
    degs = {i + j for i, j in list(P.terms) + list(Q.terms)}
    if len(degs) > 1:
        raise UsageError(f"verify-homo: nonlinearity is not homogeneous (degrees {sorted(degs)})")
    if not degs:
        raise UsageError("verify-homo: system has no nonlinear terms")
    n = degs.pop()
    d = gcd(n - 1, sys_.p + sys_.q)
    n1 = (n - 1) // d
    K = args.max_order or default_max_order(sys_)
    vals = saddle_values_nf(sys_, K)
    constrained = [r.k for r in vals if r.k % n1]
    violations = [r.k for r in vals if r.k % n1 and r.value]
    report = {"degree": n, "d": d, "n1": n1, "max_order": K, "constrained": constrained,
              "violations": violations, "values": _records(vals), "passed": not violations}
    if violations:
        raise Falsified(report, f"L_k nonzero at k = {violations} with n1 = {n1} not dividing k")
    return report


def cmd_selftest(args) -> dict:
    from .acceptance import run_all

    only = set(args.only) if args.only else None
    results = run_all(only, echo=lambda line: print(line, file=sys.stderr, flush=True))
    report = {"criteria": [{"number": r.number, "title": r.title, "ok": r.ok, "detail": r.detail,
                            "seconds": round(r.seconds, 3)} for r in results],
              "passed": sum(r.ok for r in results), "total": len(results)}
    if not all(r.ok for r in results):
        raise Falsified(report, f"{report['total'] - report['passed']} acceptance criteria failed")
    return report


def _inputs(args) -> dict:
    skip = {"fn", "verbose", "output", "doc", "input"}
    out = {k: (v if v is None or isinstance(v, (int, list)) else str(v))
           for k, v in sorted(vars(args).items()) if k not in skip}
    if getattr(args, "doc", None) is not None:
        out["document"] = args.doc
    return out


# -- output -------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj if not isinstance(obj, list) else json.dumps(obj)


def render(report: dict, fmt: str) -> str:
    table = report.pop("_csv", None)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if table is not None:
            w.writerows(table)
        else:
            w.writerow(["key", "value"])
            w.writerows(_flatten(report))
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{k}: {v}" for k, v in _flatten(report))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="saddleorder", description="Exact saddle values and saddle-order witnesses.")
    ap.add_argument("-v", "--verbose", action="store_true")
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "text", "csv"), default="json")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("saddle-values", parents=[common], help="saddle values by one or both engines")
    s.add_argument("--input", required=True, help="system JSON ('-' for stdin)")
    s.add_argument("--max-order", type=int)
    s.add_argument("--method", choices=("nf", "integral", "both"), default="both")
    s.set_defaults(fn=cmd_saddle_values)

    s = sub.add_parser("linearize", parents=[common], help="first-order-in-eps saddle values of a family")
    s.add_argument("--input", required=True)
    s.add_argument("--max-order", type=int)
    s.add_argument("--jet", type=int, help=f"jet order (default ${JET_ENV} or 1)")
    s.set_defaults(fn=cmd_linearize)

    s = sub.add_parser("resonance-data", parents=[common], help="number-theoretic invariants")
    for name in ("p", "q", "n"):
        s.add_argument(name, type=int)
    s.set_defaults(fn=cmd_resonance_data)

    def pqn(s):
        for name in ("p", "q", "n"):
            s.add_argument(name, type=int)
        s.add_argument("--gate", type=int, help="lowest admissible n (default p+q+3)")

    s = sub.add_parser("matrix", parents=[common], help="coefficient matrix A and its rank")
    pqn(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--mu", type=_rational_arg)
    g.add_argument("--symbolic", action="store_true", help="keep mu symbolic (default)")
    s.add_argument("--seed", type=int, default=0, help="seed of the randomized g fallback")
    s.set_defaults(fn=cmd_matrix)

    s = sub.add_parser("witness", parents=[common], help="synthesize a Theorem 1 witness")
    pqn(s)
    s.add_argument("--eps", type=_rational_arg, default=to_rational("1/1000"))
    s.add_argument("--jet", type=int, help=f"eps-jet order J (default ${JET_ENV} or 1)")
    s.add_argument("--mu", type=_rational_arg)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_witness)

    s = sub.add_parser("certificate", parents=[common], help="first-order non-membership certificate")
    pqn(s)
    s.add_argument("--theorem", type=int, choices=(3, 4), default=3)
    s.set_defaults(fn=cmd_certificate)

    s = sub.add_parser("lift", parents=[common], help="multiply a system by (1 + x^r)")
    s.add_argument("--input", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--max-order", type=int)
    s.set_defaults(fn=cmd_lift)

    s = sub.add_parser("verify-homo", parents=[common], help="check L_k = 0 for n1 not dividing k")
    s.add_argument("--input", required=True)
    s.add_argument("--max-order", type=int)
    s.set_defaults(fn=cmd_verify_homo)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", type=int, nargs="+", metavar="N")
    s.set_defaults(fn=cmd_selftest)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    status, message = 0, None
    try:
        args.doc = load_json(args.input) if getattr(args, "input", None) else None
        body = args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Falsified as exc:
        body, status, message = exc.report, 2, str(exc)
    except WitnessError as exc:
        body, status, message = {}, 2, str(exc)
    report = {"schema_version": SCHEMA_VERSION, "command": args.command,
              "inputs_digest": digest(_inputs(args)),
              "status": "ok" if status == 0 else "falsified"}
    report.update(body)
    if message:
        report["error"] = message
    report["wall_time"] = round(time.perf_counter() - t0, 4)
    print(render(report, args.output), file=out)
    if message:
        print(f"falsified: {message}", file=sys.stderr)
    return status


def main() -> int:
    return run()


if __name__ == "__main__":
    raise SystemExit(main())
