"""xi-audit: evaluate functions, manage zero catalogs, run audits.

Exit codes: 0 ok (verdicts are data, not errors), 2 parse or io failure,
3 domain violation, 4 precision exhausted, 5 catalog validation failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import audit as A
from .balls import ComplexBall, RealBall
from .catalog import (
    count_vs_formula,
    open_catalog,
    refine_below,
    refine_zero,
    save_catalog,
)
from .config import Config
from .errors import (
    CatalogError,
    ChecksumMismatch,
    DomainViolation,
    InvalidArgument,
    MalformedLine,
    PrecisionExhausted,
    TailValidationError,
    TBeyondCatalog,
    VersionMismatch,
)
from .render import ball_dict, ball_text, report_json, report_text
from .special import gamma, psi, xi, zeta
from .sums import validate_envelope

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_PRECISION, EXIT_VALIDATION = 0, 2, 3, 4, 5
COUNT_GRID = (50, 100, 500, 1000, 10000)

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^[+-]?{_NUM}$")
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)[ij]$")
_IMAG = re.compile(rf"^(?P<re>)(?P<im>[+-]?(?:{_NUM})?)[ij]$")


class UsageError(Exception):
    pass


def parse_point(text):
    """Exact decimal or complex literal: '2', '-3.5', '0.5+14.1i', '3j'."""
    s = text.replace(" ", "")
    if _REAL.match(s):
        return Fraction(s)
    m = _COMPLEX.match(s) or _IMAG.match(s)
    if not m:
        raise UsageError(f"cannot parse point {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im = m.group("im")
    if im in ("", "+"):
        im_part = Fraction(1)
    elif im == "-":
        im_part = Fraction(-1)
    else:
        im_part = Fraction(im)
    return re_part, im_part


def _point_ball(point, prec):
    if isinstance(point, tuple):
        return ComplexBall(RealBall.exact(point[0], prec), RealBall.exact(point[1], prec))
    return RealBall.exact(point, prec)


# -- argument parsing --------------------------------------------------------------


def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--prec-bits", type=int, default=d(None), dest="prec_bits")
    p.add_argument("--prec-cap", type=int, default=d(None), dest="prec_cap")
    p.add_argument("--zeros-file", default=d(None), dest="zeros_file")
    p.add_argument("--max-zeros", type=int, default=d(None), dest="max_zeros")
    p.add_argument("--format", choices=("text", "json"), default=d(None), dest="format")
    p.add_argument("--tail-slack", type=float, default=d(None), dest="tail_slack")
    p.add_argument("--table-accuracy", type=float, default=d(None), dest="table_accuracy")
    p.add_argument("--refine-below", type=float, default=d(None), dest="refine_below",
                   help="refine zeros below this ordinate before direct sums (0 disables)")
    p.add_argument("--workers", type=int, default=d(None), dest="workers")


def build_parser():
    ap = argparse.ArgumentParser(prog="xi-audit", description=__doc__.splitlines()[0])
    _add_globals(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate zeta, gamma, xi or psi")
    _add_globals(ev, suppress=True)
    ev.add_argument("function", choices=("zeta", "gamma", "xi", "psi"))
    ev.add_argument("point")

    zp = sub.add_parser("zeros", help="validate, refine or count a zero table")
    zsub = zp.add_subparsers(dest="zeros_command", required=True)
    zv = zsub.add_parser("validate")
    _add_globals(zv, suppress=True)
    zc = zsub.add_parser("count")
    _add_globals(zc, suppress=True)
    zc.add_argument("--T", required=True, dest="T")
    zr = zsub.add_parser("refine")
    _add_globals(zr, suppress=True)
    zr.add_argument("--index", type=int, action="append", required=True)
    zr.add_argument("--target", type=float, default=1e-30)
    zr.add_argument("--cache", required=True)

    au = sub.add_parser("audit", help="recompute the printed claims")
    _add_globals(au, suppress=True)
    au.add_argument("scope", choices=("section4", "section5", "all"))
    au.add_argument("--z1", default=A.Z1_PRINTED, help="point for the psi-pair claims")
    au.add_argument("--z5", default=A.Z5_PRINTED, help="point for the positivity claim")
    return ap


def make_config(args):
    kw = {}
    for name, field in (("prec_bits", "precision_bits"), ("prec_cap", "precision_cap"),
                        ("zeros_file", "zeros_file"), ("max_zeros", "max_zeros"),
                        ("format", "output_format"), ("tail_slack", "tail_slack_C"),
                        ("table_accuracy", "table_accuracy"),
                        ("refine_below", "refine_below"), ("workers", "workers")):
        v = getattr(args, name, None)
        if v is not None:
            kw[field] = v
    return Config(**kw)


# -- commands ------------------------------------------------------------------------


def _emit(cfg, text, payload, out):
    if cfg.output_format == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(text)


def cmd_eval(cfg, args, out):
    point = parse_point(args.point)
    p = cfg.precision_bits
    fn = {"zeta": zeta, "gamma": gamma, "xi": xi, "psi": psi}[args.function]
    if args.function == "psi" and isinstance(point, tuple):
        raise DomainViolation("psi is defined on real z only")
    val = fn(_point_ball(point, p), prec=p)
    text = (f"{args.function}({args.point}) = {ball_text(val, 40)}\n"
            f"precision_bits: {val.prec}\n")
    payload = {"function": args.function, "point": args.point, "value": ball_dict(val)}
    _emit(cfg, text, payload, out)
    return EXIT_OK


def _catalog(cfg):
    path = cfg.resolved_zeros_file
    if not path:
        raise UsageError("no zero table: pass --zeros-file or set XIAUDIT_ZEROS")
    return open_catalog(path, cfg.table_accuracy, cfg.max_zeros)


def cmd_zeros(cfg, args, out):
    sc = args.zeros_command
    if sc == "refine":
        cache = Path(args.cache)
        cat = open_catalog(cache) if cache.exists() else _catalog(cfg)
        lines = []
        for idx in args.index:
            pos = idx - cat.entries[0].index
            if not 0 <= pos < len(cat.entries):
                raise UsageError(f"index {idx} outside the catalog")
            e = refine_zero(cat.entries[pos], args.target,
                            max_precision_bits=cfg.precision_cap)
            cat = cat.with_entry(e)
            lines.append(f"zero {idx}: {ball_text(e.beta, 45)} ({e.source})")
        save_catalog(cat, cache)
        lines.append(f"cache: {cache}")
        _emit(cfg, "\n".join(lines) + "\n",
              {"refined": [{"index": i, "beta": ball_dict(cat.entries[i - cat.entries[0].index].beta)}
                           for i in args.index], "cache": str(cache)}, out)
        return EXIT_OK

    cat = _catalog(cfg)
    if sc == "count":
        chk = count_vs_formula(cat, RealBall.exact(Fraction(args.T), 128), cfg.tail_slack_C)
        text = (f"T: {args.T}\ncounted: {chk.counted}\n"
                f"main_term: {ball_text(chk.main_term, 15)}\n"
                f"slack bound: {ball_text(chk.slack_bound, 8)}\n"
                f"consistent: {'yes' if chk.consistent else 'no'}\n")
        payload = {"T": args.T, "counted": chk.counted, "main_term": ball_dict(chk.main_term),
                   "slack_bound": ball_dict(chk.slack_bound), "consistent": chk.consistent}
        _emit(cfg, text, payload, out)
        return EXIT_OK if chk.consistent else EXIT_VALIDATION

    # validate
    stats = cat.stats()
    checks = []
    for T in COUNT_GRID:
        try:
            checks.append(count_vs_formula(cat, RealBall.exact(T, 128), cfg.tail_slack_C))
        except TBeyondCatalog:
            pass
    env = validate_envelope(cat, cfg.tail_slack_C) if cat.entries[0].index == 1 else None
    ok = all(c.consistent for c in checks) and (env is None or env.ok)
    lines = [f"{k}: {v}" for k, v in stats.items()]
    for c in checks:
        lines.append(f"count T={c.T.mid_str(8)}: {c.counted} vs {c.main_term.mid_str(10)} "
                     f"({'ok' if c.consistent else 'INCONSISTENT'})")
    if env is not None:
        lines.append(f"envelope C={env.slack}: worst ratio {env.worst_ratio:.4f} at "
                     f"t={env.worst_T:.3f}, beyond cutoff {env.beyond_ratio:.4f} "
                     f"({'ok' if env.ok else 'FAILED'})")
    lines.append(f"valid: {'yes' if ok else 'no'}")
    payload = {"stats": stats,
               "counts": [{"T": c.T.mid_str(8), "counted": c.counted,
                           "main_term": ball_dict(c.main_term), "consistent": c.consistent}
                          for c in checks],
               "envelope_ok": None if env is None else env.ok, "valid": ok}
    _emit(cfg, "\n".join(lines) + "\n", payload, out)
    return EXIT_OK if ok else EXIT_VALIDATION


def build_report(cfg, scope, z1, z5):
    """Assemble the audit report; returns (report, failure or None)."""
    report = A.AuditReport(config=cfg.snapshot())
    report.config["z1"] = z1
    report.config["z5"] = z5
    failure = None
    if scope in ("section4", "all"):
        cat = _catalog(cfg)
        if cfg.refine_below > 0:
            cat = refine_below(cat, cfg.refine_below, cfg.refine_target,
                               max_precision_bits=cfg.precision_cap)
        req = A.AuditRequest(min(max(cfg.precision_bits, 512), cfg.precision_cap),
                             cfg.precision_cap, 1e-20)
        try:
            sub = A.audit_contradiction(z1, cat, req, tail_slack=cfg.tail_slack_C,
                                        workers=cfg.workers)
            report.findings += sub.findings
            report.verdicts += sub.verdicts
            report.summary += sub.summary
        except PrecisionExhausted as exc:
            failure = exc
    if scope in ("section5", "all") and failure is None:
        req = A.AuditRequest(min(max(cfg.precision_bits, 256), cfg.precision_cap),
                             cfg.precision_cap, 1e-12)
        try:
            f = A.audit_corollary_5_2(z5, req)
            report.findings.append(f)
            report.summary.append(f"EQ_5_16: printed value {f.containment}; "
                                  f"{f.notes.rsplit('; ', 1)[-1]}")
        except PrecisionExhausted as exc:
            failure = exc
    return report, failure


def cmd_audit(cfg, args, out):
    report, failure = build_report(cfg, args.scope, args.z1, args.z5)
    if failure is not None:
        report.summary.append(f"incomplete: {failure}")
    out.write(report_json(report) if cfg.output_format == "json" else report_text(report))
    return EXIT_PRECISION if failure is not None else EXIT_OK


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = make_config(args)
        handler = {"eval": cmd_eval, "zeros": cmd_zeros, "audit": cmd_audit}[args.command]
        return handler(cfg, args, out)
    except (UsageError, MalformedLine, VersionMismatch, ChecksumMismatch, OSError) as exc:
        print(f"xi-audit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CatalogError, TailValidationError) as exc:
        print(f"xi-audit: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PrecisionExhausted as exc:
        print(f"xi-audit: precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except DomainViolation as exc:
        print(f"xi-audit: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InvalidArgument, ValueError) as exc:
        print(f"xi-audit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
