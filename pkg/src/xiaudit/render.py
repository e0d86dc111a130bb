"""Text and JSON rendering of enclosures and audit reports.

JSON numbers are decimal strings: a high-precision midpoint does not survive
a trip through binary64.
"""
from __future__ import annotations

import json

from .balls import ComplexBall, RealBall, decimal_ball, sci_str

TEXT_DIGITS = 25


def ball_dict(ball, digits=None):
    if isinstance(ball, ComplexBall):
        return {"re": ball_dict(ball.re, digits), "im": ball_dict(ball.im, digits)}
    mid, rad = decimal_ball(ball, digits)
    return {"mid": mid, "rad": rad, "prec_bits": ball.prec}


def metric_dict(x, decimals=6):
    """A float metric rendered with its display rounding as the radius."""
    return {"mid": f"{x:.{decimals}f}", "rad": f"5e-{decimals + 1}", "prec_bits": 53}


def ball_text(ball, digits=TEXT_DIGITS):
    if isinstance(ball, ComplexBall):
        return f"({ball_text(ball.re, digits)}) + ({ball_text(ball.im, digits)})i"
    d = min(digits, max(2, ball.prec // 3))
    mid, rad = decimal_ball(ball, d)
    return f"{mid} +/- {rad}"


def finding_dict(f):
    return {
        "claim_id": f.claim_id,
        "inputs": dict(f.inputs),
        "recomputed": ball_dict(f.recomputed),
        "paper_value": f.paper_value,
        "containment": f.containment,
        "digits_lost": metric_dict(f.digits_lost),
        "precision_bits_used": f.precision_bits_used,
        "notes": f.notes,
    }


def verdict_dict(v):
    return {"left": v.left, "right": v.right, "relation": v.relation,
            "decided": v.decided, "holds": v.holds}


def report_dict(report):
    return {
        "config": dict(report.config),
        "findings": [finding_dict(f) for f in report.findings],
        "verdicts": [verdict_dict(v) for v in report.verdicts],
        "summary": list(report.summary),
    }


def report_json(report):
    return json.dumps(report_dict(report), indent=2) + "\n"


def report_text(report):
    out = []
    for f in report.findings:
        out.append(f"[{f.claim_id}] {ball_text(f.recomputed)}")
        out.append(f"    width {sci_str(f.recomputed.width(), 4)}, "
                   f"{f.precision_bits_used} bits, digits lost {f.digits_lost:.2f}")
        if f.paper_value is not None:
            out.append(f"    printed {f.paper_value}: {f.containment}")
        if f.notes:
            out.append(f"    {f.notes}")
    for v in report.verdicts:
        state = "undecided" if not v.decided else ("yes" if v.holds else "no")
        out.append(f"verdict {v.left} {v.relation} {v.right}: {state}")
    out.extend(report.summary)
    return "\n".join(out) + "\n"
