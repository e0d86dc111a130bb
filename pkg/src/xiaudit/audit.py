"""Recompute the printed numerical claims with certified enclosures.

Every finding is a ball plus a containment call against the printed digits,
and every ordering question is answered yes, no or undecided.  Nothing here
forces a decision out of overlapping enclosures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional

import gmpy2

from .balls import PREC_CAP, UP, RealBall, _ctx, const_pi
from .errors import DomainViolation, InvalidArgument, PrecisionExhausted
from .special import psi
from .sums import (
    SUM_PREC,
    TAIL_T_MIN,
    reciprocal_constant,
    sum_lambda_power,
    tail_bound,
    _lambda_from_bounds,
)

INSIDE, OUTSIDE, UNDECIDED = "inside", "outside", "undecided"

Z1_PRINTED = "1.0e-10"
Z5_PRINTED = "0.005025"
PRINTED = {
    "EQ_4_22": "3.710063643746487e-05",
    "EQ_4_23": "3.710063643739287e-05",
    "EQ_4_26": "3.71006364375369e-05",
    "EQ_5_16": "3.73644298e-08",
}


@dataclass(frozen=True)
class AuditRequest:
    precision_bits: int = 512
    max_precision_bits: int = PREC_CAP
    target_width: float = 1e-20

    def __post_init__(self):
        if not 32 <= self.precision_bits <= self.max_precision_bits:
            raise InvalidArgument("need 32 <= precision_bits <= max_precision_bits")
        if not self.target_width > 0:
            raise InvalidArgument("target_width must be positive")


SECTION4 = AuditRequest(512, PREC_CAP, 1e-20)
SECTION5 = AuditRequest(256, PREC_CAP, 1e-12)


@dataclass(frozen=True)
class AuditFinding:
    claim_id: str
    inputs: dict
    recomputed: RealBall
    paper_value: Optional[str]
    containment: str
    digits_lost: float
    precision_bits_used: int
    notes: str = ""


@dataclass(frozen=True)
class Verdict:
    left: str
    right: str
    relation: str
    decided: bool
    holds: Optional[bool]


@dataclass
class AuditReport:
    findings: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)

    def finding(self, claim_id):
        for f in self.findings:
            if f.claim_id == claim_id:
                return f
        raise KeyError(claim_id)


# -- helpers -----------------------------------------------------------------------


def _z_source(z):
    """Keep decimal inputs decimal so that 1e-10 means exactly 10^-10."""
    if isinstance(z, RealBall):
        return z
    if isinstance(z, float):
        return str(z)
    return z


def _z_ball(z, prec):
    if isinstance(z, RealBall):
        return z.with_prec(max(prec, z.prec))
    return RealBall.exact(z, prec)


def _z_fraction(z):
    if isinstance(z, RealBall):
        return _q(z.mid) if z.is_exact() else None
    return Fraction(str(z)) if not isinstance(z, Fraction) else z


def _q(x):
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _z_text(z):
    if isinstance(z, RealBall):
        return z.mid_str()
    return str(z)


def _same_point(z, printed_at):
    q = _z_fraction(z)
    return q is not None and q == Fraction(printed_at)


def last_digit_unit(printed):
    """Place value of the last printed digit, e.g. 1e-20 for '3.710...487e-05'."""
    d = Decimal(printed)
    return Fraction(1, 1) * Fraction(10) ** d.as_tuple().exponent


def containment(ball, printed):
    """Containment call plus a note on whether the printed digits are a
    correct rounding of the enclosure."""
    if printed is None:
        return UNDECIDED, "no printed value to compare at this input"
    pv = Fraction(printed)
    u = last_digit_unit(printed)
    lo, hi = ball.lower(), ball.upper()
    lo_q, hi_q = _q(lo), _q(hi)
    if lo_q <= pv <= hi_q:
        call = INSIDE
    elif hi_q - lo_q <= u or pv + u / 2 < lo_q or pv - u / 2 > hi_q:
        call = OUTSIDE
    else:
        call = UNDECIDED
    if pv - u / 2 <= lo_q and hi_q <= pv + u / 2:
        note = "printed digits are a correct rounding of the enclosure"
    elif pv + u / 2 < lo_q or pv - u / 2 > hi_q:
        off = (pv - (lo_q + hi_q) / 2) / u
        note = f"printed digits are not a rounding of the enclosure (off by {float(off):.4g} units in the last place)"
    else:
        note = "printed rounding interval overlaps the enclosure only partly"
    return call, note


def _digits_lost(result, *terms):
    big = max(abs(float(t.mid)) for t in terms)
    r = abs(float(result.mid))
    if r == 0 or big == 0:
        return float("inf") if big else 0.0
    return math.log10(big / r)


def compare(left_id, left, right_id, right, relation):
    """Three-valued ordered comparison of two enclosures."""
    if relation == ">":
        holds = True if left.certainly_gt(right) else (
            False if left.upper() <= right.lower() else None)
    elif relation == "<":
        holds = True if left.certainly_lt(right) else (
            False if left.lower() >= right.upper() else None)
    else:
        raise InvalidArgument(f"unknown relation {relation!r}")
    return Verdict(left_id, right_id, relation, holds is not None, holds)


def _check_z4(z):
    zb = _z_ball(z, 64)
    if not (zb.is_positive() and zb.certainly_lt(RealBall.exact("0.25"))):
        raise DomainViolation("z1 must satisfy 0 < z1 < 1/4")


# -- psi-pair claims --------------------------------------------------------------------


@dataclass(frozen=True)
class PsiPair:
    psi_plus: RealBall
    psi_minus: RealBall
    sum: RealBall
    diff: RealBall
    digits_lost: float
    precision_bits: int


def _pair_at(z, prec):
    zb = _z_ball(z, prec + 32)
    plus = psi(zb, prec=prec)
    minus = psi(-zb, prec=prec)
    return plus, minus


def _escalate(compute, accept, req):
    p = req.precision_bits
    while True:
        out = compute(p)
        if accept(out):
            return out, p
        if p >= req.max_precision_bits:
            raise PrecisionExhausted(
                f"target not reached at {p} bits", achieved=out, precision_bits=p)
        p = min(2 * p, req.max_precision_bits)


def audit_psi_pair(z1, req=SECTION4, rel_target=1e-20):
    """psi(z1) and psi(-z1) with the sum resolved to ``rel_target`` relative width."""
    z1 = _z_source(z1)
    _check_z4(z1)

    def compute(p):
        return _pair_at(z1, p)

    def accept(pair):
        s = pair[0] + pair[1]
        return not s.contains_zero() and s.width() <= rel_target * abs(float(s.mid))

    (plus, minus), p = _escalate(compute, accept, req)
    s = plus + minus
    return PsiPair(plus, minus, s, plus - minus, _digits_lost(s, plus), p)


def _section4_values(z1, p):
    plus, minus = _pair_at(z1, p)
    zb = _z_ball(z1, p + 32)
    lam = reciprocal_constant(p)
    zz = zb.sqr()
    a = lam.mul_2exp(1) / zb        # 2 lambda / z
    bp = plus.mul_2exp(1) / zz      # 2 psi(z) / z^2
    bm = minus.mul_2exp(1) / zz     # 2 psi(-z) / z^2
    vals = {
        "EQ_4_22": -(plus + minus) / zz,
        "EQ_4_23": -a - bm,
        "EQ_4_26": a - bp,
    }
    lost = {
        "EQ_4_22": _digits_lost(vals["EQ_4_22"], plus / zz),
        "EQ_4_23": _digits_lost(vals["EQ_4_23"], a, bm),
        "EQ_4_26": _digits_lost(vals["EQ_4_26"], a, bp),
    }
    return vals, lost, (plus, minus)


def _section4(z1, req, need_order=False):
    z1 = _z_source(z1)
    _check_z4(z1)
    target = req.target_width

    def accept(out):
        vals = out[0]
        if any(v.width() > target for v in vals.values()):
            return False
        if need_order:
            return compare("EQ_4_26", vals["EQ_4_26"], "EQ_4_23", vals["EQ_4_23"], ">").decided
        return True

    return _escalate(lambda p: _section4_values(z1, p), accept, req), z1


def _finding(claim_id, z, ball, lost, p, printed_z, extra_inputs=None, note=""):
    printed = PRINTED[claim_id] if _same_point(z, printed_z) else None
    call, cnote = containment(ball, printed)
    inputs = {"z": _z_text(z), "precision_bits": str(p)}
    inputs.update(extra_inputs or {})
    notes = "; ".join(x for x in (cnote, note) if x)
    return AuditFinding(claim_id, inputs, ball, printed, call, round(lost, 6), p, notes)


def _section4_findings(z1, req, need_order=False):
    ((vals, lost, _), p), z1 = _section4(z1, req, need_order)
    return [_finding(cid, z1, vals[cid], lost[cid], p, Z1_PRINTED) for cid in
            ("EQ_4_22", "EQ_4_23", "EQ_4_26")], p


def audit_eq_4_22(z1, req=SECTION4):
    """-(psi(z1) + psi(-z1)) / z1^2."""
    return _section4_findings(z1, req)[0][0]


def audit_eq_4_23(z1, req=SECTION4):
    """-2 lambda / z1 - 2 psi(-z1) / z1^2 with lambda the analytic constant."""
    return _section4_findings(z1, req)[0][1]


def audit_eq_4_26(z1, req=SECTION4):
    """2 lambda / z1 - 2 psi(z1) / z1^2."""
    return _section4_findings(z1, req)[0][2]


def direct_sum_finding(catalog, *, tail_slack=2.0, workers=1, prec=SUM_PREC):
    res = sum_lambda_power(catalog, 2, tail_slack=tail_slack, prec=prec, workers=workers)
    if res.enclosure is None:
        raise InvalidArgument(res.notes)
    refined = sum(1 for e in catalog.entries if e.source == "refined")
    inputs = {
        "catalog": catalog.source_descriptor,
        "terms_used": str(res.terms_used),
        "refined_entries": str(refined),
        "cutoff_T": res.cutoff_T.mid_str(15),
        "table_accuracy": repr(catalog.table_accuracy),
        "tail_slack": repr(res.tail_slack),
    }
    note = (f"partial {res.partial.mid_str(20)} +/- {res.partial.rad_str()}; "
            f"tail in [{res.tail_low.mid_str(8)}, {res.tail_high.mid_str(8)}]")
    return AuditFinding("DIRECT_SUM", inputs, res.enclosure, None, UNDECIDED, 0.0, prec,
                        "independent arbiter, no printed value; " + note)


def _placement(above_lower, below_upper):
    """Where the direct sum sits relative to the lower and upper bound."""
    if above_lower.holds and below_upper.holds:
        return "between"
    if above_lower.holds is False:
        return "below"
    if below_upper.holds is False:
        return "above"
    return "undecided"


def audit_contradiction(z1, catalog, req=SECTION4, *, tail_slack=2.0, workers=1):
    """Findings 4.22/4.23/4.26, the direct-sum arbiter and three verdicts."""
    findings, p = _section4_findings(z1, req, need_order=True)
    f = {x.claim_id: x for x in findings}
    direct = direct_sum_finding(catalog, tail_slack=tail_slack, workers=workers)
    va = compare("EQ_4_26", f["EQ_4_26"].recomputed, "EQ_4_23", f["EQ_4_23"].recomputed, ">")
    vb_lo = compare("DIRECT_SUM", direct.recomputed, "EQ_4_26", f["EQ_4_26"].recomputed, ">")
    vb_hi = compare("DIRECT_SUM", direct.recomputed, "EQ_4_23", f["EQ_4_23"].recomputed, "<")
    report = AuditReport(findings + [direct], [va, vb_lo, vb_hi])
    order = {True: "EQ_4_26 > EQ_4_23", False: "EQ_4_26 <= EQ_4_23", None: "undecided"}[va.holds]
    report.summary.append(
        f"printed values order EQ_4_23 < EQ_4_26; recomputed enclosures give {order}")
    report.summary.append(
        f"direct sum relative to [EQ_4_26, EQ_4_23]: {_placement(vb_lo, vb_hi)}")
    for x in findings:
        report.summary.append(f"{x.claim_id}: printed value {x.containment}")
    return report


# -- positivity claim ----------------------------------------------------------------------


def _section5_value(z, p):
    zb = _z_ball(z, p + 32)
    plus = psi(zb, prec=p)
    minus = psi(-zb, prec=p)
    lam = reciprocal_constant(p)
    first = lam / zb.sqr()
    second = (plus - minus) / (zb ** 3).mul_2exp(1)
    return first - second, _digits_lost(first - second, first, second)


def audit_corollary_5_2(z, req=SECTION5):
    """(1/z^2)(lambda + mu) - (Psi(z) - Psi(-z)) / (2 z^3), lambda + mu analytic."""
    z = _z_source(z)
    zb = _z_ball(z, 64)
    if not (zb.is_positive() and zb.certainly_lt(RealBall.exact("0.25"))):
        raise DomainViolation("z must satisfy 0 < z < 1/4 so that Psi(-z) stays real")
    (val, lost), p = _escalate(lambda q: _section5_value(z, q),
                               lambda out: out[0].width() <= req.target_width, req)
    if val.is_negative():
        sign = "certified negative: contradicts the claimed positivity"
    elif val.is_positive():
        sign = "certified positive"
    else:
        sign = "sign undecided at this precision"
    q = _z_fraction(z)
    extra = {}
    if q is not None:
        one_m = 1 - 4 * q
        extra["one_minus_4z"] = str(Decimal(one_m.numerator) / Decimal(one_m.denominator))
    return _finding("EQ_5_16", z, val, lost, p, Z5_PRINTED, extra, "sign: " + sign)


def sign_of(finding):
    b = finding.recomputed
    return 1 if b.is_positive() else (-1 if b.is_negative() else 0)


# -- series truncations ----------------------------------------------------------------


@dataclass(frozen=True)
class SeriesRow:
    n_terms: int
    truncation: RealBall
    residual: RealBall
    predicted_low: Optional[RealBall]
    predicted_high: Optional[RealBall]
    consistent: Optional[bool]


@dataclass(frozen=True)
class SeriesReport:
    z: str
    psi: RealBall
    rows: tuple


def _log_terms(entries, z, prec):
    """Balls for log(1 + lambda_m z), one per entry."""
    D = _ctx(prec, gmpy2.RoundDown)
    U = _ctx(prec, gmpy2.RoundUp)
    zl, zh = z.lower(), z.upper()
    out = []
    for e in entries:
        lam = _lambda_from_bounds(e.beta.lower(), e.beta.upper(), prec, 1)
        ll, lh = lam.lower(), lam.upper()
        lo = min(D.mul(ll, zl), D.mul(ll, zh), D.mul(lh, zl), D.mul(lh, zh))
        hi = max(U.mul(ll, zl), U.mul(ll, zh), U.mul(lh, zl), U.mul(lh, zh))
        out.append(RealBall.from_bounds(D.log1p(lo), U.log1p(hi), prec))
    return out


def series_consistency(z, catalog, n_terms_list, prec=SUM_PREC, *, tail_slack=2.0):
    """Truncations of sum log(1 + lambda_m z) against psi(z)."""
    z = _z_source(z)
    zb = _z_ball(z, prec)
    bound = (const_pi(prec).sqr().mul_2exp(2)).inv()
    if not abs(zb).certainly_lt(bound):
        raise DomainViolation("series check needs |z| < 1/(4 pi^2)")
    ns = sorted(set(int(n) for n in n_terms_list))
    if not ns or ns[0] < 0 or ns[-1] > len(catalog.omega1):
        raise InvalidArgument(f"n_terms must lie in [0, {len(catalog.omega1)}]")
    target = psi(zb, prec=prec)
    exact_zero = zb.is_exact() and zb.mid == 0
    terms = _log_terms(catalog.omega1[:ns[-1]], zb, prec)
    C = _ctx(prec)
    rows = []
    for n in ns:
        part = terms[:n]
        total = C.fsum([t.mid for t in part]) if part else gmpy2.mpfr(0)
        rad = gmpy2.mpfr(0)
        for t in part:
            rad = UP.add(rad, t.rad)
        if part and total.rc:
            rad = UP.add(rad, UP.mul_2exp(UP.abs(total), -prec))
        trunc = RealBall(total, rad, prec)
        residual = target - trunc
        lo = hi = cons = None
        if exact_zero:
            cons = residual.is_exact() and residual.mid == 0
        elif n >= 1 and catalog.omega1[n - 1].beta.lower() >= TAIL_T_MIN:
            tb = tail_bound(catalog.omega1[n - 1].beta, 1, tail_slack)
            tb2 = tail_bound(catalog.omega1[n - 1].beta, 2, tail_slack)
            # x - x^2/2 <= log(1 + x) <= x for |x| small
            if zb.is_positive():
                lo = zb * tb.low - zb.sqr() * tb2.high.mul_2exp(-1)
                hi = zb * tb.high
            else:
                lo = zb * tb.high - zb.sqr() * tb2.high
                hi = zb * tb.low
            cons = bool(residual.overlaps(RealBall.from_bounds(lo.lower(), hi.upper(), prec)))
        rows.append(SeriesRow(n, trunc, residual, lo, hi, cons))
    return SeriesReport(_z_text(z), target, tuple(rows))
