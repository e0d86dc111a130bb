"""Acceptance gate: ten criteria, one PASS/FAIL line each.

Criteria 3, 6, 7, 9 and 10 need data/zeros_100k.txt
(``python scripts/make_zero_table.py 100000 data/zeros_100k.txt``).
"""
import cmath
import math
import random
import shutil
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from xiaudit import audit as A
from xiaudit.balls import ComplexBall, RealBall, const_pi
from xiaudit.catalog import (
    count_vs_formula,
    main_term,
    read_zero_table,
    refine_below,
    refine_zero,
    xi_on_line,
)
from xiaudit.special import gamma, xi, zeta
from xiaudit.sums import reciprocal_constant, sum_lambda_power

from conftest import ROOT

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(capsys, n, title, budget, spent=0.0):
    """Time the block (plus ``spent`` seconds of fixture work) against ``budget``."""
    t0 = time.perf_counter() - spent
    ok, detail = False, ""
    try:
        yield
        elapsed = time.perf_counter() - t0
        ok = elapsed < budget
        detail = f"{elapsed:.2f}s of {budget}s"
        assert ok, f"runtime {elapsed:.2f}s exceeds {budget}s"
    except BaseException as exc:
        if not detail:
            detail = f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    finally:
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}  {title}  ({detail})")


@pytest.fixture(scope="module")
def refined_catalog(zeros_path):
    t0 = time.perf_counter()
    cat = refine_below(read_zero_table(zeros_path), 100, 1e-24)
    return cat, time.perf_counter() - t0


@pytest.fixture(scope="module")
def contradiction(refined_catalog):
    cat, t_cat = refined_catalog
    t0 = time.perf_counter()
    rep = A.audit_contradiction("1e-10", cat, A.SECTION4)
    return rep, t_cat + time.perf_counter() - t0


def test_01_golden_constants(capsys):
    with criterion(capsys, 1, "golden constants", 5):
        z2 = zeta(2, prec=256)
        assert z2.overlaps(const_pi(256).sqr() / 6) and z2.rad < 1e-50
        assert zeta(0, prec=256).contains(Fraction(-1, 2))
        assert gamma(Fraction(1, 2), prec=256).overlaps(const_pi(256).sqrt())
        assert xi(0, prec=256).contains(Fraction(1, 2))
        assert xi(1, prec=256).contains(Fraction(1, 2))


def test_02_functional_equations(capsys):
    with criterion(capsys, 2, "functional-equation suite", 60):
        rng = random.Random(1729)
        for _ in range(20):
            r, th = 10 * math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
            s = ComplexBall.exact(cmath.rect(r, th), 192)
            assert xi(s).overlaps(xi(1 - s))
            if abs(s.re.mid - 1) + abs(s.im.mid) > 1e-6:
                assert zeta(s.conj()).overlaps(zeta(s).conj())


def test_03_reciprocal_sum_bracketing(capsys, zeros_path):
    with criterion(capsys, 3, "reciprocal-sum bracketing", 120):
        cat = read_zero_table(zeros_path)
        assert len(cat) == 100_000
        res = sum_lambda_power(cat, 1)
        c = reciprocal_constant(256)
        assert res.enclosure.contains(c.lower()) and res.enclosure.contains(c.upper())


def test_04_zero_count(capsys, first30):
    with criterion(capsys, 4, "zero count below 100", 1):
        chk = count_vs_formula(first30, 100)
        assert chk.counted == 29
        assert abs(29 - float(main_term(RealBall.exact(100)).mid)) <= 2 * math.log(100)
        assert chk.consistent


def test_05_refinement(capsys, first30):
    with criterion(capsys, 5, "refinement of the first zero", 60):
        r = refine_zero(first30.entries[0], 1e-30)
        assert r.beta.rad <= 1e-30
        lo = xi_on_line(r.beta.lower(), r.beta.prec)
        hi = xi_on_line(r.beta.upper(), r.beta.prec)
        assert not lo.contains_zero() and not hi.contains_zero()
        assert lo.is_positive() != hi.is_positive()
        assert refine_zero(r, 1e-30) == r


def test_06_section4_reproduction(capsys):
    with criterion(capsys, 6, "psi-pair claims at z1 = 1e-10", 120):
        findings, p = A._section4_findings("1e-10", A.SECTION4, need_order=True)
        f = {x.claim_id: x for x in findings}
        for cid in ("EQ_4_22", "EQ_4_23", "EQ_4_26"):
            assert f[cid].recomputed.width() <= 1e-20
            assert f[cid].paper_value == A.PRINTED[cid]
            assert f[cid].containment in (A.INSIDE, A.OUTSIDE)
        mean = (f["EQ_4_26"].recomputed + f["EQ_4_23"].recomputed).mul_2exp(-1)
        assert f["EQ_4_22"].recomputed.overlaps(mean)
        va = A.compare("EQ_4_26", f["EQ_4_26"].recomputed, "EQ_4_23", f["EQ_4_23"].recomputed, ">")
        assert va.decided and p <= 2048


def test_07_direct_sum_arbiter(capsys, contradiction):
    rep, elapsed = contradiction
    with criterion(capsys, 7, "direct-sum arbiter", 120, spent=elapsed):
        d = rep.finding("DIRECT_SUM")
        assert d.recomputed.width() <= 5e-13
        assert abs(float(d.recomputed.mid) - 3.7100e-5) < 1e-8
        placement = [s for s in rep.summary if s.startswith("direct sum relative to")]
        assert placement and not placement[0].endswith("undecided")


def test_08_section5(capsys):
    with criterion(capsys, 8, "positivity claim at z = 0.005025", 30):
        f = A.audit_corollary_5_2("0.005025")
        assert f.recomputed.width() <= 1e-12
        assert f.paper_value == A.PRINTED["EQ_5_16"] and f.containment in (A.INSIDE, A.OUTSIDE)
        assert A.sign_of(f) != 0 and "sign: certified" in f.notes


def _nested(a, b):
    return a.contains(b.lower()) and a.contains(b.upper())


def test_09_cancellation_and_escalation(capsys, refined_catalog, contradiction):
    rep, _ = contradiction
    cat, _ = refined_catalog
    with criterion(capsys, 9, "cancellation diagnostics and escalation", 120):
        assert rep.finding("EQ_4_22").digits_lost > 10
        p = rep.finding("EQ_4_22").precision_bits_used
        req = A.AuditRequest(2 * p, A.SECTION4.max_precision_bits, 1e-20)
        rep2 = A.audit_contradiction("1e-10", cat, req)
        for f in rep.findings:
            g = rep2.finding(f.claim_id)
            assert _nested(f.recomputed, g.recomputed)
        direct2 = A.direct_sum_finding(cat, prec=256)
        d1 = rep.finding("DIRECT_SUM").recomputed
        assert d1.overlaps(direct2.recomputed) and direct2.recomputed.width() <= d1.width()
        for v, w in zip(rep.verdicts, rep2.verdicts):
            if v.decided:
                assert w.decided and w.holds == v.holds
        s5 = A.audit_corollary_5_2("0.005025")
        s5b = A.audit_corollary_5_2("0.005025", A.AuditRequest(2 * s5.precision_bits_used,
                                                               A.SECTION5.max_precision_bits, 1e-12))
        assert _nested(s5.recomputed, s5b.recomputed)


def _cli():
    exe = shutil.which("xi-audit")
    return [exe] if exe else [sys.executable, "-m", "xiaudit.cli"]


def test_10_determinism(capsys, zeros_path):
    with criterion(capsys, 10, "byte-identical JSON across runs", 300):
        cmd = _cli() + ["--zeros-file", str(zeros_path), "audit", "all", "--format", "json"]
        outs = [subprocess.run(cmd, capture_output=True, check=True, cwd=ROOT).stdout
                for _ in range(2)]
        assert outs[0] == outs[1] and outs[0].startswith(b"{")
