import io
import json
import random
from fractions import Fraction

import pytest

from xiaudit.catalog import load_catalog
from xiaudit.cli import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECISION,
    EXIT_VALIDATION,
    UsageError,
    main,
    parse_point,
)

from conftest import FIRST_30


def run(*argv):
    out = io.StringIO()
    rc = main(list(argv), out=out)
    return rc, out.getvalue()


@pytest.fixture()
def table(tmp_path):
    p = tmp_path / "zeros.txt"
    p.write_text("# first thirty\n" + "\n".join(FIRST_30) + "\n")
    return p


# -- point parsing ------------------------------------------------------------------------


@pytest.mark.parametrize("text,value", [
    ("2", Fraction(2)),
    ("-3.5", Fraction(-7, 2)),
    ("1e-10", Fraction(1, 10**10)),
    ("0.5+14.1i", (Fraction(1, 2), Fraction(141, 10))),
    ("0.5 - 2j", (Fraction(1, 2), Fraction(-2))),
    ("3j", (Fraction(0), Fraction(3))),
    ("-i", (Fraction(0), Fraction(-1))),
])
def test_parse_point(text, value):
    assert parse_point(text) == value


@pytest.mark.parametrize("text", ["abc", "1+", "2..3", "1e", ""])
def test_parse_point_rejects(text):
    with pytest.raises(UsageError):
        parse_point(text)


# -- eval -------------------------------------------------------------------------------------


def test_eval_zeta_two():
    rc, out = run("eval", "zeta", "2")
    assert rc == EXIT_OK and "1.64493406" in out and "precision_bits: 192" in out


def test_eval_xi_half_json():
    rc, out = run("--format", "json", "eval", "xi", "0.5")
    doc = json.loads(out)
    assert rc == EXIT_OK
    assert doc["value"]["mid"].startswith("4.971207781")
    assert set(doc["value"]) == {"mid", "rad", "prec_bits"}


def test_eval_flags_after_subcommand():
    rc, out = run("eval", "gamma", "0.25", "--prec-bits", "256")
    assert rc == EXIT_OK and "3.6256099082219083119" in out and "precision_bits: 256" in out


def test_eval_complex():
    rc, out = run("eval", "zeta", "0.5+14.134725141734693790457i")
    assert rc == EXIT_OK and ") + (" in out


def test_eval_pole():
    rc, _ = run("eval", "zeta", "1")
    assert rc == EXIT_DOMAIN


def test_eval_bad_point():
    assert run("eval", "zeta", "abc")[0] == EXIT_PARSE


def test_eval_psi_domain():
    assert run("eval", "psi", "-0.3")[0] == EXIT_DOMAIN
    assert run("eval", "psi", "1+2i")[0] == EXIT_DOMAIN


def test_bad_config():
    assert run("--prec-bits", "20", "eval", "zeta", "2")[0] == EXIT_PARSE


# -- zeros ------------------------------------------------------------------------------------


def test_zeros_count(table):
    rc, out = run("zeros", "count", "--T", "100", "--zeros-file", str(table))
    assert rc == EXIT_OK and "counted: 29" in out and "consistent: yes" in out


def test_zeros_count_from_env(table, monkeypatch):
    monkeypatch.setenv("XIAUDIT_ZEROS", str(table))
    rc, out = run("zeros", "count", "--T", "50")
    assert rc == EXIT_OK and "counted: 10" in out


def test_zeros_missing_table(monkeypatch):
    monkeypatch.delenv("XIAUDIT_ZEROS", raising=False)
    assert run("zeros", "validate")[0] == EXIT_PARSE


def test_zeros_validate(table):
    rc, out = run("zeros", "validate", "--zeros-file", str(table))
    assert rc == EXIT_OK and "entries: 30" in out and "valid: yes" in out


def test_zeros_validate_shuffled(tmp_path):
    zs = list(FIRST_30)
    random.Random(5).shuffle(zs)
    p = tmp_path / "shuffled.txt"
    p.write_text("\n".join(zs) + "\n")
    assert run("zeros", "validate", "--zeros-file", str(p))[0] == EXIT_VALIDATION


def test_zeros_validate_malformed(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("14.13\nfourteen\n")
    assert run("zeros", "validate", "--zeros-file", str(p))[0] == EXIT_PARSE


def test_zeros_refine_writes_cache(table, tmp_path):
    cache = tmp_path / "cache.zc"
    rc, out = run("zeros", "refine", "--index", "1", "--target", "1e-30",
                  "--cache", str(cache), "--zeros-file", str(table))
    assert rc == EXIT_OK and "refined" in out
    cat = load_catalog(cache)
    assert cat.entries[0].source == "refined" and cat.entries[0].beta.rad <= 1e-30
    assert cat.entries[1].source == "table"
    # a second run extends the existing cache
    rc, _ = run("zeros", "refine", "--index", "2", "--cache", str(cache))
    cat = load_catalog(cache)
    assert rc == EXIT_OK and [e.source for e in cat.entries[:3]] == ["refined", "refined", "table"]


def test_zeros_refine_bad_index(table, tmp_path):
    rc, _ = run("zeros", "refine", "--index", "99", "--cache", str(tmp_path / "c.zc"),
                "--zeros-file", str(table))
    assert rc == EXIT_PARSE


# -- audit --------------------------------------------------------------------------------------


def test_audit_section5_text():
    rc, out = run("audit", "section5")
    assert rc == EXIT_OK
    assert "[EQ_5_16]" in out and "sign: certified negative" in out


def test_audit_section4_json(first1000, tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("\n".join(e.beta.mid_str(15) for e in first1000.entries) + "\n")
    rc, out = run("--format", "json", "--zeros-file", str(p), "--refine-below", "0",
                  "audit", "section4")
    doc = json.loads(out)
    assert rc == EXIT_OK
    assert [f["claim_id"] for f in doc["findings"]] == ["EQ_4_22", "EQ_4_23", "EQ_4_26",
                                                       "DIRECT_SUM"]
    assert len(doc["verdicts"]) == 3
    for f in doc["findings"]:
        assert set(f) >= {"claim_id", "inputs", "recomputed", "paper_value", "containment",
                          "digits_lost", "notes"}
        assert set(f["recomputed"]) == {"mid", "rad", "prec_bits"}
        assert set(f["digits_lost"]) == {"mid", "rad", "prec_bits"}
    for v in doc["verdicts"]:
        assert set(v) == {"left", "right", "relation", "decided", "holds"}
    assert doc["config"]["z1"] == "1.0e-10"


def _no_bare_floats(node):
    if isinstance(node, float):
        return False
    if isinstance(node, dict):
        return all(_no_bare_floats(v) for v in node.values())
    if isinstance(node, list):
        return all(_no_bare_floats(v) for v in node)
    return True


def test_audit_json_has_no_bare_floats():
    rc, out = run("--format", "json", "audit", "section5")
    assert rc == EXIT_OK and _no_bare_floats(json.loads(out))


def test_audit_precision_exhausted_exit():
    # at tiny z the 1/z^3 factor amplifies rounding beyond what 128 bits can absorb
    rc, out = run("--prec-bits", "64", "--prec-cap", "128", "audit", "section5", "--z5", "1e-12")
    assert rc == EXIT_PRECISION and "incomplete" in out


def test_audit_other_points():
    rc, out = run("audit", "section5", "--z5", "0.01")
    assert rc == EXIT_OK and "[EQ_5_16]" in out and "printed 3.73644298e-08" not in out
    assert run("audit", "section5", "--z5", "0.3")[0] == EXIT_DOMAIN
