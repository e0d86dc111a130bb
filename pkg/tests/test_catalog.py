import math
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpfr
from hypothesis import given, strategies as st

from xiaudit.balls import RealBall
from xiaudit.catalog import (
    MAGIC,
    REFINED,
    TABLE,
    ZeroCatalog,
    ZeroEntry,
    count_vs_formula,
    load_catalog,
    main_term,
    open_catalog,
    parse_zero_table,
    refine_below,
    refine_zero,
    save_catalog,
    xi_on_line,
)
from xiaudit.errors import (
    ChecksumMismatch,
    EmptyCatalog,
    InvalidArgument,
    MalformedLine,
    NoSignChange,
    NonMonotonicOrdinates,
    OrdinateTooSmall,
    TBeyondCatalog,
    VersionMismatch,
)

from conftest import FIRST_30



@pytest.fixture(autouse=True, scope="module")
def _mp_digits():
    with mpmath.workdps(60):
        yield
# first zero ordinate, mpmath.zetazero(1) at 50 digits
FIRST_ZERO = "14.134725141734693790457251983562470270784257115699"


# -- parsing ------------------------------------------------------------------------


def test_parse_two_lines():
    cat = parse_zero_table("14.134725142\n21.022039639\n", 5e-10)
    assert len(cat) == 2
    e = cat.entries[0]
    assert e.index == 1 and e.source == TABLE and e.on_line
    assert e.beta.contains("14.134725142") and e.beta.mid_str(11) == "1.4134725142e+1"
    assert 5e-10 <= e.beta.rad < 5.0001e-10


def test_comments_and_blanks():
    cat = parse_zero_table("# comment\n\n14.134725142")
    assert len(cat) == 1


def test_indexed_lines():
    cat = parse_zero_table("# n  gamma\n7 43.327073281\n8 48.005150881 # trailing\n")
    assert [e.index for e in cat.entries] == [7, 8]


def test_non_monotonic():
    with pytest.raises(NonMonotonicOrdinates):
        parse_zero_table("21.02\n14.13")


def test_merged_zeros_rejected():
    # gaps smaller than the declared accuracy cannot be told apart
    with pytest.raises(NonMonotonicOrdinates):
        parse_zero_table("14.1347\n14.1348", declared_accuracy=1e-4)


@pytest.mark.parametrize("text,line", [
    ("14.13\nabc\n", 2),
    ("14.13\n21.02 25.01 30.42\n", 2),
    ("1 14.13\n3 21.02\n", 2),
    ("x 14.13\n", 1),
    ("14.13.5\n", 1),
])
def test_malformed_line_number(text, line):
    with pytest.raises(MalformedLine) as exc:
        parse_zero_table(text)
    assert exc.value.lineno == line


def test_ordinate_below_two_pi():
    with pytest.raises(OrdinateTooSmall):
        parse_zero_table("6.28\n14.13\n")


def test_max_zeros_and_file_source(tmp_path):
    p = tmp_path / "z.txt"
    p.write_text("\n".join(FIRST_30) + "\n")
    cat = open_catalog(p, max_zeros=5)
    assert len(cat) == 5 and cat.source_descriptor == "z.txt"


def test_empty_catalog_cutoff():
    with pytest.raises(EmptyCatalog):
        parse_zero_table("# nothing\n").cutoff


@given(st.lists(st.integers(7 * 10**6, 10**9), min_size=1, max_size=40, unique=True))
def test_parse_sorted_ordinates_keeps_order(ints):
    ints.sort()
    if any(b - a < 2 for a, b in zip(ints, ints[1:])):
        return
    text = "\n".join(f"{i / 10**5:.5f}" for i in ints)
    cat = parse_zero_table(text, 4e-6)
    assert [e.index for e in cat.entries] == list(range(1, len(ints) + 1))
    for e, i in zip(cat.entries, ints):
        assert e.beta.contains(Fraction(i, 10**5))


# -- entries and partition ------------------------------------------------------------


def test_entry_invariants():
    with pytest.raises(OrdinateTooSmall):
        ZeroEntry(1, RealBall.exact(6))
    with pytest.raises(InvalidArgument):
        ZeroEntry(1, RealBall.exact(20), RealBall.exact("0.5"))
    with pytest.raises(InvalidArgument):
        ZeroEntry(1, RealBall.exact(20), source="guess")


def test_omega_partition(first30):
    off = ZeroEntry(31, RealBall.exact(105), RealBall.exact("0.1"))
    cat = ZeroCatalog(first30.entries + (off,))
    assert len(cat.omega1) == 30 and cat.omega2 == (off,)
    assert set(cat.omega1) | set(cat.omega2) == set(cat.entries)
    assert not set(cat.omega1) & set(cat.omega2)


def test_negative_delta_rejected(first30):
    off = ZeroEntry(31, RealBall.exact(105), RealBall.exact("-0.1"))
    with pytest.raises(InvalidArgument):
        ZeroCatalog(first30.entries + (off,))


def test_with_entry_checks_index(first30):
    with pytest.raises(InvalidArgument):
        first30.with_entry(ZeroEntry(99, RealBall.exact(500)))


# -- refinement ------------------------------------------------------------------------


def test_refine_first_zero():
    cat = parse_zero_table("14.134725142\n", 5e-10)
    r = refine_zero(cat.entries[0], 1e-30)
    assert r.source == REFINED and r.beta.rad <= 1e-30
    assert r.beta.contains(FIRST_ZERO)
    assert r.beta.mid_str(30) == "1.41347251417346937904572519836e+1"
    # certified bracket: opposite certain signs at the ends
    lo = xi_on_line(r.beta.lower(), r.beta.prec)
    hi = xi_on_line(r.beta.upper(), r.beta.prec)
    assert not lo.contains_zero() and not hi.contains_zero()
    assert lo.is_positive() != hi.is_positive()
    assert refine_zero(r, 1e-30) is r


def test_refine_without_zero():
    e = ZeroEntry(1, RealBall(mpfr("17.5", 128), mpfr(1), 128))
    with pytest.raises(NoSignChange):
        refine_zero(e, 1e-20)


def test_refine_two_zeros_in_bracket():
    # zeros near 21.02 and 25.01: an even count gives no sign change
    e = ZeroEntry(2, RealBall(mpfr("23", 128), mpfr("1.5", 128), 128))
    with pytest.raises(NoSignChange):
        refine_zero(e, 1e-20)


def test_refine_rejects_off_line():
    with pytest.raises(InvalidArgument):
        refine_zero(ZeroEntry(1, RealBall.exact(20), RealBall.exact("0.1")), 1e-20)


@pytest.mark.parametrize("k", [2, 17, 29])
def test_refine_matches_mpmath(first30, k):
    r = refine_zero(first30.entries[k - 1], 1e-40)
    ref = mpmath.zetazero(k).imag
    assert r.beta.contains(mpmath.nstr(ref, 55))


def test_refine_below_keeps_order(first30):
    cat = refine_below(first30, 50, 1e-25)
    refined = [e for e in cat.entries if e.source == REFINED]
    assert [e.index for e in refined] == list(range(1, 11))
    assert all(e.beta.rad <= 1e-25 for e in refined)
    assert len(cat) == 30


# -- counting ---------------------------------------------------------------------------


def test_count_hundred(first30):
    c = count_vs_formula(first30, 100)
    assert c.counted == 29 and c.consistent and c.ambiguous == 0
    assert abs(float(c.main_term.mid) - 28.127) < 1e-3
    assert abs(29 - float(main_term(RealBall.exact(100)).mid)) <= 2 * math.log(100)


def test_count_two_pi(first30):
    c = count_vs_formula(first30, RealBall.exact(2 * math.pi, 128))
    assert c.counted == 0


def test_count_beyond_catalog(first30):
    with pytest.raises(TBeyondCatalog):
        count_vs_formula(first30, 200)


def test_inconsistent_count_flagged(first30):
    # keep every third zero and the count no longer fits
    thin = parse_zero_table("\n".join(FIRST_30[::3]))
    assert count_vs_formula(first30, 90).consistent
    c = count_vs_formula(thin, 90, slack=0.5)
    assert c.counted == 9 and not c.consistent


@pytest.mark.slow
@pytest.mark.parametrize("T,n", [(50, 10), (100, 29), (500, 269), (1000, 649), (10000, 10142)])
def test_count_slack_on_full_table(full_catalog, T, n):
    # reference counts from mpmath.nzeros
    c = count_vs_formula(full_catalog, T)
    assert c.consistent and c.counted == n


# -- persistence --------------------------------------------------------------------------


def test_save_load_round_trip(tmp_path, first30):
    cat = refine_below(first30, 30, 1e-30)
    off = ZeroEntry(31, RealBall.exact(105), RealBall(mpfr("0.125", 64), mpfr("1e-9", 30), 64))
    cat = ZeroCatalog(cat.entries + (off,), cat.table_accuracy, "unit test")
    p = tmp_path / "c.zc"
    save_catalog(cat, p)
    back = load_catalog(p)
    assert back == cat
    for a, b in zip(back.entries, cat.entries):
        assert a.beta.mid == b.beta.mid and a.beta.rad == b.beta.rad
        assert a.beta.prec == b.beta.prec and a.source == b.source
    assert open_catalog(p) == cat


def test_wrong_magic(tmp_path, first30):
    p = tmp_path / "c.zc"
    save_catalog(first30, p)
    p.write_text(p.read_text().replace(MAGIC, "XIAUDIT-ZC v0", 1))
    with pytest.raises(VersionMismatch):
        load_catalog(p)


def test_truncated_file(tmp_path, first30):
    p = tmp_path / "c.zc"
    save_catalog(first30, p)
    lines = p.read_text().splitlines(keepends=True)
    p.write_text("".join(lines[:len(lines) // 2]))
    with pytest.raises(ChecksumMismatch):
        load_catalog(p)


def test_tampered_file(tmp_path, first30):
    p = tmp_path / "c.zc"
    save_catalog(first30, p)
    p.write_text(p.read_text().replace("14.1347", "14.1348", 1))
    with pytest.raises(ChecksumMismatch):
        load_catalog(p)
