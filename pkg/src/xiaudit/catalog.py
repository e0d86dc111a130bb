"""Tables of nontrivial-zero ordinates.

Only the upper-half-plane representatives are stored: on-line zeros
1/2 + i beta (delta == 0) and, hypothetically, off-line zeros
1/2 + delta + i beta with 0 < delta < 1/2.  The reflected and conjugated
partners follow from the functional equation and are never materialised.
"""
from __future__ import annotations

import bisect
import functools
import io
import math
import re
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import gmpy2
from gmpy2 import mpfr

from .balls import (
    DEFAULT_PREC,
    PREC_CAP,
    UP,
    ComplexBall,
    RealBall,
    _ctx,
    const_pi,
    exact_decimal,
)
from .errors import (
    ChecksumMismatch,
    EmptyCatalog,
    InvalidArgument,
    MalformedLine,
    NoSignChange,
    NonMonotonicOrdinates,
    OrdinateTooSmall,
    PrecisionExhausted,
    TBeyondCatalog,
    VersionMismatch,
)

TABLE = "table"
REFINED = "refined"
DEFAULT_ACCURACY = 5e-10
CATALOG_PREC = 128
MAGIC = "XIAUDIT-ZC v1"
_TWO_PI = 2 * math.pi
_ZERO_DELTA = RealBall(mpfr(0), mpfr(0), CATALOG_PREC)
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def magnitude_up(x):
    """30-bit upward-rounded magnitude of a float, decimal string or mpfr."""
    if isinstance(x, mpfr):
        return UP.abs(x)
    return UP.abs(mpfr(str(x), 128))


@dataclass(frozen=True)
class ZeroEntry:
    index: int
    beta: RealBall
    delta: RealBall = _ZERO_DELTA
    source: str = TABLE

    def __post_init__(self):
        if not self.beta.mid > _TWO_PI:
            raise OrdinateTooSmall(
                f"zero {self.index}: ordinate {self.beta.mid_str(12)} <= 2 pi")
        if not self.delta.certainly_lt(RealBall.exact("0.5")) or \
                not self.delta.certainly_gt(RealBall.exact("-0.5")):
            raise InvalidArgument(f"zero {self.index}: |delta| must be < 1/2")
        if self.source not in (TABLE, REFINED):
            raise InvalidArgument(f"unknown source tag {self.source!r}")

    @property
    def on_line(self):
        return self.delta.is_exact() and self.delta.mid == 0


@dataclass(frozen=True)
class ZeroCatalog:
    entries: tuple
    table_accuracy: float = DEFAULT_ACCURACY
    source_descriptor: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        _validate_order(self.entries)
        for e in self.entries:
            if not e.on_line and not e.delta.is_positive():
                raise InvalidArgument(
                    f"zero {e.index}: store off-line zeros by their delta > 0 representative")

    def __len__(self):
        return len(self.entries)

    @functools.cached_property
    def omega1(self):
        """On-line zeros (delta == 0)."""
        return tuple(e for e in self.entries if e.on_line)

    @functools.cached_property
    def omega2(self):
        """Off-line representatives (delta > 0)."""
        return tuple(e for e in self.entries if not e.on_line)

    @property
    def cutoff(self):
        if not self.entries:
            raise EmptyCatalog("catalog is empty")
        return self.entries[-1].beta

    @functools.cached_property
    def _mids(self):
        return [e.beta.mid for e in self.entries]

    def with_entry(self, entry):
        """Copy of the catalog with the entry of the same index replaced."""
        pos = entry.index - self.entries[0].index
        if not 0 <= pos < len(self.entries) or self.entries[pos].index != entry.index:
            raise InvalidArgument(f"no entry with index {entry.index}")
        entries = list(self.entries)
        entries[pos] = entry
        return replace(self, entries=tuple(entries))

    def truncated(self, n):
        return replace(self, entries=self.entries[:n])

    def stats(self):
        n_ref = sum(1 for e in self.entries if e.source == REFINED)
        return {
            "entries": len(self.entries),
            "omega1": len(self.omega1),
            "omega2": len(self.omega2),
            "refined": n_ref,
            "first_index": self.entries[0].index if self.entries else None,
            "min_beta": self.entries[0].beta.mid_str(15) if self.entries else None,
            "max_beta": self.entries[-1].beta.mid_str(15) if self.entries else None,
            "table_accuracy": repr(self.table_accuracy),
        }


def _validate_order(entries):
    prev = None
    for e in entries:
        if prev is not None:
            if e.index != prev.index + 1:
                raise NonMonotonicOrdinates(
                    f"indices not consecutive at {prev.index} -> {e.index}")
            # gap must exceed both radii: no merged or swapped zeros
            if not prev.beta.upper() < e.beta.lower():
                raise NonMonotonicOrdinates(
                    f"ordinates not strictly increasing at index {e.index}: "
                    f"{prev.beta.mid_str(15)} then {e.beta.mid_str(15)}")
        prev = e


# -- parsing --------------------------------------------------------------------


def _lines(source):
    if isinstance(source, str):
        return source.splitlines()
    return source


def parse_zero_table(source, declared_accuracy=DEFAULT_ACCURACY, *, prec=CATALOG_PREC,
                     max_zeros=None, source_descriptor="text"):
    """Parse a plain ordinate table: one decimal per line, optional leading
    integer index, ``#`` comments and blank lines ignored.

    ``source`` is the text itself or any iterable of lines (an open file).
    """
    acc = magnitude_up(declared_accuracy)
    floor = 2 * const_pi(64).upper()
    entries = []
    next_index = None
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if max_zeros is not None and len(entries) >= max_zeros:
            break
        parts = line.split()
        if len(parts) == 2:
            if not parts[0].isdigit():
                raise MalformedLine(lineno, raw, "index is not a positive integer")
            index = int(parts[0])
            if next_index is not None and index != next_index:
                raise MalformedLine(lineno, raw, f"expected index {next_index}")
            token = parts[1]
        elif len(parts) == 1:
            index = next_index if next_index is not None else 1
            token = parts[0]
        else:
            raise MalformedLine(lineno, raw)
        if not _NUMBER.match(token):
            raise MalformedLine(lineno, raw)
        mid = mpfr(token, prec)
        if not mid > floor:
            raise OrdinateTooSmall(f"line {lineno}: ordinate {token} <= 2 pi")
        err = UP.mul_2exp(UP.abs(mid), -prec) if mid.rc else mpfr(0)
        beta = RealBall(mid, UP.add(acc, err), prec)
        entries.append(ZeroEntry(index, beta, _ZERO_DELTA, TABLE))
        next_index = index + 1
    return ZeroCatalog(tuple(entries), float(declared_accuracy), source_descriptor)


def read_zero_table(path, declared_accuracy=DEFAULT_ACCURACY, **kw):
    path = Path(path)
    with path.open() as fh:
        return parse_zero_table(fh, declared_accuracy,
                                source_descriptor=kw.pop("source_descriptor", path.name), **kw)


# -- refinement -----------------------------------------------------------------


def xi_on_line(t, prec):
    """Enclosure of the real number xi(1/2 + i t) at the exact point ``t``."""
    from .special import xi

    s = ComplexBall(RealBall.exact("0.5", prec), RealBall.exact(t, prec))
    return xi(s, prec=prec).re


def _sign(ball):
    if ball.is_positive():
        return 1
    if ball.is_negative():
        return -1
    return 0


def _certain_sign(t, prec, cap):
    """Sign of xi(1/2 + i t), escalating precision until certain."""
    p = prec
    while True:
        v = xi_on_line(t, p)
        sg = _sign(v)
        if sg:
            return sg, v, p
        if p >= cap:
            return 0, v, p
        p = min(2 * p, cap)


def refine_zero(entry, target_radius, *, max_precision_bits=PREC_CAP, secant_steps=12):
    """Shrink an on-line zero's ordinate ball to ``target_radius``.

    The result is certified by a sign change of xi(1/2 + i t) between the
    two ends of the returned ball; secant steps only propose the centre.
    """
    if not entry.on_line:
        raise InvalidArgument("only on-line zeros can be refined on the critical line")
    target = magnitude_up(target_radius)
    if entry.beta.rad <= target:
        return entry
    wp = max(DEFAULT_PREC, int(-math.log2(float(target))) + 96,
             entry.beta.prec)
    wp = min(wp, max_precision_bits)
    C = _ctx(wp + 64)
    r3 = UP.mul(entry.beta.rad, 3)
    a = C.sub(entry.beta.mid, r3)
    b = C.add(entry.beta.mid, r3)
    sa, _, _ = _certain_sign(a, wp, max_precision_bits)
    sb, _, _ = _certain_sign(b, wp, max_precision_bits)
    if sa == 0 or sb == 0:
        raise PrecisionExhausted("sign of xi at the bracket ends not certain at the cap")
    if sa == sb:
        raise NoSignChange(
            f"xi(1/2+it) has the same sign at both ends of [{a}, {b}] around zero {entry.index}")

    # power-of-two half width below the target, so endpoints are exact
    h = mpfr(2) ** math.floor(math.log2(float(target)) - 1)
    x = _secant_estimate(a, b, wp, secant_steps, h)
    if x is not None:
        lo, hi = C.sub(x, h), C.add(x, h)
        s_lo, _, _ = _certain_sign(lo, wp, max_precision_bits)
        s_hi, _, _ = _certain_sign(hi, wp, max_precision_bits)
        if s_lo and s_hi and s_lo != s_hi:
            return replace(entry, beta=RealBall(x, h, wp + 64), source=REFINED)

    # certified bisection fallback
    while True:
        width = C.sub(b, a)
        if width <= UP.mul_2exp(target, 1):
            break
        m = C.mul_2exp(C.add(a, b), -1)
        sm, _, _ = _certain_sign(m, wp, max_precision_bits)
        if sm == 0:
            raise PrecisionExhausted("bisection midpoint sign not certain at the cap")
        if sm == sa:
            a = m
        else:
            b = m
    m = C.mul_2exp(C.add(a, b), -1)
    rad = max(UP.sub(b, m), UP.sub(m, a))
    return replace(entry, beta=RealBall(m, rad, wp + 64), source=REFINED)


def _secant_estimate(a, b, wp, steps, tol):
    C = _ctx(wp + 64)
    x0, x1 = a, b
    f0 = xi_on_line(x0, wp).mid
    f1 = xi_on_line(x1, wp).mid
    for _ in range(steps):
        if f1 == f0:
            return None
        x2 = C.sub(x1, C.div(C.mul(f1, C.sub(x1, x0)), C.sub(f1, f0)))
        if not a <= x2 <= b:
            return None
        step = abs(C.sub(x2, x1))
        x0, f0 = x1, f1
        x1 = x2
        if step < tol / 16:
            return x1
        f1 = xi_on_line(x1, wp).mid
    return None


# -- counting function ----------------------------------------------------------


@dataclass(frozen=True)
class CountCheck:
    T: RealBall
    counted: int
    main_term: RealBall
    slack: float
    slack_bound: RealBall
    consistent: bool
    ambiguous: int = 0


def main_term(T):
    """(T/2 pi) log(T/2 pi) - T/2 pi."""
    x = T / (const_pi(T.prec) * 2)
    return x * x.log() - x


def count_vs_formula(catalog, T, slack=2.0):
    """Compare the catalog count below T with the smooth counting term."""
    T = RealBall.exact(T, CATALOG_PREC) if not isinstance(T, RealBall) else T
    if not catalog.entries or T.mid > catalog.entries[-1].beta.mid:
        raise TBeyondCatalog("T exceeds the largest catalog ordinate")
    mids = catalog._mids
    lo_i = bisect.bisect_left(mids, T.lower())
    hi_i = bisect.bisect_left(mids, T.upper())
    counted = bisect.bisect_left(mids, T.mid)
    # entries whose ordinate ball straddles T
    ambiguous = sum(1 for e in catalog.entries[max(lo_i - 1, 0):hi_i + 1]
                    if e.beta.contains(T.mid) or T.contains(e.beta.mid))
    mt = main_term(T)
    bound = T.log() * RealBall.exact(slack, T.prec)
    diff = abs(mt - counted)
    consistent = bool(diff.upper() <= bound.lower())
    return CountCheck(T, counted, mt, float(slack), bound, consistent, ambiguous)


# -- persistence ----------------------------------------------------------------


def _sci_exact(x):
    """Exact scientific notation of a binary float."""
    if not isinstance(x, mpfr):
        x = mpfr(x)
    if x == 0:
        return "0e+0"
    n, d = x.as_integer_ratio()
    n, d = int(n), int(d)
    k = d.bit_length() - 1
    digits = abs(n) * 5 ** k
    s = str(digits).rstrip("0")
    trailing = len(str(digits)) - len(s)
    exp = len(s) - 1 + trailing - k
    body = s[0] + ("." + s[1:] if len(s) > 1 else "")
    return f"{'-' if n < 0 else ''}{body}e{exp:+d}"


def _format_catalog(catalog):
    out = io.StringIO()
    out.write(MAGIC + "\n")
    out.write(f"# accuracy {catalog.table_accuracy!r}\n")
    out.write(f"# source {catalog.source_descriptor}\n")
    for e in catalog.entries:
        rec = [str(e.index), exact_decimal(e.beta.mid), _sci_exact(e.beta.rad),
               e.source, str(e.beta.prec)]
        if not e.on_line:
            rec += [exact_decimal(e.delta.mid), _sci_exact(e.delta.rad), str(e.delta.prec)]
        out.write(" ".join(rec) + "\n")
    body = out.getvalue()
    return body + f"CRC {zlib.crc32(body.encode()):08x}\n"


def save_catalog(catalog, path):
    Path(path).write_text(_format_catalog(catalog))


def load_catalog(path):
    text = Path(path).read_text()
    first, _, _ = text.partition("\n")
    if first != MAGIC:
        raise VersionMismatch(f"expected header {MAGIC!r}, found {first[:40]!r}")
    body, sep, crc_line = text.rstrip("\n").rpartition("\n")
    if not sep or not crc_line.startswith("CRC "):
        raise ChecksumMismatch("missing CRC trailer (truncated file?)")
    body += "\n"
    if f"{zlib.crc32(body.encode()):08x}" != crc_line[4:].strip():
        raise ChecksumMismatch("CRC does not match file contents")
    accuracy, descriptor = DEFAULT_ACCURACY, ""
    entries = []
    for lineno, line in enumerate(body.splitlines()[1:], start=2):
        if line.startswith("# accuracy "):
            accuracy = float(line[len("# accuracy "):])
            continue
        if line.startswith("# source "):
            descriptor = line[len("# source "):]
            continue
        if line.startswith("#"):
            continue
        f = line.split()
        if len(f) not in (5, 8):
            raise MalformedLine(lineno, line)
        try:
            prec = int(f[4])
            beta = RealBall(mpfr(f[1], prec), mpfr(f[2], 30), prec)
            delta = _ZERO_DELTA
            if len(f) > 5:
                dp = int(f[7])
                delta = RealBall(mpfr(f[5], dp), mpfr(f[6], 30), dp)
            index = int(f[0])
        except ValueError:
            raise MalformedLine(lineno, line) from None
        entries.append(ZeroEntry(index, beta, delta, f[3]))
    return ZeroCatalog(tuple(entries), accuracy, descriptor)


def refine_below(catalog, T, target_radius, **kw):
    """Refine every on-line entry with ordinate below ``T``."""
    out = catalog
    for e in catalog.entries:
        if e.beta.mid >= T:
            break
        if e.on_line:
            out = out.with_entry(refine_zero(e, target_radius, **kw))
    return out


def open_catalog(path, declared_accuracy=DEFAULT_ACCURACY, max_zeros=None):
    """Load a cache file or parse a plain table, whichever ``path`` holds."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline().rstrip("\n")
    if first == MAGIC:
        cat = load_catalog(path)
        return cat.truncated(max_zeros) if max_zeros else cat
    return read_zero_table(path, declared_accuracy, max_zeros=max_zeros)
