"""Ball arithmetic on top of MPFR (via gmpy2).

A ball is a midpoint at ``prec`` bits plus a radius kept as a 30-bit
magnitude rounded upward.  Every operation returns a ball that contains
the exact result whenever the inputs contain theirs.  MPFR rounds each
midpoint operation correctly, so the rounding error of a result ``r`` is
bounded by ``|r| * 2**-prec``; it is only added when MPFR reports an
inexact result (``rc != 0``), which keeps integer arithmetic exact.
"""
from __future__ import annotations

import functools
import math
import threading
from fractions import Fraction
from numbers import Integral, Rational

import gmpy2
from gmpy2 import mpfr

from .errors import (
    DivisionByZeroEnclosure,
    DomainViolation,
    InvalidArgument,
    PrecisionExhausted,
)

DEFAULT_PREC = 192
PREC_CAP = 16384
MIN_PREC = 32
RAD_PREC = 30

_EMIN = gmpy2.get_emin_min()
_EMAX = gmpy2.get_emax_max()


@functools.lru_cache(maxsize=None)
def _ctx(prec, rnd=gmpy2.RoundToNearest):
    return gmpy2.context(
        precision=prec, round=rnd, emin=_EMIN, emax=_EMAX,
        trap_underflow=False, trap_overflow=False,
    )


UP = _ctx(RAD_PREC, gmpy2.RoundUp)
DOWN = _ctx(RAD_PREC, gmpy2.RoundDown)
ZERO = mpfr(0)
_TWO = mpfr(2)


def _err(r, prec):
    """Upper bound on the rounding error of a nearest-rounded result."""
    if r.rc == 0:
        return ZERO
    return UP.mul_2exp(UP.abs(r), -prec)


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (mpfr, float)):
        n, d = x.as_integer_ratio()
        return Fraction(int(n), int(d))
    if isinstance(x, (Integral, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class RealBall:
    """Enclosure ``[mid - rad, mid + rad]`` of a real number."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad=ZERO, prec=DEFAULT_PREC):
        self.mid = mid
        self.rad = rad
        self.prec = prec

    # -- construction ------------------------------------------------------

    @classmethod
    def exact(cls, x, prec=DEFAULT_PREC):
        """Ball around ``x`` (int, Fraction, decimal string, float, mpfr).

        The radius is zero whenever ``x`` is representable at ``prec`` bits.
        """
        if isinstance(x, RealBall):
            return x.with_prec(max(prec, x.prec))
        if isinstance(x, bool):
            x = int(x)
        C = _ctx(prec)
        if isinstance(x, Integral):
            m = mpfr(gmpy2.mpz(int(x)), prec)
            return cls(m, _err(m, prec), prec)
        if isinstance(x, (float, mpfr)):
            m = mpfr(x, prec)
            return cls(m, _err(m, prec), prec)
        q = _to_fraction(x)
        if q.denominator == 1:
            return cls.exact(q.numerator, prec)
        m = C.div(gmpy2.mpz(q.numerator), gmpy2.mpz(q.denominator))
        return cls(m, _err(m, prec), prec)

    @classmethod
    def from_bounds(cls, lo, hi, prec=DEFAULT_PREC):
        """Smallest-ish ball containing the interval [lo, hi] (mpfr endpoints)."""
        lo = lo if isinstance(lo, mpfr) else mpfr(lo, prec)
        hi = hi if isinstance(hi, mpfr) else mpfr(hi, prec)
        if lo > hi:
            raise InvalidArgument("lower bound exceeds upper bound")
        C = _ctx(prec)
        m = C.mul_2exp(C.add(lo, hi), -1)
        return cls(m, max(UP.sub(hi, m), UP.sub(m, lo)), prec)

    def with_prec(self, prec):
        if prec == self.prec:
            return self
        if self.mid.precision <= prec:
            return RealBall(self.mid, self.rad, prec)
        m = _ctx(prec).plus(self.mid)
        return RealBall(m, UP.add(self.rad, _err(m, prec)), prec)

    def add_error(self, e):
        """Widen the radius by a non-negative magnitude."""
        if not isinstance(e, (mpfr, int, float)):
            e = mpfr(str(e), 128)
        return RealBall(self.mid, UP.add(self.rad, UP.abs(e)), self.prec)

    # -- queries -----------------------------------------------------------

    def lower(self):
        return _ctx(self.prec, gmpy2.RoundDown).sub(self.mid, self.rad)

    def upper(self):
        return _ctx(self.prec, gmpy2.RoundUp).add(self.mid, self.rad)

    def mag(self):
        """Upper bound on |x| for x in the ball."""
        return UP.add(UP.abs(self.mid), self.rad)

    def mig(self):
        """Lower bound on |x| for x in the ball (0 if it contains 0)."""
        d = DOWN.sub(DOWN.abs(self.mid), self.rad)
        return d if d > 0 else ZERO

    def width(self):
        return UP.mul_2exp(self.rad, 1)

    @property
    def radius(self):
        return self.rad

    def is_exact(self):
        return self.rad == 0

    def is_positive(self):
        return self.mid > self.rad

    def is_negative(self):
        return self.mid < -self.rad

    def contains_zero(self):
        return -self.rad <= self.mid <= self.rad

    def contains(self, x):
        """Exact membership test for a number or containment of another ball."""
        if isinstance(x, RealBall):
            lo = _to_fraction(x.mid) - _to_fraction(x.rad)
            hi = _to_fraction(x.mid) + _to_fraction(x.rad)
        else:
            lo = hi = _to_fraction(x)
        m, r = _to_fraction(self.mid), _to_fraction(self.rad)
        return m - r <= lo and hi <= m + r

    def overlaps(self, other):
        other = _as_real(other, self.prec)
        d = abs(_to_fraction(self.mid) - _to_fraction(other.mid))
        return d <= _to_fraction(self.rad) + _to_fraction(other.rad)

    def certainly_lt(self, other):
        other = _as_real(other, self.prec)
        return self.upper() < other.lower()

    def certainly_gt(self, other):
        other = _as_real(other, self.prec)
        return self.lower() > other.upper()

    def __eq__(self, other):
        if not isinstance(other, RealBall):
            return NotImplemented
        return self.mid == other.mid and self.rad == other.rad and self.prec == other.prec

    def __hash__(self):
        return hash((self.mid, self.rad, self.prec))

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"RealBall({self.mid_str(20)} +/- {float(self.rad):.3e}, prec={self.prec})"

    def mid_str(self, digits=None):
        return sci_str(self.mid, digits or prec_digits(self.prec))

    def rad_str(self):
        return sci_str(self.rad, 6)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return RealBall(_ctx(self.prec).minus(self.mid), self.rad, self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.contains_zero():
            # [0, mag] recentred
            hi = self.mag()
            return RealBall(UP.mul_2exp(hi, -1), UP.mul_2exp(hi, -1), self.prec)
        return RealBall(_ctx(self.prec).abs(self.mid), self.rad, self.prec)

    def __add__(self, other):
        if isinstance(other, (ComplexBall, complex)):
            return NotImplemented
        other = _as_real(other, self.prec)
        p = max(self.prec, other.prec)
        m = _ctx(p).add(self.mid, other.mid)
        return RealBall(m, UP.add(UP.add(self.rad, other.rad), _err(m, p)), p)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (ComplexBall, complex)):
            return NotImplemented
        other = _as_real(other, self.prec)
        p = max(self.prec, other.prec)
        m = _ctx(p).sub(self.mid, other.mid)
        return RealBall(m, UP.add(UP.add(self.rad, other.rad), _err(m, p)), p)

    def __rsub__(self, other):
        if isinstance(other, complex):
            return ComplexBall.exact(other, self.prec) - self
        return _as_real(other, self.prec) - self

    def __mul__(self, other):
        if isinstance(other, (ComplexBall, complex)):
            return NotImplemented
        other = _as_real(other, self.prec)
        p = max(self.prec, other.prec)
        m = _ctx(p).mul(self.mid, other.mid)
        r = _err(m, p)
        if other.rad:
            r = UP.add(r, UP.mul(UP.abs(self.mid), other.rad))
        if self.rad:
            r = UP.add(r, UP.mul(UP.abs(other.mid), self.rad))
            if other.rad:
                r = UP.add(r, UP.mul(self.rad, other.rad))
        return RealBall(m, r, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (ComplexBall, complex)):
            return ComplexBall(self) / other
        other = _as_real(other, self.prec)
        if other.contains_zero():
            raise DivisionByZeroEnclosure("divisor enclosure contains zero")
        p = max(self.prec, other.prec)
        m = _ctx(p).div(self.mid, other.mid)
        r = _err(m, p)
        if self.rad or other.rad:
            bm = _ctx(p).abs(other.mid)
            num = UP.add(UP.mul(UP.abs(self.mid), other.rad), UP.mul(bm, self.rad))
            den = DOWN.mul(bm, DOWN.sub(bm, other.rad))
            r = UP.add(r, UP.div(num, den))
        return RealBall(m, r, p)

    def __rtruediv__(self, other):
        return _as_real(other, self.prec) / self

    def __pow__(self, n):
        if isinstance(n, Integral):
            return self._ipow(int(n))
        return self.pow(n)

    def _ipow(self, n):
        if n < 0:
            return 1 / self._ipow(-n)
        result = RealBall(mpfr(1), ZERO, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.sqr()
        return result

    def mul_2exp(self, k):
        """Exact scaling by 2**k."""
        C = _ctx(self.prec)
        return RealBall(C.mul_2exp(self.mid, k), UP.mul_2exp(self.rad, k), self.prec)

    def sqr(self):
        p = self.prec
        m = _ctx(p).mul(self.mid, self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.mul(self.rad, UP.add(UP.mul_2exp(UP.abs(self.mid), 1), self.rad)))
        return RealBall(m, r, p)

    def inv(self):
        return 1 / self

    # -- elementary functions ---------------------------------------------

    def sqrt(self):
        if self.mid < self.rad:
            raise DomainViolation("sqrt of an enclosure reaching below zero")
        p = self.prec
        m = _ctx(p).sqrt(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.div(self.rad, DOWN.sqrt(self.mid)))
        return RealBall(m, r, p)

    def exp(self):
        p = self.prec
        m = _ctx(p).exp(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.mul(UP.exp(self.mid), UP.expm1(self.rad)))
        return RealBall(m, r, p)

    def expm1(self):
        p = self.prec
        m = _ctx(p).expm1(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.mul(UP.exp(self.mid), UP.expm1(self.rad)))
        return RealBall(m, r, p)

    def log(self):
        if not self.is_positive():
            raise DomainViolation("log of an enclosure not strictly positive")
        p = self.prec
        m = _ctx(p).log(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.div(self.rad, DOWN.sub(self.mid, self.rad)))
        return RealBall(m, r, p)

    def log1p(self):
        if not (self + 1).is_positive():
            raise DomainViolation("log1p of an enclosure reaching -1")
        p = self.prec
        m = _ctx(p).log1p(self.mid)
        r = _err(m, p)
        if self.rad:
            den = DOWN.sub(DOWN.add(self.mid, 1), self.rad)
            r = UP.add(r, UP.div(self.rad, den))
        return RealBall(m, r, p)

    def sin(self):
        p = self.prec
        m = _ctx(p).sin(self.mid)
        return RealBall(m, UP.add(min(self.rad, _TWO), _err(m, p)), p)

    def cos(self):
        p = self.prec
        m = _ctx(p).cos(self.mid)
        return RealBall(m, UP.add(min(self.rad, _TWO), _err(m, p)), p)

    def sinh(self):
        p = self.prec
        m = _ctx(p).sinh(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.mul(self.rad, UP.cosh(UP.add(UP.abs(self.mid), self.rad))))
        return RealBall(m, r, p)

    def cosh(self):
        p = self.prec
        m = _ctx(p).cosh(self.mid)
        r = _err(m, p)
        if self.rad:
            r = UP.add(r, UP.mul(self.rad, UP.sinh(UP.add(UP.abs(self.mid), self.rad))))
        return RealBall(m, r, p)

    def atan(self):
        p = self.prec
        m = _ctx(p).atan(self.mid)
        r = _err(m, p)
        if self.rad:
            lo = self.mig()
            r = UP.add(r, UP.div(self.rad, DOWN.add(1, DOWN.square(lo))))
        return RealBall(m, r, p)

    def pow(self, y):
        """self ** y for a strictly positive base."""
        if isinstance(y, ComplexBall):
            return (y * self.log()).exp()
        return (_as_real(y, self.prec) * self.log()).exp()


def _as_real(x, prec):
    if isinstance(x, RealBall):
        return x
    return RealBall.exact(x, prec)


def atan2(y, x):
    """Argument of x + iy, excluding a neighbourhood of the negative real axis."""
    p = max(y.prec, x.prec)
    if x.is_positive():
        return (y / x).atan()
    half_pi = const_pi(p).mul_2exp(-1)
    if y.is_positive():
        return half_pi - (x / y).atan()
    if y.is_negative():
        return -half_pi - (x / y).atan()
    if x.is_negative() and y.is_exact() and y.mid == 0:
        return const_pi(p)
    raise DomainViolation("argument enclosure meets the branch cut or the origin")


class ComplexBall:
    """Rectangular complex enclosure: independent real and imaginary balls."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        if im is None:
            im = RealBall(ZERO, ZERO, re.prec)
        self.re = re
        self.im = im

    @classmethod
    def exact(cls, x, prec=DEFAULT_PREC):
        if isinstance(x, ComplexBall):
            return x.with_prec(max(prec, x.prec))
        if isinstance(x, RealBall):
            return cls(x.with_prec(max(prec, x.prec)))
        if isinstance(x, complex):
            return cls(RealBall.exact(x.real, prec), RealBall.exact(x.imag, prec))
        if isinstance(x, tuple):
            return cls(RealBall.exact(x[0], prec), RealBall.exact(x[1], prec))
        return cls(RealBall.exact(x, prec))

    @property
    def prec(self):
        return max(self.re.prec, self.im.prec)

    def with_prec(self, prec):
        return ComplexBall(self.re.with_prec(prec), self.im.with_prec(prec))

    @property
    def radius(self):
        return UP.add(self.re.rad, self.im.rad)

    def conj(self):
        return ComplexBall(self.re, -self.im)

    def is_real(self):
        return self.im.is_exact() and self.im.mid == 0

    def contains(self, z):
        if isinstance(z, ComplexBall):
            return self.re.contains(z.re) and self.im.contains(z.im)
        if isinstance(z, RealBall):
            return self.re.contains(z) and self.im.contains(0)
        z = complex(z) if not isinstance(z, tuple) else z
        if isinstance(z, tuple):
            return self.re.contains(z[0]) and self.im.contains(z[1])
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def contains_zero(self):
        return self.re.contains_zero() and self.im.contains_zero()

    def overlaps(self, other):
        other = _as_complex(other, self.prec)
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def __eq__(self, other):
        if not isinstance(other, ComplexBall):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ComplexBall({self.re!r}, {self.im!r})"

    def __complex__(self):
        return complex(float(self.re.mid), float(self.im.mid))

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return ComplexBall(-self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, ComplexBall):
            return ComplexBall(self.re + other.re, self.im + other.im)
        if isinstance(other, complex):
            return self + _as_complex(other, self.prec)
        return ComplexBall(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexBall):
            return ComplexBall(self.re - other.re, self.im - other.im)
        if isinstance(other, complex):
            return self - _as_complex(other, self.prec)
        return ComplexBall(self.re - other, self.im)

    def __rsub__(self, other):
        return _as_complex(other, self.prec) - self

    def __mul__(self, other):
        if isinstance(other, ComplexBall):
            a, b, c, d = self.re, self.im, other.re, other.im
            if other.is_real():
                return ComplexBall(a * c, b * c)
            if self.is_real():
                return ComplexBall(a * c, a * d)
            return ComplexBall(a * c - b * d, a * d + b * c)
        if isinstance(other, complex):
            return self * _as_complex(other, self.prec)
        return ComplexBall(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, complex):
            other = _as_complex(other, self.prec)
        if not isinstance(other, ComplexBall):
            return ComplexBall(self.re / other, self.im / other)
        if other.is_real():
            return ComplexBall(self.re / other.re, self.im / other.re)
        c, d = other.re, other.im
        den = c.sqr() + d.sqr()
        if den.contains_zero():
            raise DivisionByZeroEnclosure("divisor enclosure contains zero")
        a, b = self.re, self.im
        return ComplexBall((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        return _as_complex(other, self.prec) / self

    def __pow__(self, n):
        if not isinstance(n, Integral):
            raise TypeError("complex ball powers are integer only; use exp/log")
        n = int(n)
        if n < 0:
            return 1 / self ** (-n)
        result = ComplexBall(RealBall(mpfr(1), ZERO, self.prec))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.sqr()
        return result

    def sqr(self):
        a, b = self.re, self.im
        if self.is_real():
            return ComplexBall(a.sqr(), self.im)
        return ComplexBall(a.sqr() - b.sqr(), (a * b).mul_2exp(1))

    def mul_2exp(self, k):
        return ComplexBall(self.re.mul_2exp(k), self.im.mul_2exp(k))

    def abs(self):
        return (self.re.sqr() + self.im.sqr()).sqrt()

    # -- elementary functions ---------------------------------------------

    def exp(self):
        if self.is_real():
            return ComplexBall(self.re.exp(), self.im)
        e = self.re.exp()
        return ComplexBall(e * self.im.cos(), e * self.im.sin())

    def log(self):
        """Principal branch; raises on enclosures touching the branch cut."""
        if self.is_real() and self.re.is_positive():
            return ComplexBall(self.re.log(), self.im)
        modsq = self.re.sqr() + self.im.sqr()
        return ComplexBall(modsq.log().mul_2exp(-1), atan2(self.im, self.re))

    def sin(self):
        a, b = self.re, self.im
        if self.is_real():
            return ComplexBall(a.sin(), b)
        return ComplexBall(a.sin() * b.cosh(), a.cos() * b.sinh())

    def cos(self):
        a, b = self.re, self.im
        if self.is_real():
            return ComplexBall(a.cos(), b)
        return ComplexBall(a.cos() * b.cosh(), -(a.sin() * b.sinh()))


def _as_complex(x, prec):
    if isinstance(x, ComplexBall):
        return x
    return ComplexBall.exact(x, prec)


def to_ball(x, prec=DEFAULT_PREC):
    """Convert a number-like value to a RealBall or ComplexBall at ``prec`` bits."""
    if isinstance(x, (RealBall, ComplexBall)):
        return x.with_prec(max(prec, x.prec))
    if isinstance(x, (complex, tuple)):
        return ComplexBall.exact(x, prec)
    return RealBall.exact(x, prec)


# -- constants ----------------------------------------------------------------

_const_lock = threading.Lock()
_const_cache = {}


def _check_prec(prec):
    if not isinstance(prec, Integral) or prec < MIN_PREC:
        raise InvalidArgument(f"precision must be an integer >= {MIN_PREC} bits, got {prec!r}")
    if prec > PREC_CAP:
        raise InvalidArgument(f"precision {prec} exceeds the cap of {PREC_CAP} bits")


def _constant(name, prec):
    _check_prec(prec)
    key = (name, prec)
    ball = _const_cache.get(key)
    if ball is None:
        with _const_lock:
            ball = _const_cache.get(key)
            if ball is None:
                C = _ctx(prec)
                m = getattr(C, name)()
                ball = RealBall(m, _err(m, prec), prec)
                _const_cache[key] = ball
    return ball


def const_pi(prec=DEFAULT_PREC):
    """Enclosure of pi.  MPFR's value is correctly rounded, so radius <= ulp."""
    return _constant("const_pi", prec)


def const_euler_gamma(prec=DEFAULT_PREC):
    """Enclosure of the Euler-Mascheroni constant."""
    return _constant("const_euler", prec)


def const_log2(prec=DEFAULT_PREC):
    return _constant("const_log2", prec)


# -- dispatch and precision policy ------------------------------------------

_UNARY = {"sqrt", "log", "exp", "neg", "sin", "cos"}
_BINARY = {"add", "sub", "mul", "div", "pow"}


def elementary(op, args, precision_bits=DEFAULT_PREC):
    """Apply a named elementary operation to balls or number-like values."""
    _check_prec(precision_bits)
    xs = [to_ball(a, precision_bits) for a in args]
    if op in _UNARY:
        if len(xs) != 1:
            raise InvalidArgument(f"{op} takes one argument")
        x = xs[0]
        return -x if op == "neg" else getattr(x, op)()
    if op in _BINARY:
        if len(xs) != 2:
            raise InvalidArgument(f"{op} takes two arguments")
        a, b = xs
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            return a / b
        if isinstance(a, ComplexBall):
            return (b * a.log()).exp()
        return a.pow(b)
    raise InvalidArgument(f"unknown operation {op!r}")


def escalate(fn, *, start=DEFAULT_PREC, cap=PREC_CAP, accept=None, target_radius=None):
    """Call ``fn(prec)`` doubling ``prec`` until ``accept(result)`` holds.

    Returns ``(result, prec)``.  With ``target_radius`` and no ``accept``,
    the result's ``radius`` must not exceed the target.
    """
    if accept is None:
        if target_radius is None:
            return fn(start), start
        target = mpfr(target_radius)
        accept = lambda res: res.radius <= target  # noqa: E731
    prec = start
    last = None
    while True:
        last = fn(prec)
        if accept(last):
            return last, prec
        if prec >= cap:
            raise PrecisionExhausted(
                f"target not reached at the precision cap of {cap} bits",
                achieved=last, precision_bits=prec,
            )
        prec = min(2 * prec, cap)


# -- formatting ---------------------------------------------------------------


def prec_digits(prec):
    return int(math.ceil(prec * math.log10(2))) + 1


def sci_str(x, digits):
    """Deterministic scientific-notation decimal string of an mpfr."""
    if not isinstance(x, mpfr):
        x = mpfr(x)
    if x == 0:
        return "0"
    if gmpy2.is_nan(x) or gmpy2.is_infinite(x):
        return str(x)
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    head, tail = mant[0], mant[1:]
    e = exp - 1
    body = head + ("." + tail if tail else "")
    return f"{sign}{body}e{e:+d}" if e else f"{sign}{body}"


def exact_decimal(x):
    """Exact decimal expansion of a binary float (terminates)."""
    if not isinstance(x, mpfr):
        x = mpfr(x)
    n, d = x.as_integer_ratio()
    n, d = int(n), int(d)
    k = d.bit_length() - 1  # d is a power of two
    if k == 0:
        return str(n)
    digits = n * 5 ** k
    sign = "-" if digits < 0 else ""
    s = str(abs(digits)).rjust(k + 1, "0")
    whole, frac = s[:-k], s[-k:].rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def sci_up(x, digits=6):
    """Scientific-notation string of a non-negative mpfr, never below ``x``."""
    if not isinstance(x, mpfr):
        x = mpfr(x)
    if x == 0:
        return "0"
    s = sci_str(x, digits)
    if Fraction(s) >= _to_fraction(x):
        return s
    mant, _, exp = s.partition("e")
    whole, _, frac = mant.partition(".")
    digits_str = whole + frac
    bumped = str(int(digits_str) + 1)
    e = int(exp or 0) + len(bumped) - len(digits_str)
    body = bumped[0] + ("." + bumped[1:].rstrip("0") if bumped[1:].rstrip("0") else "")
    return f"{body}e{e:+d}" if e else body


def decimal_ball(ball, digits=None):
    """(mid, rad) decimal strings; the radius absorbs the midpoint's rounding."""
    digits = digits or prec_digits(ball.prec)
    mid = sci_str(ball.mid, digits)
    err = abs(Fraction(mid) - _to_fraction(ball.mid))
    rad = _to_fraction(ball.rad) + err
    r = UP.div(gmpy2.mpz(rad.numerator), gmpy2.mpz(rad.denominator)) if rad else ZERO
    return mid, sci_up(r)
