"""Certified Gamma, zeta and xi, plus the scalar functions built on them.

Conventions
-----------
All public functions accept a ball or a number-like value (int, decimal
string, Fraction, float, complex) and return a ball.  Number-like inputs
are re-rounded at every precision tried, so escalation can shrink them;
ball inputs keep their own radius.

xi is evaluated through the entire factorisation

    xi(s) = (s - 1) zeta(s) * pi^(-s/2) * Gamma(1 + s/2)

with (s - 1) zeta(s) computed directly from the Euler-Maclaurin formula
multiplied through by (s - 1).  Nothing is divided by s - 1, so s = 1
(and s = 0 via the reflection s -> 1 - s) need no special casing.
"""
from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from .balls import (
    DEFAULT_PREC,
    PREC_CAP,
    UP,
    ComplexBall,
    RealBall,
    const_pi,
    escalate,
    to_ball,
)
from .errors import DomainViolation, InvalidArgument, PoleEnclosure, PrecisionExhausted

GUARD_BITS = 24
_LOG2_2PI = math.log2(2 * math.pi)


@dataclass(frozen=True)
class EvalRequest:
    """How hard to try: stop once the output radius is at most ``target_radius``."""

    target_radius: float | None = None
    max_precision_bits: int = PREC_CAP
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self):
        if self.target_radius is not None and not self.target_radius > 0:
            raise InvalidArgument("target_radius must be positive")
        if self.max_precision_bits > PREC_CAP:
            raise InvalidArgument(f"max_precision_bits exceeds the cap of {PREC_CAP}")
        if self.precision_bits > self.max_precision_bits:
            raise InvalidArgument("starting precision exceeds max_precision_bits")


def _run(core, point, req, prec):
    """Evaluate ``core(ball, wp)`` once, or escalate under ``req``."""
    if req is None or req.target_radius is None:
        if prec is None:
            prec = req.precision_bits if req else getattr(point, "prec", DEFAULT_PREC)
        return core(to_ball(point, prec), prec)
    res, _ = escalate(
        lambda p: core(to_ball(point, p), p),
        start=req.precision_bits,
        cap=req.max_precision_bits,
        target_radius=req.target_radius,
    )
    return res


# -- Bernoulli numbers ---------------------------------------------------------

_bern_lock = threading.Lock()
_bern = [Fraction(1)]  # _bern[k] == B_{2k}


def bernoulli_2k(k):
    """Exact B_{2k}, via tangent numbers (Brent-Harvey); cached."""
    if k < len(_bern):
        return _bern[k]
    with _bern_lock:
        if k < len(_bern):
            return _bern[k]
        n = max(k, 2 * len(_bern), 32)
        T = [0] * (n + 1)
        T[1] = 1
        for j in range(2, n + 1):
            T[j] = (j - 1) * T[j - 1]
        for i in range(2, n + 1):
            for j in range(i, n + 1):
                T[j] = (j - i) * T[j - 1] + (j - i + 2) * T[j]
        table = [Fraction(1)]
        for i in range(1, n + 1):
            four = 4 ** i
            b = Fraction(2 * i * T[i], four * (four - 1))
            table.append(b if i % 2 else -b)
        _bern[:] = table
        return _bern[k]


def _log2_abs_fraction(q):
    return math.log2(abs(q.numerator)) - math.log2(q.denominator)


@functools.lru_cache(maxsize=None)
def _stirling_coeff(k, prec):
    return RealBall.exact(bernoulli_2k(k) / (2 * k * (2 * k - 1)), prec)


@functools.lru_cache(maxsize=None)
def _em_coeff(k, prec):
    return RealBall.exact(bernoulli_2k(k) / math.factorial(2 * k), prec)


@functools.lru_cache(maxsize=None)
def _log_int(n, prec):
    return RealBall.exact(n, prec).log()


@functools.lru_cache(maxsize=None)
def _half_log_2pi(prec):
    return (const_pi(prec) * 2).log().mul_2exp(-1)


@functools.lru_cache(maxsize=None)
def _log_pi(prec):
    return const_pi(prec).log()


# -- helpers ---------------------------------------------------------------------


def _re(x):
    return x.re if isinstance(x, ComplexBall) else x


def _approx(x):
    if isinstance(x, ComplexBall):
        return complex(float(x.re.mid), float(x.im.mid))
    return complex(float(x.mid), 0.0)


def _real_axis_meets(x):
    return not isinstance(x, ComplexBall) or x.im.contains_zero()


def _encloses_nonpositive_integer(x):
    if not _real_axis_meets(x):
        return False
    r = _re(x)
    lo, hi = r.lower(), r.upper()
    n = math.floor(min(float(hi), 0.0)) if abs(hi) < 2 ** 60 else None
    if n is None:
        return lo <= 0
    return mpfr(n) >= lo


def _encloses(x, value):
    if not _real_axis_meets(x):
        return False
    return _re(x).contains(value)


def _modulus_upper(x):
    """Rigorous upper bound of |x| as a float-sized mpfr (64-bit work)."""
    if isinstance(x, ComplexBall):
        a, b = x.re.mag(), x.im.mag()
        return UP.sqrt(UP.add(UP.square(a), UP.square(b)))
    return x.mag()


def _with_error(x, err):
    """Widen a real or complex ball by an absolute error ``err``."""
    if isinstance(x, ComplexBall):
        return ComplexBall(x.re.add_error(err), x.im.add_error(err))
    return x.add_error(err)


def _exp(x):
    return x.exp()


def _finish(x, prec):
    return x.with_prec(prec)


# -- Gamma -------------------------------------------------------------------------


def _loggamma_stirling(w, wp):
    """log Gamma(w) for Re(w) large, with the certified Stirling remainder."""
    wf = _approx(w)
    absw = abs(wf)
    # sec^2(arg(w)/2) = 2|w| / (|w| + Re w); equals 1 on the positive axis
    log2_sec2 = math.log2(2 * absw / (absw + wf.real))
    target = -(wp + 8)

    half = RealBall.exact(Fraction(1, 2), wp)
    result = (w - half) * w.log() - w + _half_log_2pi(wp)
    winv = 1 / w
    winv2 = winv.sqr()
    power = winv
    K = 1
    while True:
        b = bernoulli_2k(K)
        est = (_log2_abs_fraction(b) - math.log2(2 * K * (2 * K - 1))
               - (2 * K - 1) * math.log2(absw) + K * log2_sec2)
        if est < target:
            break
        if K > 4 * absw + 64:
            raise PrecisionExhausted("Stirling series did not reach the target; shift too small")
        result = result + _stirling_coeff(K, wp) * power
        power = power * winv2
        K += 1

    # rigorous remainder bound at 64 bits
    lo = 64
    absw_lo = (w.abs() if isinstance(w, ComplexBall) else w).with_prec(lo).mig()
    re_lo = _re(w).with_prec(lo).lower()
    bound = RealBall.exact(abs(bernoulli_2k(K)) / (2 * K * (2 * K - 1)), lo)
    bound = bound / RealBall(absw_lo, mpfr(0), lo) ** (2 * K - 1)
    if isinstance(w, ComplexBall):
        absw_hi = _modulus_upper(w)
        sec2 = 2 / (1 + RealBall(re_lo, mpfr(0), lo) / RealBall(absw_hi, mpfr(0), lo))
        bound = bound * sec2 ** K
    return _with_error(result, bound.upper())


def _gamma_core(s, wp):
    if _encloses_nonpositive_integer(s):
        raise PoleEnclosure("Gamma argument encloses a non-positive integer")
    p = wp + GUARD_BITS
    s = s.with_prec(p)
    sf = _approx(s)
    # |w| needed so that exp(-2 pi |w| cos^2(arg/2)) < 2^-p
    r0 = (p + 16) * math.log(2) / (2 * math.pi) + 4
    for _ in range(3):
        re_w = max(r0, sf.real)
        absw = math.hypot(re_w, sf.imag)
        c = (1 + re_w / absw) / 2
        r0 = (p + 16) * math.log(2) / (2 * math.pi * c) + 4
    n = max(0, math.ceil(r0 - sf.real))
    w = s + n
    g = _loggamma_stirling(w, p).exp()
    if n:
        prod = s
        for j in range(1, n):
            prod = prod * (s + j)
        g = g / prod
    return _finish(g, wp)


def gamma(s, req=None, *, prec=None):
    """Certified Gamma(s) for real or complex ``s``.

    Shifts ``s`` right by the recurrence until the Stirling series with its
    remainder bound reaches the working precision, then divides back.
    """
    return _run(_gamma_core, s, req, prec)


# -- zeta ----------------------------------------------------------------------


def _pow_neg(logn, s):
    """n^(-s) given log n."""
    return (-(s * logn)).exp()


def _em_parameters(s, p):
    sf = _approx(s)
    N = max(8, math.ceil(p / 6) + math.ceil(abs(sf.imag)) + 4)
    return N


def _zeta_em(s, p, times_sm1):
    """Euler-Maclaurin zeta(s), or (s - 1) zeta(s) when ``times_sm1``.

    Remainder after M Bernoulli terms (Johansson, Hurwitz zeta, Thm 1):
        |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} * Y^(1 - sigma - 2M) / (sigma + 2M - 1)
    with Y = N + 1 the first omitted integer.
    """
    sf = _approx(s)
    N = _em_parameters(s, p)
    Y = N + 1
    one = RealBall.exact(1, p)
    sm1 = s - one

    direct = None
    for n in range(1, N + 1):
        t = one if n == 1 else _pow_neg(_log_int(n, p), s)
        direct = t if direct is None else direct + t
    ys = _pow_neg(_log_int(Y, p), s)                  # Y^-s
    y1s = ys * Y                                      # Y^(1-s)

    if times_sm1:
        head = sm1 * direct + y1s
        mag_est = max(abs(_approx(head)), 1e-300)
    else:
        if _encloses(s, 1) or (isinstance(sm1, RealBall) and sm1.contains_zero()):
            raise PoleEnclosure("zeta argument encloses the pole at s = 1")
        head = direct + y1s / sm1
        mag_est = max(abs(_approx(head)), 1e-300)
    target = math.log2(mag_est) - (p + 8)

    sigma_f = sf.real
    tail = ys.mul_2exp(-1)
    u = s * ys / Y                                    # (s)_1 Y^(-s-1)
    y2 = Y * Y
    log2Y = math.log2(Y)
    lp = math.log2(max(abs(sf), 1e-300))              # log2 |(s)_{2M-1}| running
    M = 1
    while True:
        # bound with M terms kept: uses |(s)_{2M}|
        lp2 = lp + math.log2(max(abs(sf + 2 * M - 1), 1e-300))
        e = sigma_f + 2 * M - 1
        if e > 0.5:
            est = 2 + lp2 - 2 * M * _LOG2_2PI + (1 - sigma_f - 2 * M) * log2Y - math.log2(e)
            if times_sm1:
                est += math.log2(max(abs(sf - 1), 1e-300))
            if est < target:
                break
        if M > 2 * math.pi * Y + 64:
            raise PrecisionExhausted("Euler-Maclaurin parameters insufficient")
        tail = tail + _em_coeff(M, p) * u
        u = u * (s + (2 * M - 1)) * (s + 2 * M) / y2
        lp = lp2 + math.log2(max(abs(sf + 2 * M), 1e-300))
        M += 1

    # rigorous remainder at 64 bits
    lo = 64
    sig_lo = _re(s).lower()
    e_ball = RealBall(sig_lo, mpfr(0), lo) + (2 * M - 1)
    if not e_ball.is_positive():
        raise PrecisionExhausted("Euler-Maclaurin remainder not valid for this sigma")
    s64 = s.with_prec(lo) if not isinstance(s, ComplexBall) else ComplexBall(
        s.re.with_prec(lo), s.im.with_prec(lo))
    poch = mpfr(1)
    for j in range(2 * M):
        poch = UP.mul(poch, _modulus_upper(s64 + j))
    two_pi = const_pi(lo) * 2
    bound = RealBall(poch, mpfr(0), lo) * 4 / two_pi ** (2 * M)
    bound = bound * (-(e_ball * _log_int(Y, lo))).exp() / e_ball
    if times_sm1:
        bound = bound * RealBall(_modulus_upper(sm1.with_prec(lo) if isinstance(sm1, RealBall)
                                                else ComplexBall(sm1.re.with_prec(lo), sm1.im.with_prec(lo))),
                                 mpfr(0), lo)
        result = head + sm1 * tail
    else:
        result = head + tail
    return _with_error(result, bound.upper())


def _sinc(w, p):
    """sin(w)/w, entire; series near the origin."""
    mag = _modulus_upper(w)
    if mag < 1:
        one = RealBall.exact(1, p)
        w2 = w.sqr()
        term = one if isinstance(w, RealBall) else ComplexBall(one)
        total = term
        k = 0
        magf = float(mag)
        while True:
            k += 1
            term = -(term * w2) / ((2 * k) * (2 * k + 1))
            total = total + term
            # next omitted term |w|^{2k+2}/(2k+3)!; tail <= 2x that
            est = (2 * k + 2) * math.log2(max(magf, 1e-300)) - math.lgamma(2 * k + 4) / math.log(2)
            if est < -(p + 8):
                break
        rem = UP.mul_2exp(UP.div(UP.pow(mag, 2 * k + 2), mpfr(math.factorial(2 * k + 3))), 1)
        return _with_error(total, rem)
    return w.sin() / w


def _zeta_reflect(s, p):
    """zeta(s) = -2^(s-1) pi^s sinc(pi s/2) Gamma(1-s) (w-1)zeta(w) at w = 1 - s."""
    one = RealBall.exact(1, p)
    pi = const_pi(p)
    w = one - s
    E = _zeta_em(w, p, times_sm1=True)
    two_pow = ((s - one) * _log_int(2, p)).exp()
    pi_pow = (s * _log_pi(p)).exp()
    sc = _sinc((s * pi).mul_2exp(-1), p)
    g = _gamma_core(w, p)
    return -(two_pow * pi_pow * sc * g * E)


def _zeta_core(s, wp, method="auto"):
    p = wp + GUARD_BITS
    s = s.with_prec(p)
    if method == "auto":
        method = "em" if _re(s).mid >= 0.5 else "reflect"
    if method == "em":
        if _encloses(s, 1):
            raise PoleEnclosure("zeta argument encloses the pole at s = 1")
        return _finish(_zeta_em(s, p, times_sm1=False), wp)
    if method == "reflect":
        if _encloses(s, 1):
            raise PoleEnclosure("zeta argument encloses the pole at s = 1")
        return _finish(_zeta_reflect(s, p), wp)
    raise InvalidArgument(f"unknown zeta method {method!r}")


def zeta(s, req=None, *, prec=None, method="auto"):
    """Certified zeta(s).

    ``method`` is ``"auto"`` (Euler-Maclaurin for Re s >= 1/2, reflection
    below), or forces ``"em"`` / ``"reflect"`` for cross-checking.
    """
    return _run(lambda x, p: _zeta_core(x, p, method), s, req, prec)


def zeta_times_s_minus_1(s, req=None, *, prec=None):
    """(s - 1) zeta(s) as one entire quantity; equals 1 at s = 1."""
    def core(x, wp):
        p = wp + GUARD_BITS
        x = x.with_prec(p)
        if _re(x).mid >= 0.5:
            return _finish(_zeta_em(x, p, times_sm1=True), wp)
        return _finish((x - 1) * _zeta_reflect(x, p), wp)
    return _run(core, s, req, prec)


# -- xi ------------------------------------------------------------------------


def _xi_core(s, wp, method="auto"):
    p = wp + GUARD_BITS
    s = s.with_prec(p)
    one = RealBall.exact(1, p)
    if method not in ("auto", "direct"):
        raise InvalidArgument(f"unknown xi method {method!r}")
    if _re(s).mid < 0.5:
        if method == "auto":
            s = one - s
            E = _zeta_em(s, p, times_sm1=True)
        else:
            E = (s - one) * _zeta_reflect(s, p)
    else:
        E = _zeta_em(s, p, times_sm1=True)
    half_s = s.mul_2exp(-1)
    factor = (-(half_s * _log_pi(p))).exp() * _gamma_core(half_s + one, p)
    return _finish(E * factor, wp)


def xi(s, req=None, *, prec=None, method="auto"):
    """Certified Riemann xi(s) = s(s-1)/2 pi^(-s/2) Gamma(s/2) zeta(s).

    ``method="auto"`` uses xi(s) = xi(1-s) to keep the zeta evaluation in
    Re >= 1/2; ``"direct"`` goes through the zeta reflection formula
    instead, which makes the symmetry an actual check.
    """
    return _run(lambda x, p: _xi_core(x, p, method), s, req, prec)


# -- change of variable and psi -------------------------------------------------


def s_of_z(z, *, prec=None):
    """Root s = (1 + sqrt(1 + 4z)) / 2 of s^2 - s = z, for z > -1/4."""
    z = to_ball(z, prec or getattr(z, "prec", DEFAULT_PREC))
    if isinstance(z, ComplexBall):
        raise DomainViolation("s_of_z is defined on real z only")
    disc = z.mul_2exp(2) + 1
    if not disc.is_positive():
        raise DomainViolation("z enclosure reaches -1/4 or below; sqrt(1+4z) is not real")
    return (disc.sqrt() + 1).mul_2exp(-1)


def _psi_core(z, wp):
    if isinstance(z, ComplexBall):
        raise DomainViolation("psi is defined on real z only")
    if z.is_exact() and z.mid == 0:
        return RealBall.exact(0, wp)
    p = wp + GUARD_BITS
    z = z.with_prec(p)
    four_pi2 = const_pi(p).sqr().mul_2exp(2)
    if not z.certainly_lt(four_pi2):
        raise DomainViolation("psi requires z < 4 pi^2")
    s = s_of_z(z)
    v = _xi_core(s, p).mul_2exp(1)
    if not v.is_positive():
        raise PrecisionExhausted("2 xi(s) enclosure not certainly positive")
    return _finish(v.log(), wp)


def psi(z, req=None, *, prec=None):
    """log(2 xi(s(z))) on -1/4 < z < 4 pi^2; exactly 0 at z = 0.

    The audits use it for both the psi-pair claims and the positivity claim.
    """
    return _run(_psi_core, z, req, prec)


# -- truncated Hadamard product --------------------------------------------------


def xi_hadamard_partial(s, catalog, n_terms, *, prec=None):
    """1/2 times the product over the first ``n_terms`` on-line zeros and all
    off-line zeros of the factors paired by the s -> 1 - s, conjugate symmetry.

    Factors are taken in ascending ordinate.  At s = 0 or 1 every factor is
    exactly one.
    """
    on = catalog.omega1
    if not catalog.entries:
        raise InvalidArgument("catalog is empty")
    if n_terms < 0 or n_terms > len(on):
        raise InvalidArgument(f"n_terms must lie in [0, {len(on)}]")
    p = prec or getattr(s, "prec", DEFAULT_PREC)
    s = to_ball(s, p)
    w = s.sqr() - s
    quarter = RealBall.exact(Fraction(1, 4), p)
    one = RealBall.exact(1, p)
    prod = one if isinstance(w, RealBall) else ComplexBall(one)
    for entry in on[:n_terms]:
        prod = prod * (w / (entry.beta.with_prec(p).sqr() + quarter) + one)
    half = RealBall.exact(Fraction(1, 2), p)
    for entry in catalog.omega2:
        b2 = entry.beta.with_prec(p).sqr()
        d2 = entry.delta.with_prec(p).sqr()
        den = (quarter + d2 + b2).sqr() - d2
        num = w.sqr() + w * (half - d2.mul_2exp(1) + b2.mul_2exp(1))
        prod = prod * (num / den + one)
    return prod * half
