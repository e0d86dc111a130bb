"""Sums over zeros: per-zero terms, partial sums and certified tails.

Tails beyond the last tabulated ordinate T are bounded by Stieltjes
integration against the counting function N(t) = M(t) + R(t), where
M(t) = (t/2pi) log(t/2pi) - t/2pi and |R(t)| <= C log t.  For a decreasing
term f this gives

    sum_{beta > T} f(beta) in  int_T^inf f M' dt  +/-  C (2 f(T) log T + int_T^inf f/t dt).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import gmpy2
from gmpy2 import mpfr

from .balls import UP, RealBall, _ctx, const_euler_gamma, const_pi
from .catalog import ZeroCatalog
from .errors import (
    DomainViolation,
    EmptyCatalog,
    InvalidArgument,
    OffLineZerosPresent,
    TailValidationError,
    TTooSmall,
)

SUM_PREC = 128
BLOCK = 4096
TAIL_T_MIN = 100
DEFAULT_SLACK = 2.0

# explicit S(T) bound (Trudgian 2014), valid for T >= e:
#   |N(T) - M(T) - 7/8| <= 0.112 log T + 0.278 log log T + 2.510 + 0.2/T
_TR_A, _TR_B, _TR_C = 0.112, 0.278, 2.510


def _two_pi_floor(prec):
    return 2 * const_pi(prec).upper()


def lambda_term(beta, prec=None):
    """1/(1/4 + beta^2) for an on-line zero 1/2 + i beta."""
    beta = beta if isinstance(beta, RealBall) else RealBall.exact(beta, prec or SUM_PREC)
    prec = prec or beta.prec
    if not beta.lower() > _two_pi_floor(64):
        raise DomainViolation("lambda_term needs beta > 2 pi")
    return _lambda_from_bounds(beta.lower(), beta.upper(), prec, 1)


def _lambda_from_bounds(lo, hi, prec, power):
    # decreasing in beta: upper value from the lower ordinate and vice versa
    D = _ctx(prec, gmpy2.RoundDown)
    U = _ctx(prec, gmpy2.RoundUp)
    small = D.div(1, U.add(U.square(hi), 0.25))
    big = U.div(1, D.add(D.square(lo), 0.25))
    if power == 2:
        small, big = D.square(small), U.square(big)
    return RealBall.from_bounds(small, big, prec)


@dataclass(frozen=True)
class MuNu:
    mu: RealBall
    nu: RealBall
    product: RealBall


def mu_nu_terms(delta, beta, prec=None):
    """Per-zero terms of an off-line quadruplet 1/2 +/- delta +/- i beta."""
    prec = prec or SUM_PREC
    delta = delta if isinstance(delta, RealBall) else RealBall.exact(delta, prec)
    beta = beta if isinstance(beta, RealBall) else RealBall.exact(beta, prec)
    if delta.is_negative() or not delta.certainly_lt(RealBall.exact("0.5")) \
            or delta.lower() < 0:
        raise DomainViolation("mu_nu_terms needs 0 <= delta < 1/2")
    if not beta.lower() > _two_pi_floor(64):
        raise DomainViolation("mu_nu_terms needs beta > 2 pi")
    if delta.is_exact() and delta.mid == 0:
        lam = lambda_term(beta, prec)
        mu, nu = lam.mul_2exp(1), lam * lam
        return MuNu(mu, nu, mu * nu)
    quarter = RealBall.exact("0.25", prec)
    d2, b2 = delta.sqr(), beta.sqr()
    base = quarter + d2 + b2
    den = base.sqr() - d2
    mu = (RealBall.exact("0.5", prec) - d2.mul_2exp(1) + b2.mul_2exp(1)) / den
    nu = den.inv()
    return MuNu(mu, nu, mu * nu)


def reciprocal_constant(precision_bits=SUM_PREC):
    """1 + gamma/2 - log(4 pi)/2, the sum of 1/rho over all zeros."""
    p = precision_bits + 16
    val = RealBall.exact(1, p) + const_euler_gamma(p).mul_2exp(-1) \
        - (const_pi(p).mul_2exp(2)).log().mul_2exp(-1)
    return val.with_prec(precision_bits)


# -- tail ------------------------------------------------------------------------


@dataclass(frozen=True)
class TailBound:
    low: RealBall
    high: RealBall
    T: RealBall
    power: int
    slack: float


def _check_power(power):
    if power not in (1, 2):
        raise InvalidArgument("power must be 1 or 2")


def tail_bound(T, power, slack=DEFAULT_SLACK, prec=64):
    """Certified [low, high] for the sum of lambda^power over zeros above T."""
    _check_power(power)
    T = T if isinstance(T, RealBall) else RealBall.exact(T, prec)
    if not T.lower() >= TAIL_T_MIN:
        raise TTooSmall(f"tail envelope is only validated for T >= {TAIL_T_MIN}")
    T = T.with_prec(max(prec, T.prec))
    p = T.prec
    two_p = 2 * power
    k = RealBall.exact(two_p - 1, p)
    twopi = const_pi(p).mul_2exp(1)
    logT = T.log()
    Tm = (T ** two_p).inv()  # T^(-2p)
    J = (T * Tm) / (twopi * k) * ((T / twopi).log() + k.inv())
    J_low = J / (RealBall.exact(1, p) + (T.sqr().mul_2exp(2)).inv()) ** power
    C = RealBall.exact(slack, p)
    env = C * (Tm * logT.mul_2exp(1) + Tm / RealBall.exact(two_p, p))
    lo = (J_low - env).lower()
    lo = max(lo, mpfr(0))
    hi = (J + env).upper()
    return TailBound(RealBall(lo, mpfr(0), p), RealBall(hi, mpfr(0), p),
                     T, power, float(slack))


@dataclass(frozen=True)
class EnvelopeCheck:
    slack: float
    ok: bool
    worst_ratio: float
    worst_T: float
    beyond_ratio: float


def _explicit_ratio(T):
    lt = math.log(T)
    return (0.875 + _TR_A * lt + _TR_B * math.log(lt) + _TR_C + 0.2 / T) / lt


def validate_envelope(catalog, slack=DEFAULT_SLACK):
    """Check |N(t) - M(t)| <= C log t on [100, cutoff] against the catalog,
    and that C dominates the explicit S(T) bound beyond the cutoff."""
    if not catalog.entries:
        raise EmptyCatalog("catalog is empty")
    if catalog.entries[0].index != 1:
        raise InvalidArgument("catalog must start at the first zero")
    two_pi = 2 * math.pi

    def M(t):
        x = t / two_pi
        return x * math.log(x) - x

    mids = [float(e.beta.mid) for e in catalog.entries]
    worst, worst_t = 0.0, float(TAIL_T_MIN)
    # N is constant = k on [beta_k, beta_{k+1}); M increases across it
    k0 = sum(1 for b in mids if b < TAIL_T_MIN)
    pieces = [(TAIL_T_MIN, mids[k0] if k0 < len(mids) else mids[-1], k0)]
    for k in range(max(k0, 1), len(mids)):
        pieces.append((mids[k - 1], mids[k], k))
    for a, b, n in pieces:
        a = max(a, TAIL_T_MIN)
        if b < a:
            continue
        dev = max(abs(n - M(a)), abs(n - M(b)))
        # 1e-9 relative margin covers float evaluation and table error
        r = (dev + 1e-9 * M(b) + 1e-6) / math.log(a)
        if r > worst:
            worst, worst_t = r, a
    beyond = _explicit_ratio(max(mids[-1], TAIL_T_MIN))
    ok = worst <= slack and beyond <= slack
    return EnvelopeCheck(float(slack), ok, worst, worst_t, beyond)


# -- partial sums ------------------------------------------------------------------


@dataclass(frozen=True)
class SumResult:
    partial: RealBall
    tail_low: Optional[RealBall]
    tail_high: Optional[RealBall]
    enclosure: Optional[RealBall]
    terms_used: int
    cutoff_T: RealBall
    power: int
    tail_slack: float
    envelope: Optional[EnvelopeCheck] = None
    notes: str = ""


def _block_terms(args):
    bounds, power, prec = args
    mids, rads = [], []
    for lo, hi in bounds:
        t = _lambda_from_bounds(lo, hi, prec, power)
        mids.append(t.mid)
        rads.append(t.rad)
    return mids, rads


def partial_terms(entries, power, prec=SUM_PREC, workers=1):
    """Exactly rounded sum of term midpoints plus accumulated radii."""
    bounds = [(e.beta.lower(), e.beta.upper()) for e in entries]
    floor = _two_pi_floor(64)
    if bounds and not bounds[0][0] > floor:
        raise DomainViolation("ordinate below 2 pi")
    jobs = [(bounds[i:i + BLOCK], power, prec) for i in range(0, len(bounds), BLOCK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_block_terms, jobs))
    else:
        results = [_block_terms(j) for j in jobs]
    mids, rads = [], []
    for m, r in results:  # index order
        mids.extend(m)
        rads.extend(r)
    # both sums are correctly rounded, so neither depends on the block layout
    rad = UP.fsum(rads)
    C = _ctx(prec)
    total = C.fsum(mids)
    if total.rc:
        rad = UP.add(rad, UP.mul_2exp(UP.abs(total), -prec))
    return RealBall(total, rad, prec)


def sum_lambda_power(catalog: ZeroCatalog, power: int, *, tail_slack=DEFAULT_SLACK,
                     prec=SUM_PREC, workers=1):
    """Sum of lambda_m^power over the catalog plus a certified tail."""
    _check_power(power)
    if not catalog.entries:
        raise EmptyCatalog("cannot sum over an empty catalog")
    if catalog.omega2:
        raise OffLineZerosPresent("direct sums assume every zero is on the line")
    if catalog.entries[0].index != 1:
        raise InvalidArgument("catalog must start at the first zero")
    partial = partial_terms(catalog.omega1, power, prec, workers)
    cutoff = catalog.cutoff
    T = RealBall.exact(cutoff.upper(), max(prec, cutoff.prec))
    if cutoff.upper() < TAIL_T_MIN:
        return SumResult(partial, None, None, None, len(catalog.entries), cutoff, power,
                         float(tail_slack),
                         notes=f"cutoff below {TAIL_T_MIN}: no certified tail")
    env = validate_envelope(catalog, tail_slack)
    if not env.ok:
        raise TailValidationError(
            f"|N(t) - M(t)| <= {tail_slack} log t fails (worst ratio {env.worst_ratio:.3f} "
            f"at t = {env.worst_T:.3f})")
    tb = tail_bound(T, power, tail_slack)
    lo = _ctx(prec, gmpy2.RoundDown).add(partial.lower(), tb.low.mid)
    hi = _ctx(prec, gmpy2.RoundUp).add(partial.upper(), tb.high.mid)
    enclosure = RealBall.from_bounds(lo, hi, prec)
    return SumResult(partial, tb.low, tb.high, enclosure, len(catalog.entries), cutoff,
                     power, float(tail_slack), env)

