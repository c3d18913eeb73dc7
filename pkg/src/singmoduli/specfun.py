"""Special functions: Kloosterman sums, Bessel I/J, incomplete gamma, zeta(3).

Bessel values come from the ascending series with explicit tail bounds (the
only orders needed are 1/2, 3/2 and 3); mpmath's own implementations serve as
an independent oracle in the tests, never as the production path.  Kloosterman
sums are exact unit-group sums, real by the d <-> -d pairing.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .precision import BigComplex, EvalContext, local_prec, _ulp_slop


# ----------------------------------------------------------------------
# Dedekind sums (shared by the eta multiplier and the Rademacher sum)
# ----------------------------------------------------------------------

@lru_cache(maxsize=65536)
def dedekind_sum(d: int, c: int) -> Fraction:
    """s(d, c) = sum_{j mod c} ((j/c)) ((dj/c)) as an exact rational, c > 0."""
    if c <= 0:
        raise ValueError("c must be positive")
    d %= c
    s = Fraction(0)
    for j in range(1, c):
        x = Fraction(j, c)
        y = Fraction(d * j % c, c)
        if y == 0:
            continue
        s += (x - Fraction(1, 2)) * (y - Fraction(1, 2))
    return s


# ----------------------------------------------------------------------
# Kloosterman sums
# ----------------------------------------------------------------------

def kloosterman(m: int, l: int, c: int, ctx: EvalContext | None = None) -> BigComplex:
    """K(m, l, c) = sum over units d mod c of exp(2 pi i (m d^-1 + l d)/c)."""
    ctx = ctx or EvalContext()
    if c < 1:
        raise ValueError("c must be >= 1")
    if c == 1:
        return BigComplex(1, 0)
    with local_prec(ctx.prec + 16):
        two_pi_i = 2j * mpmath.pi
        total = mpmath.mpc(0)
        nterms = 0
        for d in range(1, c):
            if math.gcd(d, c) != 1:
                continue
            dbar = pow(d, -1, c)
            phase = (m * dbar + l * d) % c
            total += mpmath.exp(two_pi_i * phase / c)
            nterms += 1
        # partial sums reach magnitude up to nterms, so the accumulated
        # rounding slop is quadratic in the term count
        err = (nterms + 4) * (nterms + 16) * mpmath.mpf(2) ** (-ctx.prec - 14)
    return BigComplex(total, err)


def mobius(n: int) -> int:
    """Moebius function by trial-division factorization (oracle helper)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1 if p == 2 else 2
    if n > 1:
        out = -out
    return out


def ramanujan_sum(c: int, m: int) -> int:
    """c_c(m) = sum_{d | gcd(m, c)} d * mu(c/d); equals K(m, 0, c) exactly."""
    g = math.gcd(abs(m), c) if m else c
    return sum(d * mobius(c // d) for d in range(1, g + 1) if g % d == 0)


# ----------------------------------------------------------------------
# Bessel functions (ascending series, orders 1/2, 3/2, 3 only in anger)
# ----------------------------------------------------------------------

def _gamma_shift(nu, k: int):
    """Gamma(nu + k + 1) for nu integer or half-integer, exact mpf at mp.prec."""
    return mpmath.gamma(mpmath.mpf(nu) + k + 1)


def _bessel_series(nu, x, signed: bool, prec: int) -> BigComplex:
    """sum_k (sign)^k (x/2)^(nu+2k) / (k! Gamma(nu+k+1)) with tail bound.

    signed=False gives I_nu, signed=True gives J_nu.  x > 0 real.
    """
    with local_prec(prec + 24):
        x = mpmath.mpf(x)
        half = x / 2
        target = mpmath.mpf(2) ** (-prec - 10)
        # term_k = (x/2)^(nu+2k) / (k! Gamma(nu+k+1))
        term = half ** mpmath.mpf(nu) / _gamma_shift(nu, 0)
        total = term
        gross = abs(term)  # unsigned sum: rounding scales with this, not
        k = 0              # with the (possibly tiny) alternating total
        while True:
            k += 1
            term = term * half * half / (k * (mpmath.mpf(nu) + k))
            total += (-term if (signed and k % 2) else term)
            gross += abs(term)
            # once the ratio q = (x/2)^2/((k+1)(nu+k+1)) < 1/2 the tail is
            # dominated by a geometric series with ratio q
            ratio = half * half / ((k + 1) * (mpmath.mpf(nu) + k + 1))
            if ratio < 0.5 and term * ratio / (1 - ratio) < target * max(abs(total), 1):
                tail = term * ratio / (1 - ratio)
                break
            if k > 100000:
                raise RuntimeError("bessel series failed to converge")
        round_err = (k + 4) * max(abs(total), gross) * mpmath.mpf(2) ** (-prec - 12)
        return BigComplex(total, tail + round_err)


def bessel_I(nu, x, ctx: EvalContext | None = None) -> BigComplex:
    """Modified Bessel I_nu(x) for x > 0, nu a (half-)integer >= 0."""
    ctx = ctx or EvalContext()
    if not x > 0:
        raise ValueError("x must be positive")
    return _bessel_series(nu, x, signed=False, prec=ctx.prec)


def bessel_I_3half_closed(x, ctx: EvalContext | None = None) -> BigComplex:
    """Closed form I_{3/2}(x) = sqrt(2/(pi x)) (cosh x - sinh x / x)."""
    ctx = ctx or EvalContext()
    with local_prec(ctx.prec + 16):
        x = mpmath.mpf(x)
        v = mpmath.sqrt(2 / (mpmath.pi * x)) * (mpmath.cosh(x) - mpmath.sinh(x) / x)
        err = 8 * abs(v) * mpmath.mpf(2) ** (-ctx.prec - 10)
        # cancellation guard for small x: cosh x - sinh x / x = x^2/3 + O(x^4)
        if x < 1:
            err += mpmath.cosh(x) * mpmath.mpf(2) ** (-ctx.prec - 10)
    return BigComplex(v, err)


def bessel_J(nu, x, ctx: EvalContext | None = None) -> BigComplex:
    """Bessel J_nu(x) for x > 0, nu a (half-)integer >= 0."""
    ctx = ctx or EvalContext()
    if not x > 0:
        raise ValueError("x must be positive")
    return _bessel_series(nu, x, signed=True, prec=ctx.prec)


def inc_gamma_upper(alpha: int, x, ctx: EvalContext | None = None) -> BigComplex:
    """Gamma(alpha, x) = (alpha-1)! e^(-x) sum_{j<alpha} x^j / j!  (integer alpha)."""
    ctx = ctx or EvalContext()
    if not (isinstance(alpha, int) and alpha >= 1):
        raise ValueError("alpha must be a positive integer")
    with local_prec(ctx.prec + 16):
        x = mpmath.mpf(x)
        s = mpmath.mpf(0)
        term = mpmath.mpf(1)
        for j in range(alpha):
            if j:
                term = term * x / j
            s += term
        v = mpmath.factorial(alpha - 1) * mpmath.exp(-x) * s
        err = (2 * alpha + 6) * abs(v) * mpmath.mpf(2) ** (-ctx.prec - 10)
    return BigComplex(v, err)


# ----------------------------------------------------------------------
# zeta(3), cached per precision
# ----------------------------------------------------------------------

_zeta3_cache: dict[int, mpmath.mpf] = {}
_zeta3_lock = threading.Lock()


_ZETA3_NMAX = 1 << 17  # direct summation cap; tail 1/(2 N^2) ~ 2.9e-11


def zeta3(prec: int = 128) -> BigComplex:
    """zeta(3) by direct series, tail bounded by 1/(2 N^2); cached per prec.

    The term count is capped, so for large `prec` the reported error radius
    is dominated by the (honest) series tail rather than by rounding.  Every
    consumer in this package tolerates that radius by a wide margin.
    """
    key = int(prec)
    with _zeta3_lock:
        hit = _zeta3_cache.get(key)
    N = min(1 << ((prec + 14) // 2), _ZETA3_NMAX)
    if hit is None:
        with local_prec(prec + 16):
            total = mpmath.mpf(0)
            for n in range(N, 0, -1):  # ascending magnitude: stable summation
                total += mpmath.mpf(1) / (mpmath.mpf(n) ** 3)
            hit = total
        with _zeta3_lock:
            _zeta3_cache[key] = hit
    tail = mpmath.mpf(1) / (2 * N * N)
    return BigComplex(hit, tail + abs(hit) * mpmath.mpf(2) ** (-prec - 6))
