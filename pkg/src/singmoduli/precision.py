"""Arbitrary-precision complex values with attached error bounds.

Everything numeric in this package flows through BigComplex: an mpmath
complex value plus a single nonnegative absolute-error radius.  Propagation
is conservative (the true value is always within `err` of `val`, assuming
the inputs satisfied the same contract), with a small multiplicative safety
factor absorbing the rounding of the propagation arithmetic itself.  This is
deliberately *not* certified interval arithmetic; it is the cheap ball layer
the evaluators need to report honest tolerances.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import mpmath
from mpmath import mp
from mpmath.libmp import from_float, from_int, fzero

# Safety factor soaking up the rounding error of the bound arithmetic.
_SAFE = 1.0 + 2.0 ** -16


def _exact_mpf(x) -> mpmath.mpf:
    """Convert to mpf without rounding at the ambient precision.

    mpmath constructors round to the current working precision, which would
    silently degrade values computed under a higher local_prec and then
    stored in a ball after the context exits.  int and float convert
    exactly; an existing mpf is kept as-is.
    """
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, int):
        return mp.make_mpf(from_int(x))
    if isinstance(x, float):
        return mp.make_mpf(from_float(x))
    return mpmath.mpf(x)


def _exact_mpc(x) -> mpmath.mpc:
    """Convert to mpc without rounding, as _exact_mpf."""
    if isinstance(x, mpmath.mpc):
        return x
    if isinstance(x, mpmath.mpf):
        return mp.make_mpc((x._mpf_, fzero))
    if isinstance(x, int):
        return mp.make_mpc((from_int(x), fzero))
    if isinstance(x, float):
        return mp.make_mpc((from_float(x), fzero))
    if isinstance(x, complex):
        return mp.make_mpc((from_float(x.real), from_float(x.imag)))
    return mpmath.mpc(x)

VMIN = math.sqrt(3.0) / 2.0  # guaranteed Im lower bound after SL2 reduction


class PrecisionError(ValueError):
    """Raised when a requested evaluation cannot meet its error contract."""


class PoleProximityError(PrecisionError):
    """Raised when an evaluation point is too close to a pole or zero locus."""


@contextmanager
def local_prec(prec_bits):
    """Temporarily set the global mpmath binary precision."""
    old = mp.prec
    mp.prec = int(prec_bits)
    try:
        yield
    finally:
        mp.prec = old


def _ulp_slop(val):
    # rounding slop of one arithmetic op at the current precision
    return abs(val) * mpmath.mpf(2) ** (3 - mp.prec)


class BigComplex:
    """Complex ball: value `val` (mpc) with absolute error radius `err` (mpf)."""

    __slots__ = ("val", "err")

    def __init__(self, val, err=0):
        self.val = _exact_mpc(val)
        self.err = _exact_mpf(err)
        if self.err < 0:
            raise ValueError("negative error radius")

    # --- constructors -------------------------------------------------
    @staticmethod
    def exact(val):
        return BigComplex(val, 0)

    @staticmethod
    def from_parts(re, im=0, err=0):
        return BigComplex(
            mp.make_mpc((_exact_mpf(re)._mpf_, _exact_mpf(im)._mpf_)), err
        )

    # --- inspection ---------------------------------------------------
    @property
    def real(self):
        return self.val.real

    @property
    def imag(self):
        return self.val.imag

    def mag(self):
        return abs(self.val)

    def __repr__(self):
        return "BigComplex(%s, err=%s)" % (mpmath.nstr(self.val, 12), mpmath.nstr(self.err, 3))

    def __complex__(self):
        return complex(self.val)

    # --- arithmetic ---------------------------------------------------
    def _coerce(other):
        if isinstance(other, BigComplex):
            return other
        return BigComplex(other, 0)

    def __add__(self, other):
        o = BigComplex._coerce(other)
        v = self.val + o.val
        return BigComplex(v, (self.err + o.err + _ulp_slop(v)) * _SAFE)

    __radd__ = __add__

    def __neg__(self):
        return BigComplex(-self.val, self.err)

    def __sub__(self, other):
        o = BigComplex._coerce(other)
        v = self.val - o.val
        return BigComplex(v, (self.err + o.err + _ulp_slop(v)) * _SAFE)

    def __rsub__(self, other):
        return BigComplex._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = BigComplex._coerce(other)
        v = self.val * o.val
        e = abs(self.val) * o.err + abs(o.val) * self.err + self.err * o.err
        return BigComplex(v, (e + _ulp_slop(v)) * _SAFE)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = BigComplex._coerce(other)
        ob = abs(o.val)
        if ob <= 2 * o.err:
            raise PoleProximityError("division by a ball containing 0")
        v = self.val / o.val
        # |x/y - x'/y'| <= (e_x + |x/y| e_y) / (|y| - e_y)
        e = (self.err + abs(v) * o.err) / (ob - o.err)
        return BigComplex(v, (e + _ulp_slop(v)) * _SAFE)

    def __rtruediv__(self, other):
        return BigComplex._coerce(other).__truediv__(self)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise TypeError("only nonnegative integer powers")
        out = BigComplex.exact(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def conj(self):
        return BigComplex(mpmath.conj(self.val), self.err)

    def abs_upper(self):
        """Rigorous upper bound for |true value|."""
        return abs(self.val) + self.err

    def abs_lower(self):
        """Rigorous lower bound for |true value| (floored at 0)."""
        lo = abs(self.val) - self.err
        return lo if lo > 0 else mpmath.mpf(0)


def bc_exp(z: BigComplex) -> BigComplex:
    v = mpmath.exp(z.val)
    # |e^w - e^w'| <= |e^w'| (e^{|w-w'|} - 1)
    growth = mpmath.expm1(z.err) if z.err < 700 else mpmath.inf
    return BigComplex(v, (abs(v) * growth + _ulp_slop(v)) * _SAFE)


def bc_sqrt(z: BigComplex) -> BigComplex:
    az = abs(z.val)
    if az <= 4 * z.err:
        raise PoleProximityError("sqrt of a ball containing 0")
    if z.val.real < 0 and abs(z.val.imag) <= z.err:
        # ball straddles the branch cut; principal sqrt not single-valued on it
        raise PoleProximityError("sqrt ball touches the branch cut")
    v = mpmath.sqrt(z.val)
    e = z.err / abs(v)  # |sqrt z - sqrt z'| = |z - z'| / |sqrt z + sqrt z'|
    return BigComplex(v, (e + _ulp_slop(v)) * _SAFE)


@dataclass(frozen=True)
class EvalContext:
    """Evaluation request: target precision, series length policy, Im floor.

    prec    -- working precision in bits (>= 64)
    terms   -- optional q-series truncation override; None lets each
               evaluator choose the shortest length meeting the tail target
               2^(-prec-10) at v = vmin
    vmin    -- lower bound on Im after fundamental-domain reduction; the
               reduction guarantees sqrt(3)/2, recorded here so tail bounds
               can quote it
    """

    prec: int = 128
    terms: int | None = None
    vmin: float = VMIN

    def __post_init__(self):
        if self.prec < 64:
            raise ValueError("prec must be >= 64 (got %d)" % self.prec)
        if self.terms is not None and self.terms < 4:
            raise ValueError("terms override too small")

    def with_prec(self, prec):
        return EvalContext(prec=prec, terms=self.terms, vmin=self.vmin)

    def bumped(self, extra):
        return self.with_prec(self.prec + extra)

    @property
    def eps(self):
        """Target resolution 2^(-prec)."""
        return mpmath.mpf(2) ** (-self.prec)


DEFAULT_CTX = EvalContext()
