"""Traces of singular moduli of P and the exact class polynomials they solve.

The trace route to the partition number: with D = 1 - 24n, sum P over the
Gamma_0(6)-classes of positive definite forms of discriminant D (including
imprimitive ones) normalized by 6 | a, b == 1 (mod 12); the sum is
(24n - 1) p(n).  The same singular values, restricted to primitive classes,
are the roots of a monic polynomial Hhat_D whose coefficients are rationals
with denominators dividing powers of |D|; clearing them by the substitution
W(y) = |D|^h Hhat_D(y/|D|) gives integers that can be recognized from a
sufficiently precise ball evaluation.  The full H_D is then assembled from
the Hhat factors across conductors.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .modeval import eval_modular
from .precision import BigComplex, EvalContext, PrecisionError, local_prec
from .qforms import (
    Discriminant,
    QuadForm,
    class_number,
    cm_point,
    gamma06_representatives,
)

_MAX_ESCALATIONS = 6


def eps_conductor(f: int) -> int:
    """+1 for f == +-1 (mod 12), else -1 (f must be a unit mod 12)."""
    if f % 2 == 0 or f % 3 == 0:
        raise ValueError("conductor must be coprime to 12: %d" % f)
    return 1 if f % 12 in (1, 11) else -1


def default_prec(D: int, nforms: int) -> int:
    """Working precision for discriminant D with nforms singular values.

    The dominant singular value has magnitude about e^(pi sqrt|D|/6); the
    10 bits per form cover coefficient growth in the class polynomial and
    the rest is slack for ball inflation.
    """
    base = math.ceil(math.pi * math.sqrt(-D) / (6 * math.log(2)))
    return base + 10 * nforms + 64


@dataclass(frozen=True)
class FormValue:
    """One Gamma_0(6)-class of discriminant D and its singular value."""

    conductor: int
    form: QuadForm  # the discriminant-D form (conductor times a primitive one)
    primitive: QuadForm  # normalized primitive form, 6|a, b == f (mod 12)
    rep_label: str
    value: BigComplex


def singular_forms(n: int):
    """(Discriminant, [(f, reduced, rep, normalized primitive)]) for D = 1-24n.

    One entry per Gamma_0(6)-class of Q_D: conductor f runs over f^2 | D, and
    the disc-D form is f times the normalized primitive form of D/f^2 whose
    middle coefficient is congruent to f mod 12 (f is its own inverse mod 12,
    so scaling by f lands on b == 1 mod 12).  Sorted deterministically.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    disc = Discriminant.for_partition(n)
    rows = []
    for f in disc.square_conductors():
        D2 = disc.D // (f * f)
        for (Qred, rep, Qn) in gamma06_representatives(D2, residue=f % 12):
            rows.append((f, Qred, rep, Qn))
    rows.sort(key=lambda t: (t[0], t[3].a, t[3].b, t[3].c))
    return disc, rows


def _eval_form(a: int, b: int, c: int, prec: int) -> BigComplex:
    ctx = EvalContext(prec=prec)
    tau = cm_point(QuadForm(a, b, c), prec)
    return eval_modular("P", tau, ctx)


def _form_job(args):
    a, b, c, prec = args
    val = _eval_form(a, b, c, prec)
    return (val.val.real._mpf_, val.val.imag._mpf_, val.err._mpf_)


def _job_to_ball(raw) -> BigComplex:
    # make_mpf/make_mpc are exact; mpf(tuple) would round to ambient prec
    re_raw, im_raw, err_raw = raw
    return BigComplex(
        mpmath.mp.make_mpc((re_raw, im_raw)), mpmath.mp.make_mpf(err_raw)
    )


def trace_P(n: int, ctx: EvalContext | None = None, threads: int = 1):
    """(trace ball, [FormValue]) where trace = sum of P over Q_D classes.

    threads > 1 evaluates the classes in separate processes (the evaluator
    mutates global mpmath precision, so threads would race); the summation
    order is always the sorted class order, independent of threads.
    """
    disc, rows = singular_forms(n)
    prec = ctx.prec if ctx is not None else default_prec(disc.D, len(rows))
    jobs = [(row[3].a, row[3].b, row[3].c, prec) for row in rows]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            raws = list(pool.map(_form_job, jobs))
        with local_prec(prec + 16):
            values = [_job_to_ball(r) for r in raws]
    else:
        values = [_eval_form(*job) for job in jobs]
    with local_prec(prec + 16):
        total = BigComplex(0)
        out = []
        for (f, Qred, rep, Qn), val in zip(rows, values):
            total = total + val
            out.append(
                FormValue(
                    conductor=f,
                    form=Qn.scaled(f),
                    primitive=Qn,
                    rep_label=rep.label,
                    value=val,
                )
            )
    return total, out


@dataclass(frozen=True)
class PartitionCertificate:
    """Result of the singular-trace route to p(n)."""

    n: int
    p: int
    residual: float  # |trace/(24n-1) - p| at the accepted precision
    err_bound: float  # ball radius of trace/(24n-1), a rigorous error bound
    prec: int
    nforms: int

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("partition number cannot be negative")


def partition_bo(n: int, ctx: EvalContext | None = None, threads: int = 1) -> PartitionCertificate:
    """p(n) through the trace of singular moduli, with certified rounding.

    Starts at the default precision policy (or ctx.prec if larger) and
    doubles until the trace divided by 24n - 1 sits within 1e-6 of an
    integer with a ball radius below 1e-6.
    """
    disc, rows = singular_forms(n)
    nforms = len(rows)
    prec = default_prec(disc.D, nforms)
    if ctx is not None and ctx.prec > prec:
        prec = ctx.prec
    target = mpmath.mpf("1e-6")
    for _ in range(_MAX_ESCALATIONS):
        total, _values = trace_P(n, EvalContext(prec=prec), threads=threads)
        with local_prec(prec + 16):
            denom = 24 * n - 1
            phat = total.val.real / denom
            err = total.err / denom + abs(total.val.imag) / denom
            k = int(mpmath.nint(phat))
            residual = abs(phat - k)
            if residual < target and err < target and k >= 0:
                return PartitionCertificate(
                    n=n,
                    p=k,
                    residual=float(residual),
                    err_bound=float(err),
                    prec=prec,
                    nforms=nforms,
                )
        prec *= 2
    raise PrecisionError("trace for n=%d did not certify after escalation" % n)


# ----------------------------------------------------------------------
# exact class polynomials
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HhatPolynomial:
    """Monic polynomial with roots P(tau_Q), Q primitive of discriminant D.

    coeffs[k] is the exact rational coefficient of x^(h-k); scaled[k] is the
    integer coefficient w_k = coeffs[k] |D|^k of the cleared polynomial
    W(y) = |D|^h Hhat(y/|D|).
    """

    D: int
    h: int
    coeffs: tuple
    scaled: tuple
    prec: int

    def __post_init__(self):
        if self.coeffs[0] != 1:
            raise ValueError("polynomial must be monic")
        if len(self.coeffs) != self.h + 1:
            raise ValueError("degree mismatch")

    def evaluate(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for cf in self.coeffs:
            acc = acc * x + cf
        return acc


def _poly_from_roots(values):
    """Ball coefficients of prod (x - v) in decreasing powers."""
    coeffs = [BigComplex(1)]
    for v in values:
        nxt = [BigComplex(1)]
        for k in range(1, len(coeffs) + 1):
            prev = coeffs[k] if k < len(coeffs) else BigComplex(0)
            lower = coeffs[k - 1]
            nxt.append(prev - v * lower)
        coeffs = nxt
    return coeffs


def _recognize_scaled(coeffs, absD: int, threshold):
    """Integers w_k = r_k |D|^k from ball coefficients, or None."""
    out = []
    sint = 1
    for cf in coeffs:
        w = cf.val.real * sint
        werr = (cf.err + abs(cf.val.imag)) * sint
        kint = int(mpmath.nint(w))
        if abs(w - kint) > threshold or werr > threshold:
            return None
        out.append(kint)
        sint *= absD
    return out


def build_Hhat(D: int, ctx: EvalContext | None = None, threads: int = 1) -> HhatPolynomial:
    """Exact Hhat_D by ball evaluation plus integer recognition.

    Recognition demands every scaled coefficient within 2^-32 of an integer
    (with ball radius below the same threshold), then repeats the whole
    computation with 64 extra bits and requires identical integers; failure
    escalates the precision by doubling.
    """
    if D >= 0 or D % 24 != 1:
        raise ValueError("D must be negative and 1 mod 24: %d" % D)
    h = class_number(D)
    absD = -D
    prec = ctx.prec if ctx is not None else default_prec(D, h)
    prec = max(prec, default_prec(D, h))
    threshold = mpmath.mpf(2) ** -32
    for _ in range(_MAX_ESCALATIONS):
        ints = _hhat_attempt(D, prec, threads, threshold)
        if ints is not None:
            confirm = _hhat_attempt(D, prec + 64, threads, threshold / 256)
            if confirm is not None and confirm == ints:
                coeffs = tuple(
                    Fraction(w, absD ** k) for k, w in enumerate(ints)
                )
                return HhatPolynomial(
                    D=D, h=h, coeffs=coeffs, scaled=tuple(ints), prec=prec
                )
        prec *= 2
    raise PrecisionError("Hhat recognition failed for D=%d" % D)


def _hhat_attempt(D: int, prec: int, threads: int, threshold):
    rows = gamma06_representatives(D, residue=1)
    jobs = sorted(
        (Qn.a, Qn.b, Qn.c, prec) for (_Qred, _rep, Qn) in rows
    )
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            raws = list(pool.map(_form_job, jobs))
        with local_prec(prec + 16):
            values = [_job_to_ball(r) for r in raws]
    else:
        values = [_eval_form(*job) for job in jobs]
    with local_prec(prec + 16):
        coeffs = _poly_from_roots(values)
        return _recognize_scaled(coeffs, -D, threshold)


@dataclass(frozen=True)
class HPolynomial:
    """H_D as an exact product of Hhat factors over conductors.

    coeffs are rationals in decreasing powers; factors records, per
    conductor f, the sign eps(f) and the Hhat piece of discriminant D/f^2.
    """

    D: int
    degree: int
    coeffs: tuple
    factors: tuple  # of (f, eps, HhatPolynomial)


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
    return out


def assemble_H(D: int, ctx: EvalContext | None = None, threads: int = 1) -> HPolynomial:
    """H_D(x) = prod over f^2 | D of eps(f)^h(D/f^2) Hhat_{D/f^2}(eps(f) x).

    Since eps = +-1, the f-factor is the Hhat piece with its coefficient of
    x^(h-k) multiplied by eps^k.
    """
    if D >= 0 or D % 24 != 1:
        raise ValueError("D must be negative and 1 mod 24: %d" % D)
    disc = Discriminant.from_D(D)
    coeffs = [Fraction(1)]
    factors = []
    for f in disc.square_conductors():
        piece = build_Hhat(D // (f * f), ctx, threads=threads)
        eps = eps_conductor(f)
        adj = [cf * (eps ** k) for k, cf in enumerate(piece.coeffs)]
        coeffs = _poly_mul(coeffs, adj)
        factors.append((f, eps, piece))
    return HPolynomial(
        D=D, degree=len(coeffs) - 1, coeffs=tuple(coeffs), factors=tuple(factors)
    )
