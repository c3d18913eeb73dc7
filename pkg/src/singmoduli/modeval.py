"""Arbitrary-precision evaluation of the modular building blocks.

Atoms (eta, E2, E4, E6, j) are evaluated by reducing the argument to the
usual fundamental domain, running the q-series there (Im >= sqrt(3)/2, so
|q| <= e^(-pi sqrt 3) ~ 0.0043), and transforming back: eta multiplier via
Dedekind sums, weight factors for E4/E6, the quasimodular correction for E2.
The weight -2 form F and its normalized derivative are composed from atoms;
the non-holomorphic P comes either from the A + B*C decomposition or, near
the elliptic loci where that split degenerates, from the collapsed identity
P = -DF - F/(2 pi v).  A separate route evaluates P straight from the
integer Fourier coefficients of F.

All public evaluators return BigComplex balls whose radii include series
truncation tails and a generous rounding envelope; everything runs at
ctx.prec + 32 working bits so the envelope sits far below the target
accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .precision import (
    BigComplex,
    EvalContext,
    PoleProximityError,
    bc_exp,
    bc_sqrt,
    local_prec,
)
from .qforms import CosetRep
from .specfun import dedekind_sum

_GUARD = 32  # extra working bits inside every evaluator


# ----------------------------------------------------------------------
# exact Fourier coefficients of F
# ----------------------------------------------------------------------

_fcoef_state = {"N": -1, "a": [], "envelope": None}


def f_coefficients(N: int):
    """Integer Fourier coefficients a_{-1}..a_N of F, as a list indexed m+1.

    F satisfies F * H = G with H = 2 q prod_n [(1-q^n)(1-q^2n)(1-q^3n)(1-q^6n)]^2
    and G the weight-2 Eisenstein combination with constant term 2, so the
    coefficients fall out of forward substitution in exact integers.  Every
    division is by H_1 = 2 and is asserted exact.
    """
    if N <= _fcoef_state["N"]:
        return _fcoef_state["a"][: N + 2]
    N = max(N, 2 * _fcoef_state["N"], 64)
    L = N + 2
    prod = [0] * (L + 1)
    prod[0] = 1
    for k in (1, 2, 3, 6):
        for n in range(1, L // k + 1):
            j = k * n
            # multiply by (1 - q^j)^2 = 1 - 2 q^j + q^(2j), in place
            for t in range(L, -1, -1):
                v = prod[t]
                if not v:
                    continue
                if t + j <= L:
                    prod[t + j] -= 2 * v
                if t + 2 * j <= L:
                    prod[t + 2 * j] += v
    sig = _sigma_table_pow(1, L)
    G = [0] * (L + 1)
    G[0] = 2
    for m in range(1, L + 1):
        g = sig[m]
        if m % 2 == 0:
            g -= 2 * sig[m // 2]
        if m % 3 == 0:
            g -= 3 * sig[m // 3]
        if m % 6 == 0:
            g += 6 * sig[m // 6]
        G[m] = -24 * g

    def H(j):
        return 2 * prod[j - 1] if 1 <= j <= L + 1 else 0

    a = [0] * (L + 1)  # a[i] holds a_{i-1}
    for t in range(0, L):
        acc = G[t]
        for i in range(0, t):
            if a[i]:
                acc -= a[i] * H(t - i + 1)
        q, r = divmod(acc, 2)
        if r:
            raise RuntimeError("F coefficient division not exact at q^%d" % t)
        a[t] = q
    _fcoef_state["N"] = L - 2
    _fcoef_state["a"] = a[:L]
    env = mpmath.mpf(1)
    with local_prec(64):
        for m in range(1, L - 1):
            e = abs(a[m + 1]) * mpmath.exp(-2 * mpmath.pi * mpmath.sqrt(m) / 3)
            if e > env:
                env = mpmath.mpf(e)
    _fcoef_state["envelope"] = env
    return _fcoef_state["a"][: N + 2]


def f_coefficient(m: int) -> int:
    """a_m, the coefficient of q^m in F (zero for m < -1)."""
    if m < -1:
        return 0
    tab = f_coefficients(max(m, 8))
    return tab[m + 1]


def _f_envelope() -> mpmath.mpf:
    """Envelope constant C with |a_m| <= C e^(2 pi sqrt(m)/3) over the table.

    Callers apply an extra factor 2 before trusting it beyond the table.
    """
    if _fcoef_state["envelope"] is None:
        f_coefficients(64)
    return _fcoef_state["envelope"]


def _f_tail(T: int, v, weighted: bool = False):
    """Bound on |sum_{m>T} (m if weighted else 1) a_m q^m| at Im tau = v.

    Uses |a_m| <= 2C e^(2 pi sqrt m/3) and concavity of sqrt, which turns the
    tail into a geometric series once 2 pi v beats pi/(3 sqrt(T+1)).
    """
    C = 2 * _f_envelope()
    v = mpmath.mpf(v)
    T1 = mpmath.mpf(T + 1)
    log_ratio = mpmath.pi / (3 * mpmath.sqrt(T1)) - 2 * mpmath.pi * v
    if weighted:
        log_ratio += 1 / T1  # m <= (T+1) e^((m-T-1)/(T+1))
    if log_ratio >= mpmath.mpf("-0.01"):
        return mpmath.inf
    ratio = mpmath.exp(log_ratio)
    lead = C * mpmath.exp(2 * mpmath.pi * mpmath.sqrt(T1) / 3 - 2 * mpmath.pi * v * T1)
    if weighted:
        lead *= T1
    return lead / (1 - ratio)


def _f_terms(v, prec: int, weighted: bool = False) -> int:
    """Shortest truncation T with the F-series tail below 2^(-prec-10)."""
    target = mpmath.mpf(2) ** (-prec - 10)
    T = 8
    while _f_tail(T, v, weighted) > target:
        T += max(4, T // 3)
        if T > 2_000_000:
            raise RuntimeError("q-series does not converge fast enough at v=%s" % v)
    return T


_sig_cache: dict = {}


def _sigma_table_pow(k: int, N: int):
    """Divisor power sums sigma_k(1..N), index 0 unused; cached."""
    tab = _sig_cache.get(k)
    if tab is None or len(tab) <= N:
        tab = [0] * (max(N, 64) + 1)
        for d in range(1, len(tab)):
            dk = d ** k
            for m in range(d, len(tab), d):
                tab[m] += dk
        _sig_cache[k] = tab
    return tab


# ----------------------------------------------------------------------
# fundamental-domain reduction
# ----------------------------------------------------------------------

def _sl2_reduce_matrix(tau):
    """Integer (a, b, c, d) of determinant 1 sending tau into the usual
    fundamental domain (up to rounding at the boundary)."""
    a, b, c, d = 1, 0, 0, 1
    t = mpmath.mpc(tau)
    for _ in range(10000):
        n = int(mpmath.nint(t.real))
        if n:
            t -= n
            a, b = a - n * c, b - n * d
        if abs(t) < 1 - mpmath.mpf(2) ** (-mp.prec // 2):
            t = -1 / t
            a, b, c, d = -c, -d, a, b
        else:
            return a, b, c, d
    raise RuntimeError("fundamental-domain reduction did not terminate")


def _reduce_ball(tau: BigComplex):
    """(t, (p, q, r, s)): t reduced, tau = (p t + q)/(r t + s), r >= 0."""
    a, b, c, d = _sl2_reduce_matrix(tau.val)
    p, q, r, s = d, -b, -c, a
    if r < 0 or (r == 0 and s < 0):
        p, q, r, s = -p, -q, -r, -s
    den = BigComplex(c * tau.val + d, abs(c) * tau.err)
    num = BigComplex(a * tau.val + b, abs(a) * tau.err)
    t = num / den
    return t, (p, q, r, s)


# ----------------------------------------------------------------------
# q-series for the atoms at a reduced point
# ----------------------------------------------------------------------

def _eisen_tail(k: int, x, T: int):
    coef = {2: 24, 4: 240, 6: 504}[k]
    x = mpmath.mpf(x)
    r = x * (mpmath.mpf(T + 2) / (T + 1)) ** k
    if r >= mpmath.mpf("0.5"):
        return mpmath.inf
    return coef * mpmath.mpf(T + 1) ** k * x ** (T + 1) / (1 - r)


def _eisen_terms(k: int, x, prec: int) -> int:
    target = mpmath.mpf(2) ** (-prec - 10)
    T = 8
    while _eisen_tail(k, x, T) > target:
        T += max(4, T // 3)
        if T > 1_000_000:
            raise RuntimeError("Eisenstein series does not converge fast enough")
    return T


def _eisen_reduced(k: int, t, prec: int, terms=None) -> BigComplex:
    """E_k at a reduced point t (plain mpc), with tail and rounding envelope."""
    q = mpmath.exp(2j * mpmath.pi * t)
    x = abs(q)
    T = terms if terms is not None else _eisen_terms(k, x, prec)
    coef = {2: -24, 4: 240, 6: -504}[k]
    sig = _sigma_table_pow(k - 1, T)
    total = mpmath.mpc(1)
    qn = mpmath.mpc(1)
    for n in range(1, T + 1):
        qn *= q
        total += coef * sig[n] * qn
    err = _eisen_tail(k, x, T) + (T + 8) * (abs(total) + 1) * mpmath.mpf(2) ** (-mp.prec + 2)
    return BigComplex(total, err)


def _eta_reduced(t, prec: int) -> BigComplex:
    """eta at a reduced point t (plain mpc), with tail and rounding envelope."""
    q = mpmath.exp(2j * mpmath.pi * t)
    x = abs(q)
    target = mpmath.mpf(2) ** (-prec - 10)
    total = mpmath.mpc(1)
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        total += (-1) ** k * (q ** g1 + q ** g2)
        if 2 * x ** g1 / (1 - x) < target:
            tail = 2 * x ** (g1 + k) / (1 - x)  # later exponents exceed g1 + k
            break
        k += 1
        if k > 100000:
            raise RuntimeError("eta series does not converge fast enough")
    pref = mpmath.exp(2j * mpmath.pi * t / 24)
    v = pref * total
    err = tail + (4 * k + 8) * (abs(v) + 1) * mpmath.mpf(2) ** (-mp.prec + 2)
    return BigComplex(v, err)


# ----------------------------------------------------------------------
# transformation back from the reduced point
# ----------------------------------------------------------------------

def _eta_multiplier(p: int, q: int, r: int, s: int, t: BigComplex) -> BigComplex:
    """Factor M with eta(delta t) = M * eta(t), delta = (p q; r s), r > 0.

    M = exp(pi i ((p+s)/(12 r) - s(s, r))) * sqrt(-i (r t + s)) with the
    principal square root; the phase is an exact rational multiple of pi.
    """
    phase = Fraction(p + s, 12 * r) - dedekind_sum(s, r)
    eps = mpmath.exp(1j * mpmath.pi * mpmath.mpf(phase.numerator) / phase.denominator)
    root = bc_sqrt(BigComplex(-1j) * (BigComplex(r) * t + BigComplex(s)))
    return BigComplex(eps, abs(eps) * mpmath.mpf(2) ** (-mp.prec + 2)) * root


def eval_atomic(name: str, tau, ctx: EvalContext | None = None) -> BigComplex:
    """eta, E2, E4, E6 or j at an arbitrary point of the upper half-plane."""
    ctx = ctx or EvalContext()
    tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
    if not tau.val.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    with local_prec(ctx.prec + _GUARD):
        return _atomic(name, tau, ctx)


def _atomic(name: str, tau: BigComplex, ctx: EvalContext) -> BigComplex:
    prec = ctx.prec
    t, (dp, dq, dr, ds) = _reduce_ball(tau)
    if name == "j":
        e4 = _eisen_reduced(4, t.val, prec, ctx.terms)
        e6 = _eisen_reduced(6, t.val, prec, ctx.terms)
        out = (BigComplex(1728) * e4 ** 3) / (e4 ** 3 - e6 ** 2)
        # argument sensitivity: |dj/dt| <= 40 (|j| + 2000) near the
        # fundamental domain (the logarithmic derivative is O(1) there)
        return BigComplex(out.val, out.err + 40 * (abs(out.val) + 2000) * t.err)
    if name == "eta":
        base = _eta_reduced(t.val, prec)
        # |d eta/dt| = |eta| pi |E2(t)|/12 < 0.6 |eta| at reduced points
        base = BigComplex(base.val, base.err + (abs(base.val) + 1) * t.err)
        if dr == 0:
            ph = mpmath.exp(2j * mpmath.pi * dq / 24)
            return BigComplex(ph, mpmath.mpf(2) ** (-mp.prec + 2)) * base
        return _eta_multiplier(dp, dq, dr, ds, t) * base
    if name in ("E2", "E4", "E6"):
        k = int(name[1])
        base = _eisen_reduced(k, t.val, prec, ctx.terms)
        # |dE_k/dt| <= 60 (|E_k| + 1) at reduced points, for all k <= 6
        base = BigComplex(base.val, base.err + 60 * (abs(base.val) + 1) * t.err)
        if dr == 0:
            return base
        jfac = BigComplex(dr) * t + BigComplex(ds)
        out = jfac ** k * base
        if k == 2:
            corr = BigComplex(6j / mpmath.pi, mpmath.mpf(2) ** (-mp.prec + 4))
            out = out - corr * BigComplex(dr) * jfac
        return out
    raise ValueError("unknown atomic %r" % name)


# ----------------------------------------------------------------------
# F, its derivative, and the modular functions A, B, C, P
# ----------------------------------------------------------------------

_F_WEIGHTS = ((1, 1), (-2, 2), (-3, 3), (6, 6))


def _parts(tau: BigComplex, ctx: EvalContext, want_e6: bool = False) -> dict:
    """Shared atomic values at tau, 2 tau, 3 tau, 6 tau for F and friends."""
    parts: dict = {}
    for _, k in _F_WEIGHTS:
        karg = BigComplex(k * tau.val, k * tau.err)
        parts[("eta", k)] = _atomic("eta", karg, ctx)
        parts[("E2", k)] = _atomic("E2", karg, ctx)
        parts[("E4", k)] = _atomic("E4", karg, ctx)
    if want_e6:
        parts[("E6", 1)] = _atomic("E6", tau, ctx)
    G = (
        parts[("E2", 1)]
        - BigComplex(2) * parts[("E2", 2)]
        - BigComplex(3) * parts[("E2", 3)]
        + BigComplex(6) * parts[("E2", 6)]
    )
    etaprod = (
        parts[("eta", 1)] * parts[("eta", 2)] * parts[("eta", 3)] * parts[("eta", 6)]
    )
    H = BigComplex(2) * etaprod * etaprod
    parts["G"] = G
    parts["H"] = H
    parts["F"] = G / H
    return parts


def _DF_from_parts(parts: dict) -> BigComplex:
    """(1/2 pi i) dF/dtau via the Eisenstein derivative identities."""
    DG = BigComplex(0)
    for coef, k in _F_WEIGHTS:
        e2 = parts[("E2", k)]
        e4 = parts[("E4", k)]
        DG = DG + BigComplex(coef * k) * (e2 * e2 - e4) / BigComplex(12)
    DHoverH = (
        parts[("E2", 1)]
        + BigComplex(2) * parts[("E2", 2)]
        + BigComplex(3) * parts[("E2", 3)]
        + BigComplex(6) * parts[("E2", 6)]
    ) / BigComplex(12)
    return (DG - parts["G"] * DHoverH) / parts["H"]


def eval_F(tau, ctx: EvalContext | None = None) -> BigComplex:
    """F at an arbitrary point of the upper half-plane."""
    ctx = ctx or EvalContext()
    tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
    if not tau.val.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    with local_prec(ctx.prec + _GUARD):
        return _parts(tau, ctx)["F"]


def _pole_floor(ctx: EvalContext):
    return mpmath.mpf(2) ** (-(ctx.prec // 2))


def _safe_div(num: BigComplex, den: BigComplex, ctx: EvalContext, what: str) -> BigComplex:
    if den.abs_lower() < _pole_floor(ctx):
        raise PoleProximityError("%s too close to zero" % what)
    return num / den


def _j_from_parts(parts: dict, ctx: EvalContext) -> BigComplex:
    e4 = parts[("E4", 1)]
    e6 = parts[("E6", 1)]
    return _safe_div(
        BigComplex(1728) * e4 ** 3, e4 ** 3 - e6 ** 2, ctx, "E4^3 - E6^2"
    )


def _ABC_from_parts(parts: dict, tau: BigComplex, ctx: EvalContext, which: str) -> BigComplex:
    F = parts["F"]
    e2, e4, e6 = parts[("E2", 1)], parts[("E4", 1)], parts[("E6", 1)]
    j = _j_from_parts(parts, ctx)
    if which == "B":
        return F * e6 * _safe_div(j, e4, ctx, "E4")
    if which == "A":
        corr = _safe_div(
            F * e6 * (BigComplex(7) * j - BigComplex(6912)),
            BigComplex(6) * e4 * (j - BigComplex(1728)),
            ctx,
            "E4 (j - 1728)",
        )
        return BigComplex(-1) * _DF_from_parts(parts) - e2 * F / BigComplex(6) + corr
    if which == "C":
        v = tau.val.imag
        three_piv = BigComplex(
            3 / (mpmath.pi * v),
            3 * tau.err / (mpmath.pi * v * v) + mpmath.mpf(2) ** (-mp.prec + 4),
        )
        first = _safe_div(e4, BigComplex(6) * e6 * j, ctx, "E6 j") * (e2 - three_piv)
        second = _safe_div(
            BigComplex(7) * j - BigComplex(6912),
            BigComplex(6) * j * (j - BigComplex(1728)),
            ctx,
            "j (j - 1728)",
        )
        return first - second
    raise ValueError("unknown name %r" % which)


def _P_collapsed(parts: dict, tau: BigComplex) -> BigComplex:
    """P = -DF - F/(2 pi v): the decomposition with removable poles cancelled."""
    v = tau.val.imag
    vball = BigComplex(
        2 * mpmath.pi * v,
        2 * mpmath.pi * tau.err + mpmath.mpf(2) ** (-mp.prec + 4) * v,
    )
    return BigComplex(-1) * _DF_from_parts(parts) - parts["F"] / vball


def eval_modular(name: str, tau, ctx: EvalContext | None = None) -> BigComplex:
    """A, B, C or P at an arbitrary point of the upper half-plane.

    A, B and C raise PoleProximityError near their genuine poles (the orbits
    of the elliptic points, where E4, j or j - 1728 degenerate).  P is
    regular on all of H: away from those orbits it is composed as A + B*C,
    and near them the evaluation switches to the collapsed identity, which
    the decomposition equals everywhere both are defined.
    """
    ctx = ctx or EvalContext()
    tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
    if not tau.val.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    with local_prec(ctx.prec + _GUARD):
        if name in ("A", "B", "C"):
            parts = _parts(tau, ctx, want_e6=True)
            return _ABC_from_parts(parts, tau, ctx, name)
        if name != "P":
            raise ValueError("unknown name %r" % name)
        parts = _parts(tau, ctx, want_e6=True)
        try:
            A = _ABC_from_parts(parts, tau, ctx, "A")
            B = _ABC_from_parts(parts, tau, ctx, "B")
            C = _ABC_from_parts(parts, tau, ctx, "C")
            return A + B * C
        except PoleProximityError:
            return _P_collapsed(parts, tau)


def eval_P_qseries(tau, ctx: EvalContext | None = None) -> BigComplex:
    """P from the Fourier side, restricted to Im(tau) >= 1.

    P = -sum_m m a_m q^m - F(tau)/(2 pi v); with Im >= 1 the series sits deep
    in its convergence region, making this route a sharp independent check
    on the composed evaluator.
    """
    tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
    if not tau.val.imag >= 1:
        raise ValueError("q-series route requires Im(tau) >= 1")
    return _P_qseries_any(tau, ctx or EvalContext())


def _P_qseries_any(tau: BigComplex, ctx: EvalContext) -> BigComplex:
    """Fourier-side P without the Im >= 1 policy.

    Tails stay rigorous at any height where the coefficient envelope beats
    the exponential decay, which in practice means Im(tau) down to ~0.05.
    """
    with local_prec(ctx.prec + _GUARD):
        v = tau.val.imag
        T = ctx.terms if ctx.terms is not None else _f_terms(v, ctx.prec, weighted=True)
        a = f_coefficients(T + 2)
        qball = bc_exp(BigComplex(2j * mpmath.pi, mpmath.mpf(2) ** (-mp.prec + 4)) * tau)
        qinv = BigComplex(1) / qball
        sum_w = BigComplex(-1) * qinv * BigComplex(a[0])  # m = -1 term of sum m a_m q^m
        sum_f = qinv * BigComplex(a[0]) + BigComplex(a[1])
        qpow = BigComplex(1)
        for m in range(1, T + 1):
            qpow = qpow * qball
            am = a[m + 1]
            if am:
                sum_f = sum_f + qpow * BigComplex(am)
                sum_w = sum_w + qpow * BigComplex(m * am)
        tail_w = _f_tail(T, v, weighted=True)
        tail_f = _f_tail(T, v, weighted=False)
        vball = BigComplex(
            2 * mpmath.pi * v,
            2 * mpmath.pi * tau.err + mpmath.mpf(2) ** (-mp.prec + 4) * v,
        )
        out = BigComplex(-1) * sum_w - sum_f / vball
        extra = tail_w + tail_f / (2 * mpmath.pi * v)
        return BigComplex(out.val, out.err + extra)


# ----------------------------------------------------------------------
# cusp expansions of F
# ----------------------------------------------------------------------

@dataclass
class QSeries:
    """Truncated expansion sum_i coeffs[i] q^((start + i)/h) with tail bound.

    tail bounds the dropped terms whenever Im(tau) >= vmin; evaluate refuses
    points below that height.
    """

    h: int
    start: int
    coeffs: list
    tail: object
    vmin: float

    def evaluate(self, tau, ctx: EvalContext | None = None) -> BigComplex:
        ctx = ctx or EvalContext()
        tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
        if tau.val.imag < self.vmin:
            raise ValueError("below the stated Im bound of this expansion")
        with local_prec(ctx.prec + _GUARD):
            w = bc_exp(
                BigComplex(
                    2j * mpmath.pi / self.h, mpmath.mpf(2) ** (-mp.prec + 4) / self.h
                )
                * tau
            )
            acc = BigComplex(0)
            for cf in reversed(self.coeffs):
                acc = acc * w + cf
            if self.start > 0:
                acc = acc * w ** self.start
            elif self.start < 0:
                acc = acc / w ** (-self.start)
            return BigComplex(acc.val, acc.err + mpmath.mpf(self.tail))


def _zeta6_power(e: int, prec: int) -> BigComplex:
    with local_prec(prec + 8):
        val = mpmath.exp(1j * mpmath.pi * (e % 6) / 3)
        return BigComplex(val, abs(val) * mpmath.mpf(2) ** (-prec - 4))


def cusp_expansion_F(rep: CosetRep, terms: int, ctx: EvalContext | None = None) -> QSeries:
    """Expansion of F slashed (weight -2) onto the given coset representative.

    With a_m the Fourier coefficients of F and z6 = e^(pi i/3):

      cusp oo  : sum a_m q^m
      cusp 0   : 6 sum a_m z6^(t m)             q^(m/6)   (rep index t)
      cusp 1/2 : 3 sum a_m z6^(3 + 2 m s)       q^(m/3)   (rep index s)
      cusp 1/3 : 2 sum a_m (-1)^(m (r + 1) + 1) q^(m/2)   (rep index r)

    The QSeries target is tau -> (c tau + d)^2 F(gamma tau) for the rep's
    matrix gamma = (a b; c d).
    """
    ctx = ctx or EvalContext()
    a = f_coefficients(terms)
    h = rep.width()
    coeffs = []
    for m in range(-1, terms):
        am = a[m + 1]
        if rep.cusp == "oo":
            z = BigComplex(am)
        elif rep.cusp == "0":
            z = _zeta6_power(rep.index * m, ctx.prec) * BigComplex(h * am)
        elif rep.cusp == "1/2":
            z = _zeta6_power(3 + 2 * m * rep.index, ctx.prec) * BigComplex(h * am)
        else:  # cusp 1/3
            z = BigComplex(-h * am if (m * (rep.index + 1)) % 2 == 0 else h * am)
        coeffs.append(z)
    vmin = ctx.vmin
    with local_prec(ctx.prec + _GUARD):
        tail = h * _f_tail(terms - 1, mpmath.mpf(vmin) / h)
    return QSeries(h=h, start=-1, coeffs=coeffs, tail=tail, vmin=vmin)


# ----------------------------------------------------------------------
# involution signs
# ----------------------------------------------------------------------

AL_MATRICES = {
    6: (0, -1, 6, 0),
    3: (3, 1, 6, 3),
    2: (2, -1, 6, -2),
}


def slash_minus2(fun, mat, tau, ctx: EvalContext) -> BigComplex:
    """(f |_{-2} g)(tau) = det(g)^{-1} (c tau + d)^2 f(g tau), integer g."""
    a, b, c, d = mat
    det = a * d - b * c
    if det <= 0:
        raise ValueError("matrix must have positive determinant")
    tau = tau if isinstance(tau, BigComplex) else BigComplex(tau)
    with local_prec(ctx.prec + _GUARD):
        den = BigComplex(c) * tau + BigComplex(d)
        num = BigComplex(a) * tau + BigComplex(b)
        gt = num / den
        val = fun(gt, ctx)
        return den * den * val / BigComplex(det)


def atkin_lehner_sign(d: int, ctx: EvalContext | None = None) -> int:
    """Sign s in F |_{-2} W_d = s F, verified at five sample points.

    Raises if the ratio at any sample is not numerically pinned to +1 or -1,
    or if the samples disagree.
    """
    ctx = ctx or EvalContext()
    if d not in AL_MATRICES:
        raise ValueError("d must be one of 2, 3, 6")
    mat = AL_MATRICES[d]
    samples = [
        mpmath.mpc("0.31", "1.13"),
        mpmath.mpc("-0.22", "0.83"),
        mpmath.mpc("0.05", "1.71"),
        mpmath.mpc(0, 2),
        mpmath.mpc("0.41", "0.94"),
    ]
    sign = None
    for z in samples:
        lhs = slash_minus2(eval_F, mat, BigComplex(z), ctx)
        rhs = eval_F(BigComplex(z), ctx)
        ratio = lhs / rhs
        cand = 1 if ratio.val.real > 0 else -1
        dev = abs(ratio.val - cand)
        tol = ratio.err + mpmath.mpf(2) ** (-ctx.prec // 2)
        if dev > tol:
            raise RuntimeError("no clean sign for W_%d at %s: %s" % (d, z, ratio.val))
        if sign is None:
            sign = cand
        elif sign != cand:
            raise RuntimeError("inconsistent signs for W_%d" % d)
    return sign
