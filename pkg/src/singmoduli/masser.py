"""Classical modular polynomials, exactly, and the pole-free route to C.

Phi_m(x, y) is built in exact integers: for each divisor pair a d = m the
roots j((a tau + b)/d) with gcd(a, b, d) = 1 form a block whose power sums
have integer q-expansions (the b-average kills fractional powers; a Moebius
sum over e | gcd(a, d) enforces the gcd condition), Newton's identities give
the block's elementary symmetric functions, the blocks multiply into
Phi_m(x, j(tau)) with Laurent-series coefficients, and each coefficient is
identified as an integer polynomial in j by eliminating principal parts
against powers of the j-series.  The residual must vanish identically
through a guard window, the result must be symmetric in x and y, and the
x-degree must equal the index psi(m): all three are asserted.  Truncated
series carry an explicit valid-through exponent so the guard window is a
proven zero region, not a hopeful one.

With Phi = Phi_|D| vanishing to second order along the diagonal at a CM
point of discriminant D, the quantity

    C(tau_Q) = (2 beta02 - beta11) / beta01

is a ratio of explicit integer polynomials in j(tau_Q), where beta_rs are
the Taylor coefficients of Phi at (j_Q, j_Q).  This yields M_D = A + B * C
without evaluating C near its poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .modeval import eval_atomic, eval_modular
from .precision import BigComplex, EvalContext, PoleProximityError, local_prec
from .qforms import QuadForm, cm_point
from .specfun import mobius

_GUARD_WINDOW = 6  # q-orders beyond the constant term that must cancel
_INF = 1 << 60


def psi_index(m: int) -> int:
    """psi(m) = m prod_{p | m} (1 + 1/p), the degree of Phi_m in each variable."""
    if m < 1:
        raise ValueError("m must be >= 1")
    num, den = m, 1
    mm = m
    p = 2
    while p * p <= mm:
        if mm % p == 0:
            num *= p + 1
            den *= p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        num *= mm + 1
        den *= mm
    q, r = divmod(num, den)
    if r:
        raise RuntimeError("psi index not integral for m=%d" % m)
    return q


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _totient(n: int) -> int:
    out, mm, p = n, n, 2
    while p * p <= mm:
        if mm % p == 0:
            out -= out // p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


# ----------------------------------------------------------------------
# exact j-series and its powers
# ----------------------------------------------------------------------

def _j_series(N: int):
    """Integer coefficients c(-1..N) of j, as a list indexed nu+1.

    j = E4^3 / Delta with Delta/q = prod (1-q^n)^24 inverted by forward
    substitution; all arithmetic exact.
    """
    sig3 = [0] * (N + 2)
    for d in range(1, N + 2):
        d3 = d ** 3
        for t in range(d, N + 2, d):
            sig3[t] += d3
    E4 = [1] + [240 * sig3[t] for t in range(1, N + 2)]

    def conv(u, w):
        out = [0] * (N + 2)
        for i, ui in enumerate(u):
            if ui:
                top = min(len(w), N + 2 - i)
                for k in range(top):
                    if w[k]:
                        out[i + k] += ui * w[k]
        return out

    E4_3 = conv(conv(E4, E4), E4)
    binom = [math.comb(24, k) * (-1) ** k for k in range(25)]
    P = [0] * (N + 2)
    P[0] = 1
    for n in range(1, N + 2):
        for t in range(N + 1, -1, -1):
            if P[t]:
                base = P[t]
                for k in range(1, 25):
                    tt = t + n * k
                    if tt > N + 1:
                        break
                    P[tt] += base * binom[k]
    inv = [0] * (N + 2)
    inv[0] = 1
    for t in range(1, N + 2):
        s = 0
        for u in range(1, t + 1):
            if P[u]:
                s += P[u] * inv[t - u]
        inv[t] = -s
    return conv(E4_3, inv)[: N + 2]


def _j_powers(N: int, smax: int):
    """tables[s] = coefficients of j^s for q^(-s)..q^(N-s+1), index nu+s.

    Each table is trimmed to the exponents the truncated product actually
    determines: j^s inherits the base truncation at q^N, losing one order
    per extra factor, so reads past N-s+1 must fail rather than return a
    silently incomplete convolution.
    """
    base = _j_series(N)
    tables = [None, base]
    for s in range(2, smax + 1):
        prev = tables[s - 1]
        hi_valid = N - s + 1
        out = [0] * (hi_valid + s + 1)
        for i, pi in enumerate(prev):
            if pi:
                nu1 = i - (s - 1)
                top = min(len(base), hi_valid + 2 - nu1)
                for k in range(top):
                    if base[k]:
                        out[nu1 + (k - 1) + s] += pi * base[k]
        tables.append(out)
    return tables


# ----------------------------------------------------------------------
# Laurent series with a proven validity window
# ----------------------------------------------------------------------

class _LS:
    """Integer Laurent series known exactly for exponents <= hi.

    Coefficient of q^t is c[t - lo] inside the list, 0 for other t <= hi,
    unknown for t > hi.
    """

    __slots__ = ("lo", "hi", "c")

    def __init__(self, lo, hi, c):
        self.lo = lo
        self.hi = hi
        self.c = c

    def coeff(self, t):
        if t > self.hi:
            raise RuntimeError("coefficient beyond validity window")
        i = t - self.lo
        return self.c[i] if 0 <= i < len(self.c) else 0


def _ls_one():
    return _LS(0, _INF, [1])


def _ls_mul(a: _LS, b: _LS, cap: int) -> _LS:
    lo = a.lo + b.lo
    hi = min(a.hi + b.lo, b.hi + a.lo, cap)
    if hi < lo:
        return _LS(lo, hi, [])
    out = [0] * (hi - lo + 1)
    for i, ai in enumerate(a.c):
        if ai:
            ta = a.lo + i
            if ta + b.lo > hi:
                break
            for k, bk in enumerate(b.c):
                if bk:
                    t = ta + b.lo + k
                    if t > hi:
                        break
                    out[t - lo] += ai * bk
    return _LS(lo, hi, out)


def _ls_add(a: _LS, b: _LS) -> _LS:
    lo = min(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if hi < lo:
        return _LS(lo, hi, [])
    out = [0] * (hi - lo + 1)
    for src in (a, b):
        for i, v in enumerate(src.c):
            t = src.lo + i
            if lo <= t <= hi and v:
                out[t - lo] += v
    return _LS(lo, hi, out)


def _ls_scale(a: _LS, k: int) -> _LS:
    return _LS(a.lo, a.hi, [v * k for v in a.c])


def _ls_divexact(a: _LS, k: int) -> _LS:
    out = []
    for v in a.c:
        q, r = divmod(v, k)
        if r:
            raise RuntimeError("series division by %d not exact" % k)
        out.append(q)
    return _LS(a.lo, a.hi, out)


# ----------------------------------------------------------------------
# the builder
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModularPolynomial:
    """Phi_m as a dict {(i, j): coefficient} of x^i y^j monomials."""

    m: int
    coeffs: dict

    @property
    def degree(self) -> int:
        return max(i for (i, _j) in self.coeffs)

    def height_bits(self) -> int:
        return max(abs(c).bit_length() for c in self.coeffs.values())

    def evaluate(self, x, y):
        """Exact evaluation at Fraction/int arguments."""
        acc = Fraction(0)
        for (i, j), c in self.coeffs.items():
            acc += c * Fraction(x) ** i * Fraction(y) ** j
        return acc


_PHI_CACHE: dict = {}


def modular_polynomial(m: int) -> ModularPolynomial:
    """Phi_m with exact integer coefficients (Phi_1 = x - y by convention)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > 101:
        raise ValueError("refusing to build Phi_%d in process" % m)
    got = _PHI_CACHE.get(m)
    if got is None:
        got = (
            ModularPolynomial(1, {(1, 0): 1, (0, 1): -1})
            if m == 1
            else ModularPolynomial(m, _build_phi(m))
        )
        _PHI_CACHE[m] = got
    return got


def _build_phi(m: int) -> dict:
    psi = psi_index(m)
    hi_work = psi + _GUARD_WINDOW + 2
    blocks = []
    for a in _divisors(m):
        d = m // a
        g = math.gcd(a, d)
        r = (d // g) * _totient(g)
        blocks.append((a, d, g, r))
    if sum(r for (_a, _d, _g, r) in blocks) != psi:
        raise RuntimeError("block root counts do not sum to psi(m)")
    smax = max(r for (_a, _d, _g, r) in blocks)
    s_all = max(smax, psi)
    n_tab = max(d * hi_work for (_a, d, _g, _r) in blocks) + s_all + 2
    jpow = _j_powers(n_tab, s_all)

    def c_j(s, nu):
        tab = jpow[s]
        idx = nu + s
        if idx < 0:
            return 0
        if idx >= len(tab):
            raise RuntimeError("j-power table too short")
        return tab[idx]

    poly = [_ls_one()]  # coefficients of x^i, lowest first
    for (a, d, g, r) in blocks:
        lo_s = lambda s: -((s * a) // d)
        psums = [None]
        for s in range(1, r + 1):
            lo = lo_s(s)
            row = [0] * (hi_work - lo + 1)
            for e in _divisors(g):
                mu = mobius(e)
                if mu == 0:
                    continue
                de, ae = d // e, a // e
                nu2 = -s - 2
                while nu2 * ae <= hi_work:
                    T = nu2 * ae
                    if T >= lo:
                        cc = c_j(s, de * nu2)
                        if cc:
                            row[T - lo] += mu * de * cc
                    nu2 += 1
            psums.append(_LS(lo, hi_work, row))
        elems = [_ls_one()]
        for k in range(1, r + 1):
            acc = None
            for i in range(1, k + 1):
                term = _ls_mul(elems[k - i], psums[i], hi_work)
                if i % 2 == 0:
                    term = _ls_scale(term, -1)
                acc = term if acc is None else _ls_add(acc, term)
            elems.append(_ls_divexact(acc, k))
        bpoly = [None] * (r + 1)
        for k in range(0, r + 1):
            bpoly[r - k] = elems[k] if k % 2 == 0 else _ls_scale(elems[k], -1)
        new = [None] * (len(poly) + r)
        for i, pser in enumerate(poly):
            for jx, bser in enumerate(bpoly):
                prod = _ls_mul(pser, bser, hi_work)
                new[i + jx] = prod if new[i + jx] is None else _ls_add(new[i + jx], prod)
        poly = new
    if len(poly) != psi + 1:
        raise RuntimeError("x-degree of Phi_%d is not psi" % m)
    out = {}
    for i, B in enumerate(poly):
        if B.hi < 2:
            raise RuntimeError(
                "validity window exhausted for x^%d of Phi_%d" % (i, m)
            )
        guard_hi = min(B.hi, _GUARD_WINDOW)
        work = {}
        for t in range(B.lo, guard_hi + 1):
            v = B.coeff(t)
            if v:
                work[t] = v
        if any(t < -psi for t in work):
            raise RuntimeError("principal part deeper than psi in Phi_%d" % m)
        for t in range(psi, 0, -1):
            v = work.get(-t, 0)
            if not v:
                continue
            out[(i, t)] = v
            for nu in range(-t, guard_hi + 1):
                cc = c_j(t, nu)
                if cc:
                    work[nu] = work.get(nu, 0) - v * cc
        v0 = work.pop(0, 0)
        if v0:
            out[(i, 0)] = v0
        if any(v for v in work.values()):
            raise RuntimeError(
                "q-expansion residual does not vanish for x^%d of Phi_%d" % (i, m)
            )
    for (i, j), v in list(out.items()):
        if out.get((j, i), 0) != v:
            raise RuntimeError("Phi_%d is not symmetric" % m)
    return out


# ----------------------------------------------------------------------
# file I/O for precomputed tables
# ----------------------------------------------------------------------

def load_modular_polynomial(path) -> ModularPolynomial:
    """Read a table in the format 'm = <level>' then '[i,j] coefficient' lines.

    Entries with i != j may be stored once (either order); they are mirrored,
    and any explicit duplicates must agree.
    """
    m = None
    coeffs = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("m"):
                m = int(line.split("=")[1])
                continue
            head, val = line.split("]")
            i, j = (int(t) for t in head.lstrip("[").split(","))
            c = int(val)
            if coeffs.setdefault((i, j), c) != c:
                raise ValueError("conflicting entries for (%d,%d) in %s" % (i, j, path))
            coeffs.setdefault((j, i), c)
    if m is None or not coeffs:
        raise ValueError("no modular polynomial found in %s" % path)
    for (i, j), v in list(coeffs.items()):
        if coeffs.get((j, i)) != v:
            raise ValueError("table in %s is not symmetric" % path)
    return ModularPolynomial(m, coeffs)


def save_modular_polynomial(phi: ModularPolynomial, path):
    with open(path, "w") as fh:
        fh.write("m = %d\n" % phi.m)
        for (i, j) in sorted(phi.coeffs):
            if i >= j:
                fh.write("[%d,%d] %d\n" % (i, j, phi.coeffs[(i, j)]))


# ----------------------------------------------------------------------
# Taylor data at the diagonal and the C evaluation
# ----------------------------------------------------------------------

def _beta_arrays(phi: ModularPolynomial):
    """Integer polynomials (in x) for beta01, beta02, beta11 at y = x.

    beta01 = d_y Phi(x, x), beta02 = (1/2) d_y^2 Phi(x, x),
    beta11 = d_x d_y Phi(x, x); beta10 = beta01 by symmetry.
    """
    deg = phi.degree
    b01 = [0] * (2 * deg)
    b02 = [0] * (2 * deg)
    b11 = [0] * (2 * deg)
    for (i, j), c in phi.coeffs.items():
        if j >= 1:
            b01[i + j - 1] += c * j
        if j >= 2:
            b02[i + j - 2] += c * (j * (j - 1) // 2)
        if i >= 1 and j >= 1:
            b11[i + j - 2] += c * i * j
    return b01, b02, b11


def _horner_ball(coeffs, x: BigComplex) -> BigComplex:
    acc = BigComplex(0)
    for c in reversed(coeffs):
        acc = acc * x + BigComplex(c)
    return acc


def _beta_boost(phi: ModularPolynomial, jq: BigComplex) -> int:
    """Extra working bits covering coefficient height and degree * log2|jq|."""
    size = max(1.0, float(abs(jq.val)))
    return phi.height_bits() + int((phi.degree + 1) * math.log2(size + 2)) + 64


def beta_values(phi: ModularPolynomial, jq: BigComplex, ctx: EvalContext | None = None):
    """(beta01, beta02, beta11) at (jq, jq), as balls at boosted precision.

    The boost keeps roughly ctx.prec significant bits through the
    alternating Horner sums.
    """
    ctx = ctx or EvalContext()
    b01, b02, b11 = _beta_arrays(phi)
    with local_prec(ctx.prec + _beta_boost(phi, jq)):
        x = BigComplex(jq.val, jq.err)
        return (
            _horner_ball(b01, x),
            _horner_ball(b02, x),
            _horner_ball(b11, x),
        )


def masser_C(phi: ModularPolynomial, jq: BigComplex, ctx: EvalContext | None = None) -> BigComplex:
    """C(tau_Q) = (2 beta02 - beta11)/beta01 from the Taylor data of Phi.

    Raises PoleProximityError when beta01 vanishes; that happens exactly at
    the degenerate discriminants -3 d^2, where the diagonal tangency breaks
    down and this route is genuinely unavailable.

    The betas are astronomically large while their combination is small, so
    the subtraction and division stay inside the same boosted-precision
    region that produced them.
    """
    ctx = ctx or EvalContext()
    v01, v02, v11 = beta_values(phi, jq, ctx)
    if v01.abs_lower() == 0:
        raise PoleProximityError(
            "beta01 vanishes at j=%s: degenerate discriminant" % mpmath.nstr(jq.val, 8)
        )
    with local_prec(ctx.prec + _beta_boost(phi, jq)):
        return (BigComplex(2) * v02 - v11) / v01


def eval_MD(Q: QuadForm, phi: ModularPolynomial | None = None, ctx: EvalContext | None = None) -> BigComplex:
    """M_D at the CM point of Q: A + B * C with C from the Phi route.

    phi defaults to the modular polynomial of level |disc Q|.
    """
    ctx = ctx or EvalContext()
    D = Q.disc()
    if phi is None:
        phi = modular_polynomial(-D)
    elif phi.m != -D:
        raise ValueError("phi level %d does not match |D| = %d" % (phi.m, -D))
    tau = cm_point(Q, ctx.prec + 16)
    jq = eval_atomic("j", tau, ctx)
    C = masser_C(phi, jq, ctx)
    A = eval_modular("A", tau, ctx)
    B = eval_modular("B", tau, ctx)
    with local_prec(ctx.prec + 16):
        return A + B * C
