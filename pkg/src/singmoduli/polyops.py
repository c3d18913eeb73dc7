"""Exact certificates for polynomials over Q.

Irreducibility is certified by a modular degree-pattern sieve: reduce the
primitive integer polynomial modulo several good primes (no leading-term
drop, squarefree reduction), run distinct-degree factorization over each
prime field, and intersect the subset-sum sets of attainable factor
degrees.  An empty intersection in degrees 1..n-1 proves irreducibility
over Q with no dependence on any factoring library.  When the sieve is
inconclusive the answer is delegated to sympy, and any factorization it
returns is verified by exact multiplication before being believed.

Perfect-power structure is read off Yun's squarefree decomposition with
Fraction arithmetic throughout, so the reported exponent is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .precision import BigComplex, local_prec

_SIEVE_PRIMES = (
    61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197,
    199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269,
)
_GOOD_PRIMES_NEEDED = 12


# ----------------------------------------------------------------------
# integer / rational polynomial utilities (lists, lowest degree first)
# ----------------------------------------------------------------------

def _trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _to_primitive_int(coeffs_desc):
    """Fractions in decreasing powers -> primitive int list, increasing powers.

    The sign of the leading coefficient is preserved; content is divided out.
    """
    fr = [Fraction(c) for c in coeffs_desc]
    if not fr or fr[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    den = 1
    for c in fr:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in reversed(fr)]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def _q_deriv(a):
    return _trim([a[i] * i for i in range(1, len(a))])


def _q_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for k, bk in enumerate(b):
                if bk:
                    out[i + k] += ai * bk
    return _trim(out)


def _q_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = [Fraction(v) for v in a]
    b = [Fraction(v) for v in b]
    out = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        q = a[i + len(b) - 1] / lead
        if q:
            out[i] = q
            for k, bk in enumerate(b):
                a[i + k] -= q * bk
    return _trim(out), _trim(a)


def _q_divexact(a, b):
    q, r = _q_divmod(a, b)
    if r:
        raise ValueError("polynomial division not exact")
    return q


def _q_gcd(a, b):
    a = _trim([Fraction(v) for v in a])
    b = _trim([Fraction(v) for v in b])
    while b:
        _, r = _q_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [v / lead for v in a]


def yun_decomposition(coeffs_desc):
    """Squarefree decomposition f = c * prod a_i^i over Q.

    Returns (content, [(i, a_i)]) with each a_i monic squarefree of positive
    degree, in Fraction coefficients, decreasing powers.
    """
    f = _trim([Fraction(c) for c in reversed(list(coeffs_desc))])
    if len(f) <= 1:
        raise ValueError("positive degree required")
    lead = f[-1]
    f = [v / lead for v in f]
    df = _q_deriv(f)
    g = _q_gcd(f, df)
    parts = []
    if len(g) == 1:
        parts.append((1, f))
    else:
        c = _q_divexact(f, g)
        d = [x - y for x, y in _pad_pair(_q_divexact(df, g), _q_deriv(c))]
        d = _trim(d)
        i = 1
        while len(c) > 1:
            a = _q_gcd(c, d)
            if len(a) > 1:
                parts.append((i, a))
            c = _q_divexact(c, a)
            d = _trim([x - y for x, y in _pad_pair(_q_divexact(d, a), _q_deriv(c))])
            i += 1
    check = [Fraction(1)]
    for (i, a) in parts:
        for _ in range(i):
            check = _q_mul(check, a)
    if check != f:
        raise RuntimeError("squarefree decomposition failed verification")
    return lead, [(i, list(reversed(a))) for (i, a) in parts]


def _pad_pair(a, b):
    n = max(len(a), len(b))
    return zip(a + [Fraction(0)] * (n - len(a)), b + [Fraction(0)] * (n - len(b)))


def perfect_power_structure(coeffs_desc):
    """(e, base) with f = c * base^e for the largest possible integer e.

    base is monic with Fraction coefficients in decreasing powers; e is the
    gcd of the multiplicities in the squarefree decomposition, so e = 1
    exactly when f is not a proper power of a smaller polynomial.
    """
    _, parts = yun_decomposition(coeffs_desc)
    e = 0
    for (i, _a) in parts:
        e = math.gcd(e, i)
    base = [Fraction(1)]
    for (i, a) in parts:
        for _ in range(i // e):
            base = _q_mul(base, list(reversed([Fraction(v) for v in a])))
    return e, list(reversed(base))


# ----------------------------------------------------------------------
# arithmetic over GF(p)
# ----------------------------------------------------------------------

def _pm_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for k, bk in enumerate(b):
                if bk:
                    out[i + k] = (out[i + k] + ai * bk) % p
    return _trim(out)


def _pm_rem(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    for i in range(len(a) - len(b), -1, -1):
        q = (a[i + len(b) - 1] * inv) % p
        if q:
            for k, bk in enumerate(b):
                a[i + k] = (a[i + k] - q * bk) % p
    del a[len(b) - 1 :]
    return _trim(a)


def _pm_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pm_rem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [(v * inv) % p for v in a]
    return a


def _pm_powx_p(h, f, p):
    """h^p mod f over GF(p) by square-and-multiply on the exponent."""
    out = [1]
    base = _pm_rem(h, f, p) if len(h) >= len(f) else list(h)
    e = p
    while e:
        if e & 1:
            out = _pm_rem(_pm_mul(out, base, p), f, p)
        e >>= 1
        if e:
            base = _pm_rem(_pm_mul(base, base, p), f, p)
    return out


def _distinct_degree_pattern(f, p):
    """Multiset of irreducible factor degrees of squarefree monic f mod p."""
    degrees = []
    fstar = list(f)
    h = [0, 1]
    k = 0
    while len(fstar) - 1 >= 1:
        k += 1
        if 2 * k > len(fstar) - 1:
            degrees.append(len(fstar) - 1)
            break
        h = _pm_powx_p(h, f, p)
        hmx = list(h)
        while len(hmx) < 2:
            hmx.append(0)
        hmx[1] = (hmx[1] - 1) % p
        g = _pm_gcd(_trim(hmx), fstar, p)
        if len(g) > 1:
            dg = len(g) - 1
            if dg % k:
                raise RuntimeError("distinct-degree step returned bad degree")
            degrees.extend([k] * (dg // k))
            fstar = _pm_divexact_mod(fstar, g, p)
    return tuple(sorted(degrees))


def _pm_divexact_mod(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        q = (a[i + len(b) - 1] * inv) % p
        out[i] = q
        if q:
            for k, bk in enumerate(b):
                a[i + k] = (a[i + k] - q * bk) % p
    if _trim(a):
        raise RuntimeError("modular division not exact")
    return _trim(out)


def _subset_degree_mask(pattern):
    mask = 1
    for d in pattern:
        mask |= mask << d
    return mask


# ----------------------------------------------------------------------
# the public certificates
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class IrreducibilityCertificate:
    degree: int
    irreducible: bool
    method: str
    primes: tuple
    patterns: tuple
    factors: tuple | None = None

    def __bool__(self):
        return self.irreducible


def irreducible_over_Q(coeffs_desc) -> IrreducibilityCertificate:
    """Decide irreducibility of a rational polynomial, decreasing powers.

    The modular sieve proves most irreducible inputs on its own; reducible
    or stubborn inputs fall through to sympy, whose factorizations are
    re-verified by exact multiplication before being reported.
    """
    f = _to_primitive_int(coeffs_desc)
    n = len(f) - 1
    if n <= 0:
        raise ValueError("positive degree required")
    if n == 1:
        return IrreducibilityCertificate(1, True, "degree", (), ())
    primes, patterns = [], []
    mask = (1 << (n + 1)) - 1
    proper = ((1 << n) - 1) & ~1  # bits 1..n-1
    for p in _SIEVE_PRIMES:
        if f[-1] % p == 0:
            continue
        fp = [v % p for v in f]
        inv = pow(fp[-1], p - 2, p)
        fp = [(v * inv) % p for v in fp]
        dfp = _trim([(fp[i] * i) % p for i in range(1, len(fp))])
        if not dfp or len(_pm_gcd(fp, dfp, p)) > 1:
            continue  # bad reduction: repeated factors mod p
        pattern = _distinct_degree_pattern(fp, p)
        primes.append(p)
        patterns.append(pattern)
        mask &= _subset_degree_mask(pattern)
        if mask & proper == 0:
            return IrreducibilityCertificate(
                n, True, "modular-sieve", tuple(primes), tuple(patterns)
            )
        if len(primes) >= _GOOD_PRIMES_NEEDED:
            break
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(f)), x, domain="QQ")
    content, flist = poly.factor_list()
    if len(flist) == 1 and flist[0][1] == 1:
        return IrreducibilityCertificate(
            n, True, "factorization", tuple(primes), tuple(patterns)
        )
    factors = []
    check = [Fraction(int(content.p), int(content.q))]
    for fac, mult in flist:
        fc = [
            Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs())
        ]
        for _ in range(mult):
            check = _q_mul(check, fc)
        factors.append((mult, tuple(int(c) if c == int(c) else c for c in reversed(fc))))
    if _trim([Fraction(v) for v in f]) != check:
        raise RuntimeError("factorization failed exact re-multiplication")
    return IrreducibilityCertificate(
        n, False, "factorization", tuple(primes), tuple(patterns), tuple(factors)
    )


def recognize_integer_polynomial(coeffs, threshold=2.0 ** -32):
    """Round ball coefficients to integers, or None if any is ambiguous.

    coeffs is a sequence of BigComplex balls in decreasing powers.  A ball
    qualifies when its center is within threshold of an integer after
    accounting for the radius and any imaginary part.
    """
    out = []
    for cf in coeffs:
        if not isinstance(cf, BigComplex):
            cf = BigComplex(cf)
        re = cf.val.real
        with local_prec(max(mpmath.mp.prec, int(abs(mpmath.mag(re))) + 80)):
            k = int(mpmath.nint(re))
            gap = abs(re - k)
        if float(gap) + float(cf.err) + abs(float(cf.val.imag)) > threshold:
            return None
        out.append(k)
    return out
