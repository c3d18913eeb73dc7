"""Positive definite binary quadratic forms and their Gamma_0(6) bookkeeping.

Covers: Gauss reduction with the boundary tie-break, enumeration of reduced
primitive forms, class numbers, the 12 right-coset representatives of
Gamma_0(6) in SL_2(Z), assignment of each class to its unique representative
normalizing (6|a, b == 1 mod 12), N-systems, CM points, and the cusp data
(h_Q, zeta_Q, phi_Q) attached to each class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .precision import BigComplex, local_prec


# ----------------------------------------------------------------------
# matrices
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix (p q; r s) with determinant 1."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise ValueError("determinant must be 1: %r" % (self,))

    def __mul__(self, o: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.p * o.p + self.q * o.r,
            self.p * o.q + self.q * o.s,
            self.r * o.p + self.s * o.r,
            self.r * o.q + self.s * o.s,
        )

    def inv(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.s, -self.q, -self.r, self.p)

    def act(self, tau):
        """Moebius action on a point of the upper half-plane (mpc in, mpc out)."""
        return (self.p * tau + self.q) / (self.r * tau + self.s)

    def as_tuple(self):
        return (self.p, self.q, self.r, self.s)


IDENTITY = UnimodularMatrix(1, 0, 0, 1)


def translation(k: int) -> UnimodularMatrix:
    return UnimodularMatrix(1, k, 0, 1)


S_FLIP = UnimodularMatrix(0, -1, 1, 0)


# ----------------------------------------------------------------------
# forms
# ----------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QuadForm:
    """ax^2 + bxy + cy^2 with a > 0 and negative discriminant."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("form must have a > 0")
        if self.disc() >= 0:
            raise ValueError("form must be positive definite")

    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def is_primitive(self) -> bool:
        return self.content() == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def apply(self, M: UnimodularMatrix) -> "QuadForm":
        """The form Q(M(x,y)), i.e. Q composed with M."""
        a, b, c = self.a, self.b, self.c
        p, q, r, s = M.as_tuple()
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def scaled(self, f: int) -> "QuadForm":
        return QuadForm(f * self.a, f * self.b, f * self.c)

    def evaluate(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y


def discriminant(Q: QuadForm) -> int:
    return Q.disc()


def reduce(Q: QuadForm):
    """Gauss-reduce Q.  Returns (Q_red, M) with Q.apply(M.inv()) == Q_red.

    Reduced means |b| <= a <= c with b > 0 whenever |b| = a or a = c.
    """
    cur = Q
    U = IDENTITY  # accumulated so that cur == Q.apply(U)
    for _ in range(64 + 4 * Q.a.bit_length() + 4 * Q.c.bit_length()):
        a, b, _ = cur.a, cur.b, cur.c
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            T = translation(k)
            cur, U = cur.apply(T), U * T
        if cur.a > cur.c:
            cur, U = cur.apply(S_FLIP), U * S_FLIP
            continue
        if cur.a == cur.c and cur.b < 0:
            cur, U = cur.apply(S_FLIP), U * S_FLIP
        if cur.is_reduced():
            return cur, U.inv()
    raise RuntimeError("reduction failed to converge on %r" % (Q,))


def _check_disc(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("not a negative discriminant: %d" % D)


def enumerate_primitive_reduced(D: int):
    """All reduced primitive forms of discriminant D, sorted by (a, b)."""
    _check_disc(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if (abs(b) == a or a == c) and b < 0:
                continue
            F = QuadForm(a, b, c)
            if F.is_primitive():
                out.append(F)
    out.sort(key=lambda F: (F.a, F.b))
    return out


@lru_cache(maxsize=None)
def class_number(D: int) -> int:
    return len(enumerate_primitive_reduced(D))


# ----------------------------------------------------------------------
# discriminant decomposition D = t^2 d
# ----------------------------------------------------------------------

def _is_fundamental(d: int) -> bool:
    if d >= 0:
        return False
    if d % 4 == 1:
        return _squarefree(-d) if d % 2 else False
    if d % 4 == 0:
        m = d // 4
        return _squarefree(-m) and m % 4 in (2, 3)
    return False


def _squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


@dataclass(frozen=True)
class Discriminant:
    """Negative discriminant D = t^2 d with d fundamental."""

    D: int
    t: int
    d: int

    @staticmethod
    def from_D(D: int) -> "Discriminant":
        _check_disc(D)
        # largest square divisor t^2 leaving a fundamental quotient
        for tt in range(math.isqrt(-D), 0, -1):
            if D % (tt * tt) == 0 and _is_fundamental(D // (tt * tt)):
                return Discriminant(D, tt, D // (tt * tt))
        raise ValueError("no fundamental decomposition for %d" % D)

    @staticmethod
    def for_partition(n: int) -> "Discriminant":
        if n < 1:
            raise ValueError("n must be >= 1")
        return Discriminant.from_D(1 - 24 * n)

    @property
    def n(self):
        if (1 - self.D) % 24 == 0:
            return (1 - self.D) // 24
        return None

    def square_conductors(self):
        """All f >= 1 with f^2 | D and D/f^2 still a discriminant."""
        out = []
        for f in range(1, math.isqrt(-self.D) + 1):
            if self.D % (f * f) == 0 and (self.D // (f * f)) % 4 in (0, 1):
                out.append(f)
        return out


# ----------------------------------------------------------------------
# coset representatives
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CosetRep:
    """One of the 12 right-coset representatives of Gamma_0(6) in SL_2(Z).

    `cusp` is the cusp the representative maps to infinity ("oo", "1/3",
    "1/2", "0"); `index` the translation offset within that cusp's block.
    """

    cusp: str
    index: int
    matrix: UnimodularMatrix

    @property
    def label(self) -> str:
        return "%s:%d" % (self.cusp, self.index)

    def width(self) -> int:
        return {"oo": 1, "1/3": 2, "1/2": 3, "0": 6}[self.cusp]


def _build_coset_reps():
    reps = [CosetRep("oo", 0, IDENTITY)]
    for r in range(2):
        reps.append(CosetRep("1/3", r, UnimodularMatrix(1, 0, 3, 1) * translation(r)))
    for s in range(3):
        reps.append(CosetRep("1/2", s, UnimodularMatrix(1, 1, 2, 3) * translation(s)))
    for t in range(6):
        reps.append(CosetRep("0", t, S_FLIP * translation(t)))
    return tuple(reps)


COSET_REPS = _build_coset_reps()


def coset_assign(Q: QuadForm, residue: int = 1):
    """The unique coset rep g among the 12 with Q.apply(g.inv()) normalized.

    Normalized means 6 | a' and b' == residue (mod 12).  Returns
    (rep, transformed form).  Uniqueness is asserted; a violation would mean
    the coset list or the action is wrong, so it raises RuntimeError.
    """
    if residue % 2 == 0 or residue % 3 == 0:
        raise ValueError("residue must be a unit mod 12")
    hits = []
    for rep in COSET_REPS:
        cand = Q.apply(rep.matrix.inv())
        if cand.a % 6 == 0 and cand.b % 12 == residue % 12:
            hits.append((rep, cand))
    if len(hits) != 1:
        raise RuntimeError(
            "coset assignment not unique for %r (residue %d): %d hits"
            % (Q, residue, len(hits))
        )
    return hits[0]


def _fix_c_unit(F: QuadForm, modulus: int = 6) -> QuadForm:
    """Translate F by T^k (preserving 6|a, b mod 12) until gcd(c, modulus)=1."""
    for k in range(6):
        cand = F.apply(translation(k))
        if math.gcd(cand.c, modulus) == 1:
            return cand
    raise RuntimeError("no translation fixes gcd(c, %d) for %r" % (modulus, F))


def gamma06_representatives(D: int, residue: int = 1):
    """Per SL_2(Z)-class: (reduced form, coset rep, normalized form).

    The third components are primitive with 6 | a, b == residue (mod 12),
    gcd(c, 6) = 1, pairwise inequivalent under Gamma_0(6).
    """
    _check_disc(D)
    out = []
    for Q in enumerate_primitive_reduced(D):
        rep, F = coset_assign(Q, residue)
        out.append((Q, rep, _fix_c_unit(F)))
    return out


# ----------------------------------------------------------------------
# N-systems
# ----------------------------------------------------------------------

def _validate_n_system(forms, D: int, N: int):
    if len(forms) != class_number(D):
        raise RuntimeError("N-system has wrong class count")
    for F in forms:
        if F.disc() != D:
            raise RuntimeError("N-system member has wrong discriminant")
        if math.gcd(F.c, N) != 1:
            raise RuntimeError("N-system member violates gcd(c, N) = 1: %r" % (F,))
    for F in forms[1:]:
        if (F.b - forms[0].b) % N:
            raise RuntimeError("N-system middle coefficients disagree mod %d" % N)
    return forms


def n_system(D: int, N: int):
    """Class representatives with gcd(c_j, N) = 1 and all b_j congruent mod N."""
    _check_disc(D)
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 6 and D % 24 == 1:
        forms = [F for (_, _, F) in gamma06_representatives(D)]
        return _validate_n_system(forms, D, N)
    # bounded search: per class, map achievable (b mod N) -> candidate form
    achievable = []
    for Q in enumerate_primitive_reduced(D):
        cand = {}
        seeds = [Q, QuadForm(Q.c, -Q.b, Q.a)]
        for seed in seeds:
            for k in range(-4 * N, 4 * N + 1):
                F = seed.apply(translation(k))
                if math.gcd(F.c, N) == 1:
                    cand.setdefault(F.b % N, F)
        achievable.append(cand)
    common = set(achievable[0])
    for cand in achievable[1:]:
        common &= set(cand)
    if not common:
        raise RuntimeError("bounded N-system search failed for D=%d, N=%d" % (D, N))
    r = min(common)
    return _validate_n_system([cand[r] for cand in achievable], D, N)


# ----------------------------------------------------------------------
# CM points and cusp data
# ----------------------------------------------------------------------

def cm_point(Q: QuadForm, prec: int = 128) -> BigComplex:
    """Root of Q(tau, 1) = 0 in the upper half-plane, to prec bits."""
    with local_prec(prec + 16):
        tau = mpmath.mpc(
            mpmath.mpf(-Q.b) / (2 * Q.a),
            mpmath.sqrt(mpmath.mpf(-Q.disc())) / (2 * Q.a),
        )
        err = abs(tau) * mpmath.mpf(2) ** (-prec - 4)
    return BigComplex(tau, err)


@dataclass(frozen=True)
class CuspData:
    """Leading-term data of the weight -2 form slashed to Q's coset.

    h:        cusp width in {1, 2, 3, 6}
    zeta_exp: exponent e mod 6 with zeta = exp(pi*i*e/3)
    phi:      main-term argument as an exact Fraction multiple of pi in (-1, 1]
    """

    h: int
    zeta_exp: int
    phi: Fraction

    @property
    def zeta(self):
        e = self.zeta_exp % 6
        return mpmath.exp(mpmath.mpc(0, 1) * mpmath.pi * e / 3)

    def phi_float(self):
        return mpmath.pi * mpmath.mpf(self.phi.numerator) / self.phi.denominator


def _leading_zeta_exp(rep: CosetRep) -> int:
    """Exponent e (mod 6) of the sixth root of unity in the q^(-1/h) term."""
    if rep.cusp == "oo":
        return 0
    if rep.cusp == "1/3":
        return 3 * rep.index % 6
    if rep.cusp == "1/2":
        return (3 - 2 * rep.index) % 6
    return (-rep.index) % 6  # cusp 0


def cusp_invariants(Q: QuadForm, n: int) -> CuspData:
    """(h_Q, zeta_Q, phi_Q) for a reduced primitive form of discriminant 1-24n."""
    if Q.disc() != 1 - 24 * n:
        raise ValueError("form discriminant does not match n")
    rep, _ = coset_assign(Q)
    h = rep.width()
    e = _leading_zeta_exp(rep)
    e_sym = e - 6 if e > 3 else e  # symmetric exponent in (-3, 3]
    phi = Fraction(4 * e_sym + Q.b, 12)
    # fold into (-1, 1] (multiples of pi)
    phi = Fraction((phi.numerator % (2 * phi.denominator)), phi.denominator)
    if phi > 1:
        phi -= 2
    if Q.a * h % 6:
        raise RuntimeError("cusp width inconsistency: a*h not divisible by 6")
    return CuspData(h, e % 6, phi)
