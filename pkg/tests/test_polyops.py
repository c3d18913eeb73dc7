"""Exact polynomial algebra: recognition, irreducibility, power structure.

The properties are closed under test-side arithmetic: products of certified
irreducibles must come back reducible, reported factors must divide with
zero remainder, and Yun / perfect-power output must reconstruct the input
exactly.
"""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from singmoduli.polyops import (
    irreducible_over_Q,
    perfect_power_structure,
    recognize_integer_polynomial,
    yun_decomposition,
)
from singmoduli.precision import BigComplex


def pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def ppow(a, e):
    out = [Fraction(1)]
    for _ in range(e):
        out = pmul(out, a)
    return out


def pdivmod(num, den):
    q = []
    r = [Fraction(v) for v in num]
    den = [Fraction(v) for v in den]
    while len(r) >= len(den):
        factor = r[0] / den[0]
        q.append(factor)
        for i in range(len(den)):
            r[i] -= factor * den[i]
        assert r[0] == 0
        r.pop(0)
    return q, r


def is_square(n):
    if n < 0:
        return False
    s = math.isqrt(n)
    return s * s == n


def irreducible_quadratic(a, b, c):
    return a != 0 and not is_square(b * b - 4 * a * c)


def cubic_has_rational_root(coeffs):
    a3, a2, a1, a0 = coeffs
    if a0 == 0:
        return True
    for p in range(1, abs(a0) + 1):
        if a0 % p:
            continue
        for q in range(1, abs(a3) + 1):
            if a3 % q:
                continue
            for num in (p, -p):
                r = Fraction(num, q)
                if a3 * r**3 + a2 * r**2 + a1 * r + a0 == 0:
                    return True
    return False


# ----------------------------------------------------------------------
# recognition
# ----------------------------------------------------------------------

def test_recognize_simple_vector():
    approx = [
        BigComplex(mpmath.mpc(1.0), mpmath.mpf("1e-12")),
        BigComplex(mpmath.mpc("-22.99999999997"), mpmath.mpf("1e-12")),
    ]
    assert recognize_integer_polynomial(approx) == [1, -23]


def test_recognize_rejects_far_from_integer():
    approx = [BigComplex(mpmath.mpc("0.4"), mpmath.mpf("1e-12"))]
    assert recognize_integer_polynomial(approx) is None


def test_recognize_rejects_wide_ball_and_imaginary_part():
    wide = [BigComplex(mpmath.mpc(7), mpmath.mpf("0.001"))]
    assert recognize_integer_polynomial(wide) is None
    crooked = [BigComplex(mpmath.mpc(7, "1e-4"), mpmath.mpf("1e-20"))]
    assert recognize_integer_polynomial(crooked) is None


# ----------------------------------------------------------------------
# irreducibility certificates
# ----------------------------------------------------------------------

def test_x_squared_plus_one_irreducible():
    cert = irreducible_over_Q([1, 0, 1])
    assert cert.irreducible and bool(cert)
    assert cert.degree == 2
    assert cert.method in ("modular-sieve", "factorization")


def test_x_squared_minus_one_reducible_with_exact_factors():
    cert = irreducible_over_Q([1, 0, -1])
    assert not cert.irreducible and not bool(cert)
    assert cert.factors
    acc = [Fraction(1)]
    for mult, fac in cert.factors:
        acc = pmul(acc, ppow([Fraction(v) for v in fac], mult))
    assert acc == [Fraction(1), Fraction(0), Fraction(-1)]


def test_degree_one_short_circuit_and_constants_rejected():
    cert = irreducible_over_Q([5, 3])
    assert cert.irreducible and cert.method == "degree"
    with pytest.raises(ValueError):
        irreducible_over_Q([7])


def test_hhat_minus_23_scaled_is_irreducible():
    cert = irreducible_over_Q([1, -529, 82616, -5097973])
    assert cert.irreducible
    assert cert.degree == 3


def force_irreducible_quadratic(a, b, c):
    a = a or 1
    while is_square(b * b - 4 * a * c):
        c += 1 if a > 0 else -1
    return [a, b, c]


def force_rootless_cubic(tup):
    tup = list(tup)
    tup[0] = tup[0] or 1
    while cubic_has_rational_root(tup):
        tup[3] += 1
    return tup


@settings(max_examples=200, deadline=None)
@given(
    q1=st.tuples(*[st.integers(-20, 20)] * 3),
    q2=st.tuples(*[st.integers(-20, 20)] * 4),
    use_cubic=st.booleans(),
)
def test_products_of_irreducibles_detected_reducible(q1, q2, use_cubic):
    f1 = force_irreducible_quadratic(*q1)
    f2 = force_rootless_cubic(q2) if use_cubic else force_irreducible_quadratic(*q2[:3])
    prod = pmul([Fraction(v) for v in f1], [Fraction(v) for v in f2])
    cert = irreducible_over_Q(prod)
    assert not cert.irreducible
    # every reported factor divides the primitive part exactly
    for mult, fac in cert.factors:
        q, r = pdivmod(prod, [Fraction(v) for v in fac])
        assert all(v == 0 for v in r)


# ----------------------------------------------------------------------
# perfect powers and squarefree decomposition
# ----------------------------------------------------------------------

def test_perfect_power_examples():
    e, base = perfect_power_structure([1, 0, 2, 0, 1])  # (x^2+1)^2
    assert e == 2
    assert list(base) == [1, 0, 1]
    e, base = perfect_power_structure([1, 0, 1])
    assert e == 1
    assert list(base) == [1, 0, 1]


@settings(max_examples=60, deadline=None)
@given(
    coeffs=st.lists(st.integers(-9, 9), min_size=2, max_size=5),
    e=st.integers(min_value=1, max_value=4),
)
def test_perfect_power_reconstructs(coeffs, e):
    if coeffs[0] == 0 or all(v == 0 for v in coeffs[1:]):
        return
    f = [Fraction(v) for v in coeffs]
    fe = ppow(f, e)
    got_e, base = perfect_power_structure(fe)
    # maximality can only refine e further (f itself may be a power)
    assert got_e % e == 0
    lead_ratio = fe[0] / ppow([Fraction(v) for v in base], got_e)[0]
    assert pmul([lead_ratio], ppow([Fraction(v) for v in base], got_e)) == fe


@settings(max_examples=60, deadline=None)
@given(
    a=st.lists(st.integers(-9, 9), min_size=2, max_size=4),
    b=st.lists(st.integers(-9, 9), min_size=2, max_size=3),
)
def test_yun_reconstructs_input(a, b):
    if a[0] == 0 or b[0] == 0:
        return
    f = pmul([Fraction(v) for v in a], ppow([Fraction(v) for v in b], 2))
    content, pieces = yun_decomposition(f)
    acc = [Fraction(content)]
    for i, part in pieces:
        acc = pmul(acc, ppow([Fraction(v) for v in part], i))
    assert acc == f
