"""Trace of singular moduli: partition certificates and class polynomials.

The independent oracles are the Euler-recurrence partition table, the
Dirichlet-tested class numbers, and a direct ball-arithmetic product of
(x - P(tau_Q)) over every form, primitive or not.
"""

from fractions import Fraction

import mpmath
import pytest

from singmoduli.oracles import euler_p
from singmoduli.precision import BigComplex, EvalContext, local_prec
from singmoduli.qforms import class_number, cm_point
from singmoduli.modeval import eval_modular
from singmoduli.trace import (
    assemble_H,
    build_Hhat,
    eps_conductor,
    partition_bo,
    singular_forms,
)


def test_partition_bo_agrees_with_euler_table(ptable):
    for n in range(1, 21):
        cert = partition_bo(n)
        assert cert.n == n
        assert cert.p == ptable[n]
        assert cert.residual < 1e-6
        assert cert.nforms == class_number(1 - 24 * n)


def test_partition_certificate_records_precision():
    cert = partition_bo(6)
    assert cert.prec >= 64
    assert cert.residual <= cert.err_bound


def test_hhat_degree_is_class_number():
    for n in (1, 2, 3, 5, 8, 13):
        D = 1 - 24 * n
        h = build_Hhat(D)
        assert h.h == class_number(D)
        assert len(h.coeffs) == h.h + 1
        assert h.coeffs[0] == 1


def test_hhat_scaled_convention():
    for D in (-23, -47):
        h = build_Hhat(D)
        assert all(isinstance(s, int) for s in h.scaled)
        for k, (s, c) in enumerate(zip(h.scaled, h.coeffs)):
            assert Fraction(s) == c * Fraction(-D) ** k


def test_hhat_recognition_stable_under_precision_boost():
    for D in (-23, -47):
        lo = build_Hhat(D, EvalContext(prec=128))
        hi = build_Hhat(D, EvalContext(prec=256))
        assert lo.scaled == hi.scaled
        assert lo.coeffs == hi.coeffs


def test_hhat_rejects_bad_discriminant():
    with pytest.raises(ValueError):
        build_Hhat(-20)
    with pytest.raises(ValueError):
        build_Hhat(23)


def test_hhat_vanishes_at_singular_moduli():
    D = -47
    hhat = build_Hhat(D)
    ctx = EvalContext(prec=192)
    _, rows = singular_forms(2)
    with local_prec(256):
        for f, qred, rep, qn in rows:
            assert f == 1
            val = eval_modular("P", cm_point(qn, 192), ctx)
            acc = BigComplex(mpmath.mpc(0))
            for c in hhat.coeffs:
                cb = BigComplex(mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator))
                acc = acc * val + cb
            assert abs(acc.val) <= acc.err * 4 + mpmath.mpf(2) ** -100


def test_eps_conductor_values():
    assert eps_conductor(1) == 1
    assert eps_conductor(11) == 1
    assert eps_conductor(13) == 1
    assert eps_conductor(5) == -1
    assert eps_conductor(7) == -1
    with pytest.raises(ValueError):
        eps_conductor(6)


def test_assemble_H_rejects_bad_discriminant():
    with pytest.raises(ValueError):
        assemble_H(-24)


def test_assemble_H_equals_direct_product_over_all_forms():
    # D = -575 has the imprimitive layer: 18 primitive forms plus 3 forms
    # that are 5 times a form of discriminant -23 (same CM points)
    D = -575
    H = assemble_H(D)
    assert H.degree == 21
    ctx = EvalContext(prec=700)
    _, rows = singular_forms(24)
    assert len(rows) == 21
    with local_prec(780):
        coeffs = [BigComplex(mpmath.mpc(1))]
        for f, qred, rep, qn in rows:
            val = eval_modular("P", cm_point(qn, 760), ctx)
            nxt = [BigComplex(mpmath.mpc(0)) for _ in range(len(coeffs) + 1)]
            for i, c in enumerate(coeffs):
                nxt[i] = nxt[i] + c
                nxt[i + 1] = nxt[i + 1] - c * val
            coeffs = nxt
        assert len(coeffs) == H.degree + 1
        for ball, frac in zip(coeffs, H.coeffs):
            ref = mpmath.mpf(frac.numerator) / mpmath.mpf(frac.denominator)
            assert abs(ball.val - ref) <= ball.err + abs(ref) * mpmath.mpf(2) ** -700
            # imaginary parts are pure numerical noise
            assert abs(ball.val.imag) <= ball.err


def test_assemble_H_factor_identity_for_575():
    # H_-575(x) = Hhat_-575(x) * (-1)^3 Hhat_-23(-x), written out exactly
    H = assemble_H(-575)
    outer = build_Hhat(-575)
    inner = build_Hhat(-23)
    twisted = [(-1) ** 3 * c * (-1) ** (inner.h - k) for k, c in enumerate(inner.coeffs)]
    prod = [Fraction(0)] * (outer.h + inner.h + 1)
    for i, a in enumerate(outer.coeffs):
        for j, b in enumerate(twisted):
            prod[i + j] += a * b
    assert tuple(prod) == H.coeffs


def test_singular_forms_row_structure():
    disc, rows = singular_forms(24)
    assert disc.D == -575
    confs = sorted({f for f, *_ in rows})
    assert confs == [1, 5]
    for f, qred, rep, qn in rows:
        assert qred.disc() == -575 // (f * f)
        assert qn.disc() == -575 // (f * f)
        # conductor-f rows are normalized to the residue class of f mod 12
        assert qn.a % 6 == 0 and qn.b % 12 == f % 12
