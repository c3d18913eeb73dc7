"""Modular polynomials and the Taylor-coefficient route to C.

Independence comes from three directions: the classical integer table for
Phi_2, mpmath's kleinj as a foreign j-evaluator, and exact vanishing at
textbook singular moduli (1728, 8000, -3375).
"""

from fractions import Fraction

import mpmath
import pytest

from singmoduli.masser import (
    beta_values,
    eval_MD,
    load_modular_polynomial,
    masser_C,
    modular_polynomial,
    psi_index,
    save_modular_polynomial,
)
from singmoduli.modeval import eval_atomic, eval_modular
from singmoduli.precision import BigComplex, EvalContext, PoleProximityError, local_prec
from singmoduli.qforms import QuadForm, cm_point
from singmoduli.trace import singular_forms

PHI2_CLASSICAL = {
    (3, 0): 1,
    (0, 3): 1,
    (2, 2): -1,
    (2, 1): 1488,
    (1, 2): 1488,
    (2, 0): -162000,
    (0, 2): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000,
    (0, 1): 8748000000,
    (0, 0): -157464000000000,
}


def test_phi1_is_x_minus_y():
    phi = modular_polynomial(1)
    assert phi.coeffs == {(1, 0): 1, (0, 1): -1}


def test_phi2_matches_classical_table():
    phi = modular_polynomial(2)
    assert phi.coeffs == PHI2_CLASSICAL
    assert phi.coeffs[(2, 2)] == -1


def test_phi2_diagonal_roots_are_textbook_singular_moduli():
    # Phi_2(x,x) = -(x - 1728)(x - 8000)(x + 3375)^2
    phi = modular_polynomial(2)
    for j in (1728, 8000, -3375):
        assert phi.evaluate(Fraction(j), Fraction(j)) == 0
    assert phi.evaluate(Fraction(5), Fraction(5)) != 0


def test_psi_index_values():
    assert psi_index(2) == 3
    assert psi_index(3) == 4
    assert psi_index(5) == 6
    assert psi_index(6) == 12
    assert psi_index(12) == 24
    assert psi_index(23) == 24
    with pytest.raises(ValueError):
        psi_index(0)


def test_degree_cap_and_validation():
    with pytest.raises(ValueError):
        modular_polynomial(0)
    with pytest.raises(ValueError):
        modular_polynomial(102)


@pytest.mark.parametrize("m", [2, 3, 5, 6, 23])
def test_phi_symmetry_integrality_degree(m):
    phi = modular_polynomial(m)
    assert phi.degree == psi_index(m)
    for (i, j), c in phi.coeffs.items():
        assert isinstance(c, int)
        assert phi.coeffs[(j, i)] == c
    assert phi.coeffs[(psi_index(m), 0)] == 1
    assert phi.height_bits() > 0


@pytest.mark.parametrize("m", [2, 3])
def test_phi_vanishes_on_isogenous_j_pairs(m):
    # foreign oracle: mpmath's Klein j at tau and m*tau, two precisions
    phi = modular_polynomial(m)
    for prec in (160, 224):
        with mpmath.workprec(prec + 80):
            tau = mpmath.mpc(mpmath.mpf("0.13"), mpmath.mpf("1.07"))
            x = 1728 * mpmath.kleinj(tau)
            y = 1728 * mpmath.kleinj(m * tau)
            total = mpmath.mpc(0)
            scale = mpmath.mpf(0)
            for (i, j), c in phi.coeffs.items():
                term = c * x**i * y**j
                total += term
                scale += abs(term)
            assert abs(total) <= scale * mpmath.mpf(2) ** (-prec + 10)


def test_masser_special_discriminant_rejected():
    # D = -12 = -3*(2^2): the diagonal tangency degenerates and beta01's
    # ball contains zero
    phi = modular_polynomial(12)
    ctx = EvalContext(prec=192)
    with local_prec(256):
        tau = cm_point(QuadForm(1, 0, 3), 224)
        jq = eval_atomic("j", tau, ctx)
        with pytest.raises(PoleProximityError):
            masser_C(phi, jq, ctx)


def test_beta_symmetric_arguments_at_minus_23():
    phi = modular_polynomial(23)
    ctx = EvalContext(prec=256)
    with local_prec(320):
        tau = cm_point(QuadForm(1, 1, 6), 288)
        jq = eval_atomic("j", tau, ctx)
        b01, b02, b11 = beta_values(phi, jq, ctx)
        # tau on the line Re = -1/2 pairs with itself under conjugation, so
        # the betas are real up to the error bounds
        for b in (b01, b02, b11):
            assert abs(b.val.imag) <= b.err * 2 + abs(b.val) * mpmath.mpf(2) ** -200


def test_masser_C_matches_direct_for_all_three_forms():
    phi = modular_polynomial(23)
    ctx = EvalContext(prec=256)
    _, rows = singular_forms(1)
    assert len(rows) == 3
    with local_prec(340):
        for f, qred, rep, qn in rows:
            tau = cm_point(qn, 300)
            jq = eval_atomic("j", tau, ctx)
            via_phi = masser_C(phi, jq, ctx)
            direct = eval_modular("C", tau, ctx)
            gap = abs(via_phi.val - direct.val)
            assert gap < mpmath.mpf("1e-15")
            assert gap <= via_phi.err + direct.err


def test_eval_MD_equals_P_at_cm_points():
    phi = modular_polynomial(23)
    ctx = EvalContext(prec=256)
    _, rows = singular_forms(1)
    with local_prec(340):
        for f, qred, rep, qn in rows:
            md = eval_MD(qn, phi, ctx)
            p = eval_modular("P", cm_point(qn, 300), ctx)
            assert abs(md.val - p.val) <= md.err + p.err


def test_eval_MD_rejects_mismatched_level():
    phi = modular_polynomial(2)
    with pytest.raises(ValueError):
        eval_MD(QuadForm(6, 1, 1), phi)


def test_save_load_round_trip(tmp_path):
    phi = modular_polynomial(3)
    path = tmp_path / "phi3.txt"
    save_modular_polynomial(phi, path)
    back = load_modular_polynomial(path)
    assert back.m == 3
    assert back.coeffs == phi.coeffs


def test_load_rejects_empty_and_asymmetric(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    with pytest.raises(ValueError):
        load_modular_polynomial(empty)
    bad = tmp_path / "bad.txt"
    bad.write_text("m = 2\n[1,0] 5\n[0,1] 7\n")
    with pytest.raises(ValueError):
        load_modular_polynomial(bad)
