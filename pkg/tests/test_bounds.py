"""Analytic certificates: coefficient bounds, kappa, and separation.

The closed-form bound values are recomputed directly from their defining
expressions with mpmath; everything else is checked through the module's
own dual routes (exact coefficient vs. bound, report verdicts vs. raw
inequalities).
"""

import math

import mpmath
import pytest

from singmoduli.bounds import (
    KAPPA_DECIMAL,
    ah_products,
    coefficient_domination,
    exact_poincare_coeff,
    kappa_certificate,
    kappa_claim,
    main_term,
    poincare_coeff_bound,
    remainder_report,
    separation_range,
    separation_report,
)
from singmoduli.precision import EvalContext, local_prec


def test_bound_at_zero_is_closed_form():
    with local_prec(120):
        got = poincare_coeff_bound(0)
        ref = mpmath.mpf(2) / 27 * mpmath.pi**4 * mpmath.zeta(3)
        assert abs(got - ref) <= abs(ref) * mpmath.mpf(2) ** -40


def test_bound_at_one_is_closed_form():
    with local_prec(120):
        got = poincare_coeff_bound(1)
        ref = 12 * mpmath.pi * (
            mpmath.exp(2 * mpmath.pi / 3) / mpmath.sqrt(3)
            + mpmath.pi**3 / 81 * mpmath.zeta(3)
        )
        assert abs(got - ref) <= abs(ref) * mpmath.mpf(2) ** -40


def test_bound_times_decay_is_summable_tail():
    with local_prec(120):
        vals = [
            poincare_coeff_bound(l) * mpmath.exp(-mpmath.pi * mpmath.sqrt(3) * l / 6)
            for l in range(25, 41)
        ]
        for a, b in zip(vals, vals[1:]):
            assert b < a


def test_domination_report_all_rows_pass():
    report = coefficient_domination(30)
    assert len(report.rows) == 31
    for row in report.rows:
        assert row.ok
        assert row.exact_upper <= row.bound


def test_exact_coeff_dominated_for_sample_v():
    ctx = EvalContext(prec=128)
    with local_prec(160):
        for l in (0, 1, 2, 5, 17, 30):
            bound = poincare_coeff_bound(l)
            for v in (mpmath.sqrt(3) / 2, mpmath.mpf(1), mpmath.mpf(2)):
                val = exact_poincare_coeff(l, v, ctx=ctx)
                assert abs(val.val) + val.err <= bound
                if l > 0:
                    assert abs(val.val.imag) <= val.err


def test_exact_coeff_tail_is_honest():
    ctx = EvalContext(prec=128)
    with local_prec(160):
        for l in (1, 4, 9):
            near = exact_poincare_coeff(l, cmax=600, ctx=ctx)
            far = exact_poincare_coeff(l, cmax=1200, ctx=ctx)
            assert abs(near.val - far.val) <= near.err


def test_kappa_certificate_meets_claim():
    cert = kappa_certificate()
    assert cert.upper > 0
    assert cert.upper <= mpmath.mpf(KAPPA_DECIMAL)
    assert cert.claimed == mpmath.mpf(KAPPA_DECIMAL)
    assert cert.terms > 20
    assert cert.tail < mpmath.mpf("1e-20")
    assert abs(kappa_claim() - mpmath.mpf(KAPPA_DECIMAL)) < mpmath.mpf("1e-10")


def test_kappa_monotone_in_h():
    loose = kappa_certificate(h=6)
    tight = kappa_certificate(h=1)
    assert tight.upper < loose.upper


def test_main_term_values():
    with local_prec(120):
        m = main_term(54, 12)
        assert mpmath.mpf("1.0e4") < m < mpmath.mpf("1.2e4")
        half_width = mpmath.atan(kappa_claim() / m)
        assert mpmath.mpf("0.118") < half_width < mpmath.mpf("0.122")
        assert half_width < mpmath.pi / 24
        ref = mpmath.exp(mpmath.pi * mpmath.sqrt(23) / 6) * (
            1 - 6 / (mpmath.pi * mpmath.sqrt(23))
        )
        got = main_term(1, 6)
        assert abs(got - ref) <= abs(ref) * mpmath.mpf(2) ** -40


def test_main_term_decreasing_in_ah():
    with local_prec(96):
        for n in (54, 200, 500):
            vals = [main_term(n, ah) for ah in (6, 12, 18, 24, 36)]
            for a, b in zip(vals, vals[1:]):
                assert b < a


def test_remainder_bounded_by_kappa_on_deterministic_grid():
    corner = mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2)
    points = [corner] + [
        mpmath.mpc(0, v) for v in (1, mpmath.mpf("1.5"), 2, 3, 4, 5, 6, 8, 10)
    ]
    report = remainder_report(points=points)
    assert len(points) == 10
    assert report.ok
    assert report.worst <= report.kappa
    # 12 cosets at each grid point plus the CM probes
    assert len(report.probes) >= 120
    for probe in report.probes:
        assert probe.ok
        assert probe.abs_remainder <= report.kappa


def test_separation_passes_at_54_with_reported_angle():
    report = separation_report(54)
    assert report.ok
    assert report.gap_ok and report.angle_ok and report.sector_ok
    assert report.table_checked and report.table_ok
    assert 0.118 < float(report.angle) < 0.122
    assert float(report.angle) < math.pi / 24
    assert report.angle_margin > 0
    assert report.min_gap > 2 * float(report.kappa)
    assert all(row.matches for row in report.rows)


def test_separation_angle_fails_just_below_threshold():
    report = separation_report(53)
    assert not report.angle_ok
    assert report.angle_margin < 0
    assert not report.ok


def test_separation_report_produced_below_claim_range():
    report = separation_report(10)
    assert report.n == 10
    assert isinstance(report.ok, bool)


def test_separation_sweep_54_to_500():
    sweep = separation_range(54, 500)
    assert sweep.checked == 447
    assert sweep.failures == ()
    assert sweep.worst_angle_margin > 0
    assert sweep.min_gap_over_2kappa > 1


@pytest.mark.parametrize("parity_base", [24, 25])
def test_main_term_table_consistency_twenty_each_parity(parity_base):
    for n in range(parity_base, parity_base + 40, 2):
        report = separation_report(n)
        assert report.table_checked
        assert report.table_ok, "table mismatch at n=%d" % n
        assert all(row.matches for row in report.rows)


def test_ah_products_start_at_six_and_include_twelve():
    for n in (24, 54, 101):
        prods = ah_products(n)
        assert prods[0] == 6
        assert 12 in prods
        assert all(p % 6 == 0 for p in prods)
