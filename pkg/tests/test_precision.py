"""Ball arithmetic: containment under every operation, exact construction.

The oracle is mpmath at much higher precision: compute each operation on
randomly perturbed true values, then check the true result stays inside
the reported ball.
"""

import math
import random

import mpmath
import pytest

from singmoduli.precision import (
    BigComplex,
    EvalContext,
    PoleProximityError,
    bc_exp,
    bc_sqrt,
    local_prec,
)


def test_construction_is_exact():
    # mpf()/mpc() constructors round to ambient precision; BigComplex must
    # not lose bits when wrapping an already-exact value
    with local_prec(300):
        x = mpmath.mpf(1) / 3
    with local_prec(53):
        ball = BigComplex(x)
        assert ball.val.real == x
        assert ball.err == 0


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        BigComplex(1, -1e-9)


def _perturbed(rng, ball):
    """A complex number guaranteed to lie in the ball."""
    theta = rng.uniform(0, 2 * math.pi)
    r = ball.err * rng.uniform(0, 1)
    return ball.val + mpmath.mpc(mpmath.cos(theta), mpmath.sin(theta)) * r


@pytest.mark.parametrize("seed", range(5))
def test_containment_add_mul_div(seed):
    rng = random.Random(seed)
    with local_prec(64):
        balls = [
            BigComplex(
                mpmath.mpc(rng.uniform(-4, 4), rng.uniform(-4, 4)),
                mpmath.mpf(10) ** rng.uniform(-12, -4),
            )
            for _ in range(6)
        ]
        combos = [
            (balls[0] + balls[1], lambda x, y: x + y, balls[0], balls[1]),
            (balls[2] - balls[3], lambda x, y: x - y, balls[2], balls[3]),
            (balls[0] * balls[4], lambda x, y: x * y, balls[0], balls[4]),
        ]
        if abs(balls[5].val) > 4 * balls[5].err:
            combos.append((balls[0] / balls[5], lambda x, y: x / y, balls[0], balls[5]))
    for out, op, bx, by in combos:
        with local_prec(256):
            for _ in range(20):
                tx, ty = _perturbed(rng, bx), _perturbed(rng, by)
                true = op(tx, ty)
                assert abs(true - out.val) <= out.err


@pytest.mark.parametrize("seed", range(3))
def test_containment_exp_sqrt_pow(seed):
    rng = random.Random(100 + seed)
    with local_prec(64):
        z = BigComplex(
            mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            mpmath.mpf(10) ** rng.uniform(-12, -6),
        )
        e = bc_exp(z)
        p = z ** 3
        s = None
        if abs(z.val) > 8 * z.err and not (
            z.val.real < 0 and abs(z.val.imag) <= 2 * z.err
        ):
            s = bc_sqrt(z)
    with local_prec(256):
        for _ in range(20):
            t = _perturbed(rng, z)
            assert abs(mpmath.exp(t) - e.val) <= e.err
            assert abs(t ** 3 - p.val) <= p.err
            if s is not None:
                assert abs(mpmath.sqrt(t) - s.val) <= s.err


def test_division_by_zero_ball_refused():
    with local_prec(64):
        z = BigComplex(mpmath.mpf(2) ** -40, mpmath.mpf(2) ** -39)
        with pytest.raises(PoleProximityError):
            BigComplex(1) / z


def test_sqrt_branch_cut_refused():
    with local_prec(64):
        z = BigComplex(mpmath.mpc(-1, 0), mpmath.mpf(1e-10))
        with pytest.raises(PoleProximityError):
            bc_sqrt(z)


def test_abs_bounds_are_ordered():
    with local_prec(64):
        z = BigComplex(mpmath.mpc(3, 4), mpmath.mpf("0.25"))
        assert z.abs_lower() <= abs(z.val) <= z.abs_upper()
        assert z.abs_upper() - z.abs_lower() <= 2 * z.err + 1e-15


def test_local_prec_restores():
    before = mpmath.mp.prec
    with local_prec(before + 77):
        assert mpmath.mp.prec == before + 77
    assert mpmath.mp.prec == before


def test_eval_context_validation():
    with pytest.raises(ValueError):
        EvalContext(prec=32)
    with pytest.raises(ValueError):
        EvalContext(terms=2)
    ctx = EvalContext(prec=96)
    assert ctx.bumped(32).prec == 128
    assert ctx.with_prec(200).prec == 200
