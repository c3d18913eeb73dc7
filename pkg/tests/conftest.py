"""Shared fixtures: oracle tables and deterministic random sampling."""

import random

import mpmath
import pytest

from singmoduli.oracles import euler_p


@pytest.fixture(scope="session")
def ptable():
    """Exact p(0..200) by the pentagonal recurrence."""
    return euler_p(200)


@pytest.fixture()
def rng():
    """Fresh deterministic generator per test; reseeding keeps runs stable."""
    return random.Random(0x5EED)


def random_tau(rng, vmin=0.05, vmax=5.0):
    """A point of the upper half-plane with Im in [vmin, vmax]."""
    u = rng.uniform(-1.5, 1.5)
    v = rng.uniform(vmin, vmax)
    return mpmath.mpc(u, v)


def random_gamma0N(rng, N, size=40):
    """A random element of Gamma_0(N) with entries of moderate size.

    Walks a word in T = [1,1;0,1] and V = [1,0;N,1], which generate a
    finite-index subgroup; both are in Gamma_0(N), so any word is too.
    """
    a, b, c, d = 1, 0, 0, 1
    for _ in range(rng.randint(2, 6)):
        if rng.random() < 0.5:
            k = rng.randint(-3, 3)
            # right-multiply by T^k
            a, b, c, d = a, b + a * k, c, d + c * k
        else:
            k = rng.randint(-2, 2)
            # right-multiply by V^k
            a, b, c, d = a + b * N * k, b, c + d * N * k, d
        if max(abs(a), abs(b), abs(c), abs(d)) > size:
            break
    assert a * d - b * c == 1 and c % N == 0
    return (a, b, c, d)
