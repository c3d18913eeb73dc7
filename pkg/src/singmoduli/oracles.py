"""Independent computations of p(n): Euler recursion, Rademacher, asymptotic.

These are the ground truth the trace formula is checked against.  The three
routes share nothing beyond integer arithmetic and the Bessel closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .precision import BigComplex, EvalContext, local_prec
from .specfun import bessel_I_3half_closed, dedekind_sum


@dataclass
class PartitionTable:
    """p(0..N) as exact integers."""

    values: list

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise ValueError("p(0) must be 1")
        for i in range(1, len(self.values)):
            if self.values[i] < self.values[i - 1]:
                raise ValueError("partition counts must be non-decreasing")

    def __getitem__(self, n: int) -> int:
        return self.values[n]

    def __len__(self):
        return len(self.values)


def euler_p(N: int) -> PartitionTable:
    """p(0..N) via the pentagonal-number recurrence."""
    if N < 0:
        raise ValueError("N must be >= 0")
    p = [1] + [0] * N
    for n in range(1, N + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return PartitionTable(p)


def _A_k(n: int, k: int, prec: int):
    """Rademacher's A_k(n): sum over h mod k, gcd(h,k)=1 of
    exp(pi*i*s(h,k) - 2*pi*i*n*h/k), s the Dedekind sum.  Real-valued."""
    import math as _math

    if k == 1:
        return mpmath.mpf(1)
    total = mpmath.mpc(0)
    pi = mpmath.pi
    for h in range(k):
        if _math.gcd(h, k) != 1:
            continue
        s = dedekind_sum(h, k)
        ang = pi * (mpmath.mpf(s.numerator) / s.denominator) - 2 * pi * n * h / k
        total += mpmath.exp(1j * ang)
    return total.real


def rademacher_p(n: int, K: int, ctx: EvalContext | None = None):
    """Truncated Rademacher sum: (rounded integer, distance-to-integer residual).

    p(n) = 2 pi (24n-1)^(-3/4) sum_{k<=K} A_k(n)/k * I_{3/2}(pi sqrt(24n-1)/(6k)).
    """
    ctx = ctx or EvalContext()
    if n < 1 or K < 1:
        raise ValueError("need n >= 1 and K >= 1")
    # the k=1 Bessel term has magnitude ~ e^(pi sqrt(24n-1)/6); make sure the
    # working precision clears it with room for the residual check
    need = int(3.1416 * (24 * n) ** 0.5 / 6 / 0.6931) + 64
    prec = max(ctx.prec, need)
    with local_prec(prec):
        x0 = mpmath.pi * mpmath.sqrt(mpmath.mpf(24 * n - 1))
        total = mpmath.mpf(0)
        for k in range(1, K + 1):
            ak = _A_k(n, k, prec)
            bi = bessel_I_3half_closed(x0 / (6 * k), EvalContext(prec=prec))
            total += ak / k * bi.val.real
        value = 2 * mpmath.pi * mpmath.mpf(24 * n - 1) ** mpmath.mpf("-0.75") * total
        p = int(mpmath.nint(value))
        residual = abs(value - p)
    if residual >= 0.25:
        raise ValueError(
            "Rademacher truncation too short: residual %s at n=%d, K=%d"
            % (mpmath.nstr(residual, 5), n, K)
        )
    return p, residual


def rademacher_policy_K(n: int) -> int:
    """Truncation policy K(n) = ceil(2 sqrt(n)) + 5."""
    import math as _math

    s = _math.isqrt(4 * n)
    return (s if s * s == 4 * n else s + 1) + 5


def hardy_ramanujan_asymptotic(n: int, ctx: EvalContext | None = None) -> BigComplex:
    """Leading asymptotic (1/(4 n sqrt(3))) exp(pi sqrt(2n/3))."""
    ctx = ctx or EvalContext()
    if n < 1:
        raise ValueError("n must be >= 1")
    with local_prec(ctx.prec + 16):
        v = mpmath.exp(mpmath.pi * mpmath.sqrt(mpmath.mpf(2 * n) / 3)) / (
            4 * n * mpmath.sqrt(mpmath.mpf(3))
        )
        err = 8 * abs(v) * mpmath.mpf(2) ** (-ctx.prec - 10)
    return BigComplex(v, err)
