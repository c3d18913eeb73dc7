"""Partition oracles checked against a from-scratch enumeration.

The brute-force counter below uses the bounded-largest-part recursion,
which shares nothing with the pentagonal-number recurrence in euler_p or
with the Bessel series in rademacher_p.
"""

from functools import lru_cache

import pytest

from singmoduli.oracles import (
    euler_p,
    hardy_ramanujan_asymptotic,
    rademacher_p,
    rademacher_policy_K,
)


@lru_cache(maxsize=None)
def count_partitions(n, largest):
    """Number of partitions of n into parts of size <= largest."""
    if n == 0:
        return 1
    if largest == 0:
        return 0
    total = 0
    for part in range(min(n, largest), 0, -1):
        total += count_partitions(n - part, part)
    return total


def test_euler_against_direct_enumeration():
    table = euler_p(40)
    for n in range(41):
        assert table[n] == count_partitions(n, n if n else 1)


def test_euler_table_validation_guards():
    import singmoduli.oracles as oracles

    with pytest.raises(ValueError):
        oracles.PartitionTable([2])
    with pytest.raises(ValueError):
        oracles.PartitionTable([1, 1, 2, 1])


def test_rademacher_matches_euler_under_policy(ptable):
    for n in range(1, 201):
        p, residual = rademacher_p(n, rademacher_policy_K(n))
        assert p == ptable[n]
        assert residual < 0.25


def test_rademacher_short_truncation_raises():
    # K = 1 keeps only the leading arc; by n = 5 the dropped arcs push the
    # residual past the 0.25 guard
    with pytest.raises(ValueError):
        rademacher_p(5, 1)


def test_hardy_ramanujan_ratio_tends_to_one(ptable):
    # the leading asymptotic over-counts by O(1/sqrt(n)); check the gap
    # shrinks and is already modest at n = 150
    prev_gap = None
    for n in (10, 50, 150):
        approx = hardy_ramanujan_asymptotic(n)
        ratio = float(approx.val.real) / ptable[n]
        gap = abs(ratio - 1)
        assert gap < 0.2
        if prev_gap is not None:
            assert gap < prev_gap
        prev_gap = gap
    assert prev_gap < 0.05
