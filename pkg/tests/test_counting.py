from math import comb

import pytest

import oracle
from stopred.counting import count_fullrank, count_fullrank_no_weight1, stirling2


def _stirling_brute(x, y):
    # surjections from x labelled items onto y blocks, divided by y!
    from itertools import product
    from math import factorial
    if x == 0:
        return 1 if y == 0 else 0
    return sum(1 for f in product(range(y), repeat=x) if len(set(f)) == y) // factorial(y)


def test_stirling_values():
    assert stirling2(0, 0) == 1
    assert stirling2(4, 2) == 7
    assert stirling2(5, 0) == 0
    assert stirling2(3, 5) == 0
    assert all(stirling2(n, 1) == 1 for n in range(1, 20))
    for x in range(0, 7):
        for y in range(0, x + 1):
            assert stirling2(x, y) == _stirling_brute(x, y)
    with pytest.raises(ValueError):
        stirling2(-1, 0)


def test_count_fullrank_small():
    assert count_fullrank(3, 3) == 168
    assert count_fullrank(7, 0) == 1
    for m in range(0, 4):
        for i in range(0, m + 1):
            assert count_fullrank(m, i) == oracle.count_fullrank(m, i)


def test_no_weight1_brute_force():
    for m in range(0, 5):
        for i in range(0, m + 1):
            assert count_fullrank_no_weight1(m, i) == oracle.count_no_weight1_fullrank(m, i), (m, i)


def test_no_weight1_examples():
    assert count_fullrank_no_weight1(3, 3) == 18
    assert all(count_fullrank_no_weight1(m, 2) == 0 for m in range(2, 7))
    assert all(count_fullrank_no_weight1(m, 0) == 1 for m in range(0, 6))
    assert all(count_fullrank_no_weight1(m, 1) == 0 for m in range(1, 6))


def test_dominated_by_all_fullrank():
    for m in range(0, 9):
        for i in range(0, m + 1):
            assert 0 <= count_fullrank_no_weight1(m, i) <= count_fullrank(m, i)


def test_large_ratio():
    M, N = count_fullrank(50, 30), count_fullrank_no_weight1(50, 30)
    assert (M - N) / N == pytest.approx(1.40e-6, rel=0.01)


def test_validation():
    with pytest.raises(ValueError):
        count_fullrank(2, 3)
    with pytest.raises(ValueError):
        count_fullrank_no_weight1(2, 3)


def test_binomial_sanity():
    # ensemble mean of u_i never exceeds the subset count
    for m in range(1, 8):
        for i in range(1, m + 1):
            assert comb(20, i) * count_fullrank_no_weight1(m, i) <= comb(20, i) * 2 ** (m * i)
