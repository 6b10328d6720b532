"""Exact counts of full-rank binary matrices (big integers throughout)."""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial


@lru_cache(maxsize=None)
def _stirling_row(x: int) -> tuple[int, ...]:
    if x == 0:
        return (1,)
    prev = _stirling_row(x - 1) + (0,)
    return tuple((y * prev[y] if y else 0) + (prev[y - 1] if y else 0) for y in range(x + 1))


def stirling2(x: int, y: int) -> int:
    """Stirling number of the second kind ``S(x, y)``."""
    if x < 0 or y < 0:
        raise ValueError("arguments must be non-negative")
    if y > x:
        return 0
    return _stirling_row(x)[y]


def _falling_pow2(p: int, count: int) -> int:
    out = 1
    for t in range(count):
        out *= (1 << p) - (1 << t)
        if out == 0:
            break
    return out


def count_fullrank(m: int, i: int) -> int:
    """``M(m, i)``: full-rank ``m x i`` binary matrices."""
    if m < i or i < 0:
        raise ValueError("need m >= i >= 0")
    return _falling_pow2(m, i)


@lru_cache(maxsize=None)
def count_fullrank_no_weight1(m: int, i: int) -> int:
    """``N(m, i)``: full-rank ``m x i`` binary matrices without weight-1 rows.

    Inclusion-exclusion over the set of columns forced to own a unit row
    (``k`` of them) and over the rows left free (``p`` of them).
    """
    if m < i or i < 0:
        raise ValueError("need m >= i >= 0")
    total = 0
    for k in range(i + 1):
        inner = 0
        for p in range(m + 1):
            s = stirling2(m - p, k)
            if s == 0:
                continue
            prod = _falling_pow2(p, i - k)
            if prod == 0:
                continue
            term = comb(m, p) * (1 << (k * p)) * s * prod
            inner += -term if (m - p) & 1 else term
        total += comb(i, k) * factorial(k) * inner
    return total
