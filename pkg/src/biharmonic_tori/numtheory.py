"""Sums of two squares: factorization, r2 counts and representations."""
from __future__ import annotations

from typing import NamedTuple

from .exactnum import isqrt

MAX_INPUT = 2**63


class TwoSquareRep(NamedTuple):
    L: int
    M: int
    target: int


def _check_range(n: int) -> None:
    if n >= MAX_INPUT:
        raise ValueError(f"input {n} exceeds the supported range (< 2**63)")


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, primes increasing."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    _check_range(n)
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return factors


def r2(n: int) -> int:
    """Number of ordered signed pairs (L, M) with L**2 + M**2 == n.

    Uses r2(n) = 4 (d1(n) - d3(n)); by convention r2(0) = 1.
    """
    if n < 0:
        return 0
    if n == 0:
        return 1
    count = 4
    for p, e in factorize(n):
        if p % 4 == 1:
            count *= e + 1
        elif p % 4 == 3 and e % 2:
            return 0
    return count


def is_sum_of_two_squares(n: int) -> bool:
    if n < 0:
        return False
    if n == 0:
        return True
    return all(e % 2 == 0 for p, e in factorize(n) if p % 4 == 3)


def two_square_reps(n: int) -> list[TwoSquareRep]:
    """All ordered signed representations, sorted lexicographically."""
    if n < 0:
        return []
    _check_range(n)
    if n and not is_sum_of_two_squares(n):
        return []
    reps = []
    for L in range(isqrt(n) + 1):
        rest = n - L * L
        M = isqrt(rest)
        if M * M != rest:
            continue
        for sl in {L, -L}:
            for sm in {M, -M}:
                reps.append(TwoSquareRep(sl, sm, n))
    reps.sort()
    return reps


def first_quadrant_reps(n: int) -> list[tuple[int, int]]:
    """One representative per rotation orbit {(L,M), (M,-L), (-L,-M), (-M,L)}.

    The representative has L >= 0 and M > 0, so a perfect square n
    contributes (0, sqrt(n)) and never (sqrt(n), 0).  Sorted by L.
    """
    return sorted((L, M) for L, M, _ in two_square_reps(n) if L >= 0 and M > 0)
