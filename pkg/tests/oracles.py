"""
Independent reference implementations the services are compared against.

Written with plain loops over explicit tables so they share no code with
fixcert.services.
"""

from __future__ import annotations

import itertools
from typing import Callable, Optional, Sequence


def coincidences(points: Sequence[int], S: Callable[[int], int], T: Callable[[int], int]) -> list[int]:
    """Double loop: x is a coincidence point when some y equals both Sx and Tx."""
    found = []
    for x in points:
        for y in points:
            if S(x) == y and T(x) == y:
                found.append(x)
                break
    return found


def common_fixed_points(points: Sequence[int], S: Callable[[int], int], T: Callable[[int], int]) -> list[int]:
    return [x for x in points if S(x) == x and T(x) == x]


def ts_sequence(
    points: Sequence[int],
    S: Callable[[int], int],
    T: Callable[[int], int],
    x0: int,
    steps: int,
) -> list[int]:
    """x_{n+1} is the smallest point with S x_{n+1} = T x_n; stops when none exists."""
    xs = [x0]
    for _ in range(steps):
        target = T(xs[-1])
        nxt: Optional[int] = next((p for p in points if S(p) == target), None)
        if nxt is None:
            break
        xs.append(nxt)
    return xs


def envelope_violations(gaps: Sequence[float], phi: Callable[[float], float], tol: float = 1e-9) -> list[int]:
    """
    Indices n where gap n exceeds phi(gap n-1) or the n-fold iterate
    phi(phi(...phi(gap 0))) by more than tol.
    """
    bad = []
    bound = gaps[0] if gaps else 0.0
    for n in range(1, len(gaps)):
        bound = phi(bound)
        if gaps[n] > phi(gaps[n - 1]) + tol or gaps[n] > bound + tol:
            bad.append(n)
    return bad


def regular(
    points: Sequence[int],
    S: Callable[[int], int],
    leq: Callable[[int, int], bool],
    kind: str,
    max_length: int,
) -> bool:
    """
    Regularity straight from its definition, over every eventually constant
    sequence S x_1, ..., S x_m, S x_m, ... with m <= max_length.

    An increasing (decreasing for D) sequence converges to its last term y.
    Infinitely many terms must be comparable with y, and y <= S y
    (y >= S y for D). M asks for both.
    """
    def down(a: int, b: int) -> bool:
        return leq(b, a)

    steps = {"I": [leq], "D": [down], "M": [leq, down]}[kind.upper()]
    for length in range(1, max_length + 1):
        for xs in itertools.product(points, repeat=length):
            terms = [S(x) for x in xs]
            for step in steps:
                if not all(step(a, b) for a, b in zip(terms, terms[1:])):
                    continue
                limit = terms[-1]
                # the constant tail is the only infinite part of the sequence
                tail_comparable = leq(limit, limit)
                if not tail_comparable or not step(limit, S(limit)):
                    return False
    return True
