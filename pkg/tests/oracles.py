"""Independent reference computations used to derive expected values.

Nothing here calls into the code paths it is used to check.
"""

from __future__ import annotations

import itertools
from math import factorial


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_divmod(num, den):
    """Long division of integer coefficient lists (ascending degree).

    Requires the divisor's leading coefficient to divide every leading
    coefficient met along the way; otherwise raises ValueError.
    """
    num = list(num)
    while num and num[-1] == 0:
        num.pop()
    den = list(den)
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError
    quo = [0] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        c, r = divmod(num[-1], lead)
        if r:
            raise ValueError("inexact leading coefficient")
        quo[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        while num and num[-1] == 0:
            num.pop()
    return quo, num


def q_factorial_list(n):
    acc = [1]
    for j in range(1, n + 1):
        acc = poly_mul(acc, [1] * j)
    return acc


def q_binomial_by_division(n, k):
    den = poly_mul(q_factorial_list(k), q_factorial_list(n - k))
    quo, rem = poly_divmod(q_factorial_list(n), den)
    assert rem == [], "q-binomial division left a remainder"
    return quo


def derangements_inclusion_exclusion(n):
    return sum((-1) ** k * factorial(n) // factorial(k) for k in range(n + 1))


def maj_by_scan(p):
    total = 0
    for i, (a, b) in enumerate(zip(p, p[1:]), start=1):
        if a > b:
            total += i
    return total


def maj_distribution(perms):
    counts = {}
    for p in perms:
        m = maj_by_scan(p)
        counts[m] = counts.get(m, 0) + 1
    top = max(counts, default=-1)
    return [counts.get(i, 0) for i in range(top + 1)]


def brute_derangements(n):
    return [p for p in itertools.permutations(range(1, n + 1))
            if all(v != i for i, v in enumerate(p, 1))]


def brute_partitions(length, total):
    return sorted(
        (c for c in itertools.product(range(total + 1), repeat=length)
         if sum(c) == total and all(c[i] >= c[i + 1] for i in range(length - 1))),
        reverse=True,
    )


def brute_standard_preimage(beta, sigma, gamma):
    """All standard (mu, pi) that split into (beta, gamma) with derangement
    part sigma, found by trying every permutation of the right size."""
    n = len(sigma) + len(gamma)
    found = []
    for pi in itertools.permutations(range(1, n + 1)):
        fixed = [i for i in range(1, n + 1) if pi[i - 1] == i]
        if len(fixed) != len(gamma):
            continue
        moved = [i for i in range(1, n + 1) if pi[i - 1] != i]
        vals = [pi[i - 1] for i in moved]
        order = sorted(vals)
        if tuple(order.index(v) + 1 for v in vals) != tuple(sigma):
            continue
        mu = [0] * n
        for pos, part in zip(moved, beta):
            mu[pos - 1] = part
        for pos, part in zip(fixed, gamma):
            mu[pos - 1] = part
        if any(mu[i] < mu[i + 1] for i in range(n - 1)):
            continue
        if any(pi[i] > pi[i + 1] and mu[i] <= mu[i + 1] for i in range(n - 1)):
            continue
        found.append((tuple(mu), pi))
    return found
