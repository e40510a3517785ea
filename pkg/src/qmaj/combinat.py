"""Permutations and partitions, their statistics, and streaming iterators.

Permutations are tuples in one-line notation on ``{1, ..., n}``; positions
are 1-indexed in every public function, so ``descent_set((2, 1))`` is
``{1}``.  Partitions are weakly decreasing tuples of nonnegative integers
whose length is significant: ``(2, 1)`` and ``(2, 1, 0)`` are different
partitions ("at most 2 parts" versus "at most 3 parts").
"""

from __future__ import annotations

import itertools
import json
import os
from collections import Counter
from typing import Iterator, Sequence

from .errors import GuardExceededError, MalformedInputError

Permutation = tuple[int, ...]
Partition = tuple[int, ...]

DEFAULT_GUARD = 12
GUARD_ENV = "QMAJ_MAX_N"


def resolve_guard(guard: int | None = None) -> int:
    """Explicit guard, else ``$QMAJ_MAX_N``, else 12."""
    if guard is None:
        env = os.environ.get(GUARD_ENV)
        if env is None:
            return DEFAULT_GUARD
        try:
            guard = int(env)
        except ValueError:
            raise MalformedInputError(f"{GUARD_ENV}={env!r} is not an integer") from None
    if guard < 0:
        raise MalformedInputError(f"enumeration guard must be >= 0, got {guard}")
    return guard


def check_guard(n: int, guard: int | None = None) -> None:
    if n < 0:
        raise MalformedInputError(f"n must be nonnegative, got {n}")
    limit = resolve_guard(guard)
    if n > limit:
        raise GuardExceededError(f"n={n} exceeds the enumeration guard ({limit})")


# -- validation and parsing ---------------------------------------------------


def as_permutation(values: Sequence[int]) -> Permutation:
    """Validate ``values`` as a permutation of ``1..n`` and return it as a tuple.

    The error message names the duplicated and missing values.
    """
    p = tuple(values)
    n = len(p)
    if all(type(v) is int for v in p) and sorted(p) == list(range(1, n + 1)):
        return p
    for v in p:
        if isinstance(v, bool) or not isinstance(v, int):
            raise MalformedInputError(f"permutation entry {v!r} is not an integer")
    counts = Counter(p)
    dup = sorted(v for v, c in counts.items() if c > 1)
    missing = [v for v in range(1, n + 1) if v not in counts]
    foreign = sorted(v for v in counts if not 1 <= v <= n)
    if dup or missing or foreign:
        parts = []
        if dup:
            parts.append(f"duplicate {dup}")
        if missing:
            parts.append(f"missing {missing}")
        if foreign:
            parts.append(f"out of range {foreign}")
        raise MalformedInputError(
            f"{p} is not a permutation of 1..{n}: " + ", ".join(parts)
        )
    return p


def as_partition(parts: Sequence[int]) -> Partition:
    lam = tuple(parts)
    if (
        all(type(v) is int for v in lam)
        and (not lam or lam[-1] >= 0)
        and all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))
    ):
        return lam
    for i, v in enumerate(lam):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise MalformedInputError(f"part {i + 1} of {lam} is not a nonnegative integer")
    for i in range(len(lam) - 1):
        if lam[i] < lam[i + 1]:
            raise MalformedInputError(
                f"{lam} is not weakly decreasing at positions {i + 1},{i + 2}"
            )
    return lam


def parse_int_sequence(text: str) -> tuple[int, ...]:
    """Accept ``(3,1,2)``, ``3,1,2`` or the JSON array ``[3, 1, 2]``."""
    s = text.strip()
    if s.startswith("["):
        try:
            data = json.loads(s)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"bad JSON array {text!r}: {exc}") from None
        if not isinstance(data, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in data
        ):
            raise MalformedInputError(f"{text!r} is not an array of integers")
        return tuple(data)
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.strip()
    if not s:
        return ()
    try:
        return tuple(int(tok) for tok in s.split(","))
    except ValueError:
        raise MalformedInputError(f"cannot parse {text!r} as a sequence of integers") from None


def format_sequence(seq: Sequence[int]) -> str:
    """``(3,1,2)``; the empty sequence is ``()``."""
    return "(" + ",".join(str(v) for v in seq) + ")"


# -- statistics ---------------------------------------------------------------


def descent_set(p: Sequence[int]) -> set[int]:
    return {i for i in range(1, len(p)) if p[i - 1] > p[i]}


def major_index(p: Sequence[int]) -> int:
    return sum(i for i in range(1, len(p)) if p[i - 1] > p[i])


def fixed_points(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, v in enumerate(p, 1) if v == i)


def derangement_points(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, v in enumerate(p, 1) if v != i)


def is_derangement(p: Sequence[int]) -> bool:
    return all(v != i for i, v in enumerate(p, 1))


def dp_reduce(p: Sequence[int]) -> Permutation:
    """Derangement part: order-isomorphic reduction of the values at the
    derangement points.

    >>> dp_reduce((1, 5, 3, 7, 6, 2, 9, 8, 4))
    (3, 5, 4, 1, 6, 2)
    """
    vals = [v for i, v in enumerate(p, 1) if v != i]
    rank = {v: r for r, v in enumerate(sorted(vals), 1)}
    return tuple(rank[v] for v in vals)


def insert_fixed_point(p: Sequence[int], j: int) -> Permutation:
    """Shift values ``>= j`` up by one and put ``j`` at position ``j``.

    >>> insert_fixed_point((3, 1, 5, 2, 4), 2)
    (4, 2, 1, 6, 3, 5)
    """
    k = len(p)
    if not 1 <= j <= k + 1:
        raise MalformedInputError(f"insertion point {j} outside 1..{k + 1}")
    shifted = [v + 1 if v >= j else v for v in p]
    shifted.insert(j - 1, j)
    return tuple(shifted)


def suffix_descent_counts(p: Sequence[int]) -> tuple[int, ...]:
    """``out[i-1]`` = number of descents of ``p_i p_{i+1} ... p_n``."""
    n = len(p)
    out = [0] * n
    acc = 0
    for i in range(n - 2, -1, -1):
        if p[i] > p[i + 1]:
            acc += 1
        out[i] = acc
    return tuple(out)


# -- iterators ----------------------------------------------------------------


def iter_permutations(n: int, *, guard: int | None = None) -> Iterator[Permutation]:
    """All of S_n in lexicographic order.  The guard is checked eagerly."""
    check_guard(n, guard)
    return itertools.permutations(range(1, n + 1))


def iter_permutations_with_prefix(n: int, prefix: Sequence[int]) -> Iterator[Permutation]:
    """The lexicographic block of S_n whose entries start with ``prefix``."""
    head = tuple(prefix)
    rest = [v for v in range(1, n + 1) if v not in head]
    for tail in itertools.permutations(rest):
        yield head + tail


def iter_derangements(n: int, *, guard: int | None = None) -> Iterator[Permutation]:
    """D_n in lexicographic order, by backtracking with ``p_i != i``."""
    check_guard(n, guard)
    return _derangements(n, ())


def _derangements(n: int, head: Permutation) -> Iterator[Permutation]:
    used = [False] * (n + 1)
    for v in head:
        used[v] = True
    current = list(head)

    def extend(pos: int) -> Iterator[Permutation]:
        if pos > n:
            yield tuple(current)
            return
        for v in range(1, n + 1):
            if not used[v] and v != pos:
                used[v] = True
                current.append(v)
                yield from extend(pos + 1)
                current.pop()
                used[v] = False

    return extend(len(head) + 1)


def iter_partitions_with_sum(max_parts: int, total: int) -> Iterator[Partition]:
    """Weakly decreasing length-``max_parts`` tuples of nonnegative ints
    summing to ``total``, in reverse lexicographic order.

    >>> list(iter_partitions_with_sum(3, 4))
    [(4, 0, 0), (3, 1, 0), (2, 2, 0), (2, 1, 1)]
    """
    if max_parts < 0 or total < 0:
        raise MalformedInputError("max_parts and total must be nonnegative")

    def rec(slots: int, remaining: int, cap: int) -> Iterator[tuple[int, ...]]:
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        # largest-first; the remaining slots can absorb at most slots*part
        for part in range(min(cap, remaining), -1, -1):
            if part * slots < remaining:
                break
            for tail in rec(slots - 1, remaining - part, part):
                yield (part,) + tail

    return rec(max_parts, total, total)


def iter_compositions(length: int, total: int) -> Iterator[tuple[int, ...]]:
    """All sequences in Z_{>=0}^length summing to ``total``."""
    if length < 0 or total < 0:
        raise MalformedInputError("length and total must be nonnegative")
    if length == 0:
        if total == 0:
            yield ()
        return
    if length == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for tail in iter_compositions(length - 1, total - first):
            yield (first,) + tail
