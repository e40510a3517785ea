"""Labeled partitions and the bijections between them.

* :func:`psi` / :func:`psi_inv` -- partitions with at most n parts versus
  standard labeled partitions with a fixed label, shifting weight by maj.
* :func:`sort_columns` / :func:`sort_columns_inv` -- sequences of
  nonnegative integers versus standard labeled partitions.
* :func:`phi_decompose` / :func:`phi_insert` -- a standard labeled partition
  split along the fixed points of its label, and the inverse that rebuilds
  it by inserting fixed points one part at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .combinat import (
    Partition,
    Permutation,
    as_partition,
    as_permutation,
    derangement_points,
    dp_reduce,
    fixed_points,
    insert_fixed_point,
    is_derangement,
    suffix_descent_counts,
)
from .errors import MalformedInputError, NotStandardError, PreconditionError


@dataclass(frozen=True)
class LabeledPartition:
    """A partition ``mu`` paired with a permutation ``pi`` of the same length.

    Standardness is a predicate (:meth:`is_standard`), not a construction
    invariant.
    """

    mu: Partition
    pi: Permutation

    def __post_init__(self):
        mu = as_partition(self.mu)
        pi = as_permutation(self.pi)
        if len(mu) != len(pi):
            raise MalformedInputError(
                f"mu has {len(mu)} parts but pi has size {len(pi)}"
            )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def _trusted(cls, mu: Partition, pi: Permutation) -> LabeledPartition:
        # values already produced and checked by this module
        obj = object.__new__(cls)
        object.__setattr__(obj, "mu", mu)
        object.__setattr__(obj, "pi", pi)
        return obj

    @property
    def n(self) -> int:
        return len(self.pi)

    @property
    def weight(self) -> int:
        return sum(self.mu)

    def is_standard(self) -> bool:
        return first_violation(self.mu, self.pi) is None

    def to_dict(self) -> dict:
        return {"mu": list(self.mu), "pi": list(self.pi)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def render(self) -> str:
        return render_two_row(self.mu, self.pi)

    @classmethod
    def from_dict(cls, data: dict) -> LabeledPartition:
        try:
            return cls(tuple(data["mu"]), tuple(data["pi"]))
        except (KeyError, TypeError):
            raise MalformedInputError('expected {"mu": [...], "pi": [...]}') from None


@dataclass(frozen=True)
class Decomposition:
    beta: Partition
    gamma: Partition
    sigma: Permutation

    def __post_init__(self):
        beta = as_partition(self.beta)
        gamma = as_partition(self.gamma)
        sigma = as_permutation(self.sigma)
        if len(beta) != len(sigma):
            raise MalformedInputError(
                f"beta has {len(beta)} parts but sigma has size {len(sigma)}"
            )
        if not is_derangement(sigma):
            raise PreconditionError(f"sigma={sigma} is not a derangement")
        require_standard(beta, sigma, what="(beta, sigma)")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sigma", sigma)

    def to_dict(self) -> dict:
        return {"beta": list(self.beta), "gamma": list(self.gamma), "sigma": list(self.sigma)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> Decomposition:
        try:
            return cls(tuple(data["beta"]), tuple(data["gamma"]), tuple(data["sigma"]))
        except (KeyError, TypeError):
            raise MalformedInputError(
                'expected {"beta": [...], "gamma": [...], "sigma": [...]}'
            ) from None


def render_two_row(top: Sequence[int], bottom: Sequence[int]) -> str:
    """Two aligned rows, parts above labels.

    >>> print(render_two_row((8, 10), (2, 1)))
    ( 8 10 )
    ( 2  1 )
    """
    width = max((len(str(v)) for v in (*top, *bottom)), default=1)
    row = lambda vals: "( " + " ".join(str(v).rjust(width) for v in vals) + " )"
    return row(top) + "\n" + row(bottom)


def first_violation(mu: Sequence[int], pi: Sequence[int]) -> int | None:
    """1-indexed ``i`` of the first pair with ``pi_i > pi_{i+1}`` but ``mu_i <= mu_{i+1}``."""
    for i in range(len(pi) - 1):
        if pi[i] > pi[i + 1] and mu[i] <= mu[i + 1]:
            return i + 1
    return None


def require_standard(mu: Sequence[int], pi: Sequence[int], what: str = "labeled partition") -> None:
    i = first_violation(mu, pi)
    if i is not None:
        raise NotStandardError(
            f"{what} is not standard at positions ({i},{i + 1}): "
            f"pi={pi[i - 1]}>{pi[i]} but mu={mu[i - 1]},{mu[i]}",
            position=i,
        )


def is_standard(lp: LabeledPartition) -> bool:
    return lp.is_standard()


# -- psi --------------------------------------------------------------------


def psi(lam: Sequence[int], pi: Sequence[int]) -> LabeledPartition:
    """Add the suffix descent counts of ``pi`` to ``lam`` partwise."""
    lam = as_partition(lam)
    pi = as_permutation(pi)
    if len(lam) != len(pi):
        raise MalformedInputError(f"lambda has {len(lam)} parts but pi has size {len(pi)}")
    phi = suffix_descent_counts(pi)
    return LabeledPartition._trusted(tuple(a + b for a, b in zip(lam, phi)), pi)


def psi_inv(lp: LabeledPartition) -> Partition:
    require_standard(lp.mu, lp.pi)
    phi = suffix_descent_counts(lp.pi)
    return tuple(a - b for a, b in zip(lp.mu, phi))


# -- column sorting -----------------------------------------------------------


def sort_columns(a: Sequence[int]) -> LabeledPartition:
    """Reorder the columns of ``(a_1 ... a_n / 1 ... n)`` into the unique
    standard labeled partition: parts descending, labels ascending on ties.

    >>> sort_columns((3, 6, 8, 3, 1, 3, 6, 4, 8)).pi
    (3, 9, 2, 7, 8, 1, 4, 6, 5)
    """
    a = tuple(a)
    for v in a:
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise MalformedInputError(f"sequence entry {v!r} is not a nonnegative integer")
    order = sorted(range(1, len(a) + 1), key=lambda i: (-a[i - 1], i))
    return LabeledPartition._trusted(tuple(a[i - 1] for i in order), tuple(order))


def sort_columns_inv(lp: LabeledPartition) -> tuple[int, ...]:
    require_standard(lp.mu, lp.pi)
    a = [0] * lp.n
    for part, label in zip(lp.mu, lp.pi):
        a[label - 1] = part
    return tuple(a)


# -- phi / phi' ---------------------------------------------------------------


def phi_decompose(lp: LabeledPartition) -> Decomposition:
    require_standard(lp.mu, lp.pi)
    beta = tuple(lp.mu[j - 1] for j in derangement_points(lp.pi))
    gamma = tuple(lp.mu[i - 1] for i in fixed_points(lp.pi))
    return Decomposition(beta, gamma, dp_reduce(lp.pi))


@dataclass(frozen=True)
class InsertionStep:
    """One fixed-point insertion: the part inserted, the equal run ``r..t``
    it joins in the new partition, every position satisfying the
    fixed-point condition, the chosen ``s``, and the resulting state."""

    part: int
    r: int
    t: int
    candidates: tuple[int, ...]
    s: int
    mu: Partition
    pi: Permutation


@dataclass
class InsertionTrace:
    steps: list[InsertionStep] = field(default_factory=list)


def fixed_point_candidates(pi: Sequence[int], r: int, t: int) -> tuple[int, ...]:
    """Positions ``s`` in ``[r, t]`` with ``pi_{s-1} < s <= pi_s``, reading
    ``pi_{r-1}`` as -inf and ``pi_t`` as +inf (``pi`` is the label row before
    insertion, 1-indexed)."""
    out = []
    for s in range(r, t + 1):
        left_ok = s == r or pi[s - 2] < s
        right_ok = s == t or s <= pi[s - 1]
        if left_ok and right_ok:
            out.append(s)
    return tuple(out)


def phi_insert(
    beta: Sequence[int],
    sigma: Sequence[int],
    gamma: Sequence[int],
    *,
    trace: InsertionTrace | None = None,
) -> LabeledPartition:
    """Rebuild the standard labeled partition that decomposes to
    ``(beta, gamma, sigma)``.

    Parts of ``gamma`` are inserted in the given (weakly decreasing) order.
    Each one goes to the start ``r`` of its equal run ``r..t`` in the
    partition; a fixed point ``s`` is then inserted into the label row so
    that the labels over that run stay increasing.  When the run already
    holds fixed points with the same part, several ``s`` qualify; they all
    produce the same permutation and the smallest is taken.
    """
    dec = Decomposition(beta, gamma, sigma)
    mu = list(dec.beta)
    pi: Permutation = dec.sigma
    for g in dec.gamma:
        r = 1 + sum(1 for v in mu if v > g)
        t = r + sum(1 for v in mu if v == g)
        mu.insert(r - 1, g)
        if r == t:
            cands: tuple[int, ...] = (r,)
        else:
            cands = fixed_point_candidates(pi, r, t)
        if not cands:
            raise AssertionError(f"no valid fixed point in run {r}..{t} of {pi}")
        s = cands[0]
        new_pi = insert_fixed_point(pi, s)
        for other in cands[1:]:
            if insert_fixed_point(pi, other) != new_pi:
                raise AssertionError(
                    f"candidates {cands} in run {r}..{t} of {pi} give different labels"
                )
        pi = new_pi
        require_standard(mu, pi, what=f"intermediate state after inserting {g}")
        if trace is not None:
            trace.steps.append(InsertionStep(g, r, t, cands, s, tuple(mu), pi))
    return LabeledPartition._trusted(tuple(mu), pi)
