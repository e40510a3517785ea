"""Dense polynomials in q with exact integer coefficients.

A polynomial is stored as a tuple of coefficients in ascending degree,
``(1, 1, 2, 1, 1)`` being ``1 + q + 2q^2 + q^3 + q^4``.  Trailing zeros are
stripped, so the zero polynomial is the empty tuple.

Coefficients are kept inside the signed 64-bit range; any operation whose
result would leave it raises :class:`CoefficientOverflowError` instead of
wrapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import CoefficientOverflowError, MalformedInputError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def _normalize(coeffs: Sequence[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _checked(coeffs: Sequence[int]) -> tuple[int, ...]:
    for i, c in enumerate(coeffs):
        if not INT64_MIN <= c <= INT64_MAX:
            raise CoefficientOverflowError(
                f"coefficient of q^{i} is {c}, outside the signed 64-bit range"
            )
    return _normalize(coeffs)


@dataclass(frozen=True)
class QPoly:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise MalformedInputError(f"coefficient {c!r} is not an integer")
        object.__setattr__(self, "coeffs", _checked(coeffs))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> QPoly:
        if power < 0:
            raise ValueError("negative power")
        return cls((0,) * power + (coeff,))

    @classmethod
    def from_json(cls, text: str) -> QPoly:
        data = json.loads(text)
        if not isinstance(data, list):
            raise MalformedInputError("polynomial JSON must be an array of integers")
        return cls(tuple(data))

    @property
    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> int:
        """Coefficient of q^i; zero beyond the degree."""
        if i < 0:
            raise IndexError(i)
        return self.coeffs[i] if i < len(self.coeffs) else 0

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> QPoly:
        return QPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(other, -self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def shift(self, k: int) -> QPoly:
        """Multiply by q^k."""
        if not self.coeffs:
            return self
        return QPoly((0,) * k + self.coeffs)

    def evaluate(self, q: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    def __str__(self) -> str:
        return format_poly(self)


def _coerce(x) -> QPoly:
    if isinstance(x, QPoly):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return QPoly((x,))
    return NotImplemented


ZERO = QPoly(())
ONE = QPoly((1,))


def poly_add(a: QPoly, b: QPoly) -> QPoly:
    x, y = a.coeffs, b.coeffs
    if len(x) < len(y):
        x, y = y, x
    out = list(x)
    for i, c in enumerate(y):
        out[i] += c
    return QPoly(tuple(out))


def poly_mul(a: QPoly, b: QPoly) -> QPoly:
    x, y = a.coeffs, b.coeffs
    if not x or not y:
        return ZERO
    out = [0] * (len(x) + len(y) - 1)
    for i, ci in enumerate(x):
        if ci:
            for j, cj in enumerate(y):
                out[i + j] += ci * cj
    return QPoly(tuple(out))


def poly_sum(polys: Iterable[QPoly]) -> QPoly:
    acc = ZERO
    for p in polys:
        acc = poly_add(acc, p)
    return acc


def format_poly(p: QPoly) -> str:
    """Human-readable form, e.g. ``1 + q + 2q^2``.

    >>> format_poly(QPoly((1, -1, 0, 3)))
    '1 - q + 3q^3'
    >>> format_poly(QPoly(()))
    '0'
    """
    terms = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            var = "q" if i == 1 else f"q^{i}"
            body = var if mag == 1 else f"{mag}{var}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _check_nonneg(name: str, n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise MalformedInputError(f"{name} must be a nonnegative integer, got {n!r}")


def q_int(n: int) -> QPoly:
    """``[n] = 1 + q + ... + q^(n-1)``; ``[0] = 0``."""
    _check_nonneg("n", n)
    return QPoly((1,) * n)


def q_factorial(n: int) -> QPoly:
    """``[n]! = [1][2]...[n]``."""
    _check_nonneg("n", n)
    acc = ONE
    for j in range(2, n + 1):
        acc = acc * q_int(j)
    return acc


def _next_pascal_row(row: list[QPoly]) -> list[QPoly]:
    m = len(row)
    new = [ONE] * (m + 1)
    for j in range(1, m):
        new[j] = row[j - 1] + row[j].shift(j)
    return new


def q_binomial(n: int, k: int) -> QPoly:
    """Gaussian binomial coefficient, zero outside ``0 <= k <= n``.

    Built row by row from ``[n, k] = [n-1, k-1] + q^k [n-1, k]``; no
    polynomial division is involved.
    """
    _check_nonneg("n", n)
    if k < 0 or k > n:
        return ZERO
    row = [ONE]
    for _ in range(n):
        row = _next_pascal_row(row)
    return row[k]


def q_derangement_formula(n: int) -> QPoly:
    """``d_n(q)`` as the alternating sum ``sum_k (-1)^k q^C(k,2) [n]!/[k]!``.

    ``[n]!/[k]!`` is taken as the partial product ``[k+1]...[n]``, built
    downward from ``k = n`` so each summand costs one multiplication.
    """
    _check_nonneg("n", n)
    total = ZERO
    tail = ONE
    for k in range(n, -1, -1):
        term = tail.shift(comb(k, 2))
        total = total - term if k % 2 else total + term
        if k:
            tail = tail * q_int(k)
    return total


def q_derangement_recurrence(n: int) -> QPoly:
    """``d_n(q)`` from ``[n]! = sum_k [n, k] d_k(q)``, solved for the top term."""
    _check_nonneg("n", n)
    d: list[QPoly] = []
    row = [ONE]
    fact = ONE
    for m in range(n + 1):
        if m:
            row = _next_pascal_row(row)
            fact = fact * q_int(m)
        acc = fact
        for k in range(m):
            acc = acc - row[k] * d[k]
        d.append(acc)
    return d[n]


def q_derangement_bruteforce(n: int, *, guard: int | None = None) -> QPoly:
    """``d_n(q)`` by summing ``q^maj`` over every derangement of size n."""
    from .combinat import iter_derangements, major_index

    _check_nonneg("n", n)
    counts = [0] * (comb(n, 2) + 1)
    for p in iter_derangements(n, guard=guard):
        counts[major_index(p)] += 1
    return QPoly(tuple(counts))

