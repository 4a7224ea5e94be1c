"""Multi-indices in Z^d_{>=0}: enumeration, combinatorics, helpers.

A multi-index is stored sparsely (coordinate -> positive exponent) since in
the regimes we care about (d up to a few hundred, total degree <= 5) almost
every coordinate carries exponent zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

DEFAULT_ENUMERATION_CAP = 10**7

# Exact integer combinatorics are guaranteed up to this total degree; above
# it we refuse rather than silently return huge numbers the callers never
# asked for.
MAX_EXACT_DEGREE = 20


class EnumerationCapError(RuntimeError):
    """Raised when an enumeration would produce more indices than the cap."""


class DegreeRangeError(ValueError):
    """Raised when |beta| exceeds the guaranteed exact-arithmetic range."""


@dataclass(frozen=True)
class MultiIndex:
    """Sparse multi-index beta in Z^d_{>=0}.

    ``entries`` is a tuple of (coordinate, exponent) pairs with 1-based
    coordinates in ascending order and strictly positive exponents.
    """

    entries: tuple[tuple[int, int], ...]
    dim: int

    def __post_init__(self) -> None:
        prev = 0
        for j, e in self.entries:
            if not (prev < j <= self.dim):
                raise ValueError(f"coordinate {j} out of order or outside [1, {self.dim}]")
            if e < 1:
                raise ValueError(f"exponent {e} at coordinate {j} must be >= 1")
            prev = j

    @staticmethod
    def from_dense(exponents: Iterable[int], dim: int | None = None) -> "MultiIndex":
        exps = list(exponents)
        d = dim if dim is not None else len(exps)
        entries = tuple((j + 1, e) for j, e in enumerate(exps) if e)
        return MultiIndex(entries, d)

    @staticmethod
    def zero(dim: int) -> "MultiIndex":
        return MultiIndex((), dim)

    def degree(self) -> int:
        return sum(e for _, e in self.entries)

    def exponent(self, coordinate: int) -> int:
        for j, e in self.entries:
            if j == coordinate:
                return e
        return 0

    def to_dense(self) -> list[int]:
        out = [0] * self.dim
        for j, e in self.entries:
            out[j - 1] = e
        return out

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        merged: dict[int, int] = dict(self.entries)
        for j, e in other.entries:
            merged[j] = merged.get(j, 0) + e
        return MultiIndex(tuple(sorted(merged.items())), self.dim)

    def __le__(self, other: "MultiIndex") -> bool:
        """Componentwise comparison beta <= gamma."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return all(e <= other.exponent(j) for j, e in self.entries)

    def sort_key(self) -> tuple:
        """Canonical within-degree key: descending lexicographic on the
        dense exponent vector, encoded sparsely."""
        return tuple((j, -e) for j, e in self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return "*".join(f"{j}^{e}" for j, e in self.entries)


def enumeration_size(d: int, max_degree: int) -> int:
    return math.comb(d + max_degree, max_degree)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` positive integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_multi_indices(
    d: int, max_degree: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[MultiIndex]:
    """Every beta with |beta| <= max_degree, grouped by ascending degree.

    Within a degree the order is descending lexicographic on the dense
    exponent vector, e.g. for d=2, degree 2: (2,0), (1,1), (0,2). The
    ordering is deterministic and stable across calls.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    total = enumeration_size(d, max_degree)
    if total > cap:
        raise EnumerationCapError(
            f"enumeration of C({d + max_degree},{max_degree}) = {total} indices "
            f"exceeds cap {cap}"
        )
    out: list[MultiIndex] = [MultiIndex.zero(d)]
    for degree in range(1, max_degree + 1):
        level: list[MultiIndex] = []
        for support_size in range(1, min(degree, d) + 1):
            for coords in combinations(range(1, d + 1), support_size):
                for exps in _compositions(degree, support_size):
                    level.append(MultiIndex(tuple(zip(coords, exps)), d))
        level.sort(key=MultiIndex.sort_key)
        out.extend(level)
    assert len(out) == total
    return out


def _check_degree(beta: MultiIndex) -> None:
    if beta.degree() > MAX_EXACT_DEGREE:
        raise DegreeRangeError(
            f"|beta| = {beta.degree()} exceeds exact range {MAX_EXACT_DEGREE}"
        )


def multinomial(beta: MultiIndex) -> int:
    """|beta|! / (beta_1! ... beta_d!), exact."""
    _check_degree(beta)
    num = math.factorial(beta.degree())
    for _, e in beta.entries:
        num //= math.factorial(e)
    return num


def factorial_product(beta: MultiIndex) -> int:
    """beta! = beta_1! ... beta_d!, exact."""
    _check_degree(beta)
    out = 1
    for _, e in beta.entries:
        out *= math.factorial(e)
    return out
