"""Counting ordered integer tuples with bounded product, and the low-set
cardinality check.

X_D(L) counts tuples 1 <= i_1 <= ... <= i_D <= d with product <= L. The
classical recursion over the first coordinate counts *unordered* tuples
(each coordinate free in [1, d]); the ordered count needs a minimum-value
argument. Both are exposed; the free-sum variant matches the textbook
recursion verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .covariance import CovarianceSpec
from .multiindex import MultiIndex, enumerate_multi_indices

BRUTE_FORCE_CAP = 10**7


@dataclass(frozen=True)
class CountQuery:
    tuple_length: int  # D
    threshold: float   # L
    max_value: int     # d

    def __post_init__(self):
        if self.tuple_length < 1:
            raise ValueError("tuple length must be >= 1")
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.max_value < 1:
            raise ValueError("max value must be >= 1")


def count_recursive(q: CountQuery) -> int:
    """Exact ordered-tuple count, memoized on (length, floor(L), min value)."""
    d = q.max_value

    @lru_cache(maxsize=None)
    def rec(length: int, limit: int, lo: int) -> int:
        if length == 0:
            return 1
        total = 0
        for i in range(lo, min(d, limit) + 1):
            total += rec(length - 1, limit // i, i)
        return total

    return rec(q.tuple_length, math.floor(q.threshold), 1)


def count_free_sum(q: CountQuery) -> int:
    """The unconstrained-coordinate recursion X_D(L) = sum_i X_{D-1}(L//i):
    counts all tuples in [1,d]^D with product <= L (order not enforced)."""
    d = q.max_value

    @lru_cache(maxsize=None)
    def rec(length: int, limit: int) -> int:
        if limit < 1:
            return 0
        if length == 1:
            return min(d, limit)
        return sum(rec(length - 1, limit // i) for i in range(1, min(d, limit) + 1))

    return rec(q.tuple_length, math.floor(q.threshold))


def count_bruteforce(q: CountQuery) -> int:
    """Exhaustive enumeration over non-decreasing tuples; the oracle."""
    if q.max_value**q.tuple_length > BRUTE_FORCE_CAP:
        raise RuntimeError(
            f"brute force over {q.max_value}^{q.tuple_length} tuples exceeds cap"
        )
    count = 0
    for tup in combinations_with_replacement(range(1, q.max_value + 1), q.tuple_length):
        prod = 1
        for i in tup:
            prod *= i
            if prod > q.threshold:
                break
        else:
            count += 1
    return count


@dataclass(frozen=True)
class LowSetReport:
    count: int
    low_indices: list[MultiIndex]
    sample_size_bound: float  # n^{1 - delta0'}
    degree_cap: int           # D(kappa)


def degree_cap(kappa: float, alpha: float) -> int:
    """D(kappa) = floor(kappa / (1 - alpha))."""
    if not (0 <= alpha < 1):
        raise ValueError("alpha must lie in [0, 1)")
    return math.floor(kappa / (1.0 - alpha))


def low_set_cardinality(
    cov: CovarianceSpec,
    kappa: float,
    delta0: float,
    trunc_degree: int | None = None,
    delta0_prime: float = 0.05,
) -> LowSetReport:
    """Exact |Low(n)| for n = d^kappa: all beta with |beta| <= D(kappa) whose
    sigma^beta clears d^{-(kappa+delta0)}; thresholds compared in log space.
    """
    alpha = cov.alpha
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    if kappa == math.floor(kappa):
        raise ValueError("kappa must be non-integer (theorem precondition)")
    d_kappa = degree_cap(kappa, alpha)
    if d_kappa * (1.0 - alpha) >= kappa:
        raise ValueError("need D(kappa)*(1-alpha) < kappa")
    max_deg = d_kappa if trunc_degree is None else min(trunc_degree, d_kappa)
    log_sigma = cov.log_sigma()
    threshold = -(kappa + delta0) * math.log(cov.d)
    low = [
        beta
        for beta in enumerate_multi_indices(cov.d, max_deg)
        if sum(e * log_sigma[j - 1] for j, e in beta.entries) > threshold
    ]
    n = cov.d**kappa
    return LowSetReport(
        count=len(low),
        low_indices=low,
        sample_size_bound=n ** (1.0 - delta0_prime),
        degree_cap=d_kappa,
    )
