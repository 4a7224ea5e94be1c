"""Theoretical kernel spectra on power-law Gaussian data.

Eigenvalues come from closed-form rules, never from diagonalizing large
matrices:

* Hermite kernel:    lambda_beta = xi_{|beta|} * multinom(beta) * sigma^beta
* polynomial kernel: lambda_beta = h_{|beta|} * |beta|! * sigma^beta
  (the exact-value rule from the change-of-basis derivation; its agreement
  with eig(M) is checked empirically by the basis-module oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .covariance import CovarianceSpec, r0
from .multiindex import (
    MultiIndex,
    enumerate_multi_indices,
    enumeration_size,
    multinomial,
)

KernelKind = str  # "monomial" | "polynomial" | "truncated-analytic" | "hermite"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel identified by its level coefficients and truncation degree.

    For inner-product kernels ``coeffs[k]`` is the Taylor coefficient h_k;
    for the Hermite kernel it is the level weight xi_k (level-symmetric
    xi_beta = xi_{|beta|}).
    """

    kind: KernelKind
    coeffs: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("monomial", "polynomial", "truncated-analytic", "hermite"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if any(c < 0 for c in self.coeffs):
            raise ValueError("kernel coefficients must be >= 0")

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def monomial(degree: int, coeff: float = 1.0) -> "KernelSpec":
        c = [0.0] * (degree + 1)
        c[degree] = coeff
        return KernelSpec("monomial", tuple(c), name=f"<x,x'>^{degree}")

    @staticmethod
    def polynomial(coeffs: Sequence[float]) -> "KernelSpec":
        return KernelSpec("polynomial", tuple(float(c) for c in coeffs))

    @staticmethod
    def exp_truncated(degree: int) -> "KernelSpec":
        c = tuple(1.0 / math.factorial(k) for k in range(degree + 1))
        return KernelSpec("truncated-analytic", c, name=f"exp trunc {degree}")

    @staticmethod
    def hermite(xi: Sequence[float]) -> "KernelSpec":
        return KernelSpec("hermite", tuple(float(x) for x in xi))


@dataclass(frozen=True)
class SpectrumEntry:
    beta: MultiIndex
    lam: float
    degree: int


def _log_sigma_beta(beta: MultiIndex, log_sigma: np.ndarray) -> float:
    return sum(e * log_sigma[j - 1] for j, e in beta.entries)


def hermite_eigenvalue(beta: MultiIndex, xi, cov: CovarianceSpec) -> float:
    """xi_{|beta|} * multinom(beta) * sigma^beta."""
    x = float(xi[beta.degree()])
    if x == 0.0:
        return 0.0
    return x * multinomial(beta) * math.exp(_log_sigma_beta(beta, cov.log_sigma()))


def monomial_eigenvalue(beta: MultiIndex, h, cov: CovarianceSpec) -> float:
    """h_{|beta|} * |beta|! * sigma^beta."""
    c = float(h[beta.degree()])
    if c == 0.0:
        return 0.0
    return (
        c
        * math.factorial(beta.degree())
        * math.exp(_log_sigma_beta(beta, cov.log_sigma()))
    )


def eigenvalue_rule(spec: KernelSpec) -> Callable[[MultiIndex, CovarianceSpec], float]:
    if spec.kind == "hermite":
        return lambda beta, cov: hermite_eigenvalue(beta, spec.coeffs, cov)
    return lambda beta, cov: monomial_eigenvalue(beta, spec.coeffs, cov)


def full_spectrum(spec: KernelSpec, cov: CovarianceSpec) -> list[SpectrumEntry]:
    """All C(d+D,D) entries, eigenvalue-descending, canonical tie-break."""
    indices = enumerate_multi_indices(cov.d, spec.max_degree)
    log_sigma = cov.log_sigma()
    entries = []
    for i, beta in enumerate(indices):
        k = beta.degree()
        c = spec.coeffs[k]
        if c == 0.0:
            lam = 0.0
        else:
            scale = multinomial(beta) if spec.kind == "hermite" else math.factorial(k)
            lam = c * scale * math.exp(_log_sigma_beta(beta, log_sigma))
        entries.append((lam, i, beta, k))
    entries.sort(key=lambda t: (-t[0], t[1]))
    return [SpectrumEntry(beta=b, lam=lam, degree=k) for lam, _, b, k in entries]


def counting_M(spec: KernelSpec, cov: CovarianceSpec, eps: float) -> int:
    """|{lambda : lambda >= eps}| over the enumerated spectrum."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    return sum(1 for e in full_spectrum(spec, cov) if e.lam >= eps)


@dataclass(frozen=True)
class SpectralGap:
    level: int
    gap_predicted: bool            # finite-d inequality r0 > d^(alpha*level)
    gap_predicted_asymptotic: bool  # alpha <= 1/(level+1)
    empirical_ratio: float          # min(level) / max(level+1)


def spectral_gaps(alpha: float, d: int, max_degree: int) -> list[SpectralGap]:
    """Per-level gap predictions for the all-ones polynomial kernel of the
    given degree, with the empirically computed min/max level ratios."""
    from .covariance import build

    cov = build(d, alpha)
    spec = KernelSpec.polynomial([1.0] * (max_degree + 1))
    spectrum = full_spectrum(spec, cov)
    level_min: dict[int, float] = {}
    level_max: dict[int, float] = {}
    for e in spectrum:
        level_min[e.degree] = min(level_min.get(e.degree, math.inf), e.lam)
        level_max[e.degree] = max(level_max.get(e.degree, 0.0), e.lam)
    r = r0(cov)
    out = []
    for level in range(max_degree):
        predicted = r > d ** (alpha * level)
        asymptotic = alpha <= 1.0 / (level + 1)
        ratio = level_min[level] / level_max[level + 1]
        out.append(
            SpectralGap(
                level=level,
                gap_predicted=bool(predicted),
                gap_predicted_asymptotic=bool(asymptotic),
                empirical_ratio=float(ratio),
            )
        )
    return out


@dataclass(frozen=True)
class OrderPrediction:
    rank: int                 # 1-based rank m
    sector: str               # "gap" or "continuous"
    level: int                # degree level j of the predicted eigenvalue
    boundary: int             # rank offset the power law restarts from
    prediction: float         # (m - boundary)^(-alpha) / r0^level, up to constants


def sector_boundaries(spec: KernelSpec, cov: CovarianceSpec) -> list[tuple[int, int, str]]:
    """Partition of ranks [1, C(d+D,D)] into (start_rank, end_rank, sector)
    level blocks: cumulative level counts in the gap region, threshold
    counts d^{-(j+1)} in the continuous region."""
    d, D = cov.d, spec.max_degree
    alpha = cov.alpha
    r = r0(cov)
    total = enumeration_size(d, D)
    # deepest level still separated by a gap at this finite d
    gap_levels = 0
    while gap_levels < D and r > d ** (alpha * gap_levels):
        gap_levels += 1
    blocks: list[tuple[int, int, str]] = []
    start = 1
    for j in range(gap_levels):
        end = enumeration_size(d, j)  # indices of degree <= j
        blocks.append((start, end, "gap"))
        start = end + 1
    if start <= total:
        spectrum = full_spectrum(spec, cov)
        lams = np.array([e.lam for e in spectrum])
        for j in range(gap_levels, D + 1):
            if j == D:
                end = total
            else:
                end = int(np.sum(lams >= d ** -(j + 1.0)))
                end = max(end, start - 1)
            if end >= start:
                blocks.append((start, min(end, total), "continuous"))
                start = min(end, total) + 1
            if start > total:
                break
        if start <= total:
            blocks.append((start, total, "continuous"))
    return blocks


def predicted_order(spec: KernelSpec, cov: CovarianceSpec, m: int) -> OrderPrediction:
    """Shape-only prediction for the m-th eigenvalue: a power-law restart
    (m - boundary)^(-alpha) damped by r0 per level. Constants and polylog
    factors are not modeled; use for slope and sector-structure fits only."""
    total = enumeration_size(cov.d, spec.max_degree)
    if not (1 <= m <= total):
        raise ValueError(f"rank {m} outside [1, {total}]")
    blocks = sector_boundaries(spec, cov)
    for level, (start, end, sector) in enumerate(blocks):
        if start <= m <= end:
            boundary = start - 1
            m_plus = m - boundary
            pred = m_plus ** (-cov.alpha) / r0(cov) ** level
            return OrderPrediction(
                rank=m, sector=sector, level=level, boundary=boundary, prediction=pred
            )
    raise AssertionError("sector blocks failed to cover the rank range")


def predicted_orders(spec: KernelSpec, cov: CovarianceSpec) -> list[OrderPrediction]:
    """predicted_order for every rank, computing the sector blocks once."""
    blocks = sector_boundaries(spec, cov)
    r = r0(cov)
    out: list[OrderPrediction] = []
    for level, (start, end, sector) in enumerate(blocks):
        boundary = start - 1
        for m in range(start, end + 1):
            pred = (m - boundary) ** (-cov.alpha) / r**level
            out.append(OrderPrediction(rank=m, sector=sector, level=level,
                                       boundary=boundary, prediction=pred))
    return out


def truncation_hs_error(
    h_coeff: Callable[[int], float],
    trunc_degree: int,
    cov: CovarianceSpec,
    mc_samples: int = 10**5,
    seed: int = 0,
    max_tail_terms: int = 200,
) -> tuple[float, float]:
    """Monte-Carlo estimate of ||k^{>D}||_HS for k = sum_k h_k <x,x'>^k.

    Returns (estimate, standard error). The tail sum_{k>D} h_k t^k is
    evaluated by direct summation at each sampled inner product; a
    non-finite accumulation raises.
    """
    rng = np.random.default_rng(seed)
    sqrt_sigma = np.sqrt(cov.sigma)
    x = rng.standard_normal((mc_samples, cov.d)) * sqrt_sigma
    y = rng.standard_normal((mc_samples, cov.d)) * sqrt_sigma
    t = np.einsum("ij,ij->i", x, y)
    tail = np.zeros(mc_samples)
    term = np.ones(mc_samples)
    for k in range(1, trunc_degree + 1):
        term *= t
    for k in range(trunc_degree + 1, trunc_degree + 1 + max_tail_terms):
        term = term * t
        c = h_coeff(k)
        if c:
            tail += c * term
        if not np.all(np.isfinite(tail)):
            raise FloatingPointError("tail accumulation diverged")
        if c and np.max(np.abs(c * term)) < 1e-18 * max(1e-300, np.max(np.abs(tail))):
            break
    sq = tail**2
    mean_sq = float(np.mean(sq))
    se_sq = float(np.std(sq, ddof=1) / math.sqrt(mc_samples))
    est = math.sqrt(mean_sq)
    se = se_sq / (2.0 * est) if est > 0 else 0.0
    return est, se
