"""Orthonormal probabilists' Hermite polynomials and the square-expansion
product formula.

Conventions: he_p is the orthonormal polynomial under N(0,1), i.e.
he_p = H_p / sqrt(p!) with H_p the monic (probabilists') Hermite polynomial
satisfying H_{p+1} = u H_p - p H_{p-1}. Tensor products He_beta(z) multiply
he over the sparse support of beta only.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .multiindex import MultiIndex


class DegreeExceededError(ValueError):
    pass


class HermiteEvaluator:
    """Evaluates he_p, He_beta and the square expansion up to a max degree."""

    def __init__(self, max_degree: int = 40):
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        self.max_degree = max_degree
        # 1/sqrt(p!) normalizers, precomputed once
        self._inv_sqrt_fact = np.array(
            [1.0 / math.sqrt(math.factorial(p)) for p in range(max_degree + 1)]
        )

    def he(self, p: int, u):
        """Orthonormal he_p(u); accepts scalars or arrays."""
        if p < 0 or p > self.max_degree:
            raise DegreeExceededError(f"degree {p} outside [0, {self.max_degree}]")
        u = np.asarray(u, dtype=float)
        h_prev = np.ones_like(u)
        if p == 0:
            out = h_prev
        else:
            h = u.copy()
            for m in range(1, p):
                h, h_prev = u * h - m * h_prev, h
            out = h
        out = out * self._inv_sqrt_fact[p]
        return float(out) if out.ndim == 0 else out

    def he_table(self, max_p: int, u: np.ndarray) -> np.ndarray:
        """All he_0..he_max_p at once; shape u.shape + (max_p+1,)."""
        if max_p > self.max_degree:
            raise DegreeExceededError(f"degree {max_p} outside [0, {self.max_degree}]")
        u = np.asarray(u, dtype=float)
        table = np.empty(u.shape + (max_p + 1,))
        table[..., 0] = 1.0
        if max_p >= 1:
            table[..., 1] = u
        for m in range(1, max_p):
            table[..., m + 1] = u * table[..., m] - m * table[..., m - 1]
        return table * self._inv_sqrt_fact[: max_p + 1]

    def He(self, beta: MultiIndex, z) -> float:
        """Product of he_{beta_j}(z_j) over the support of beta."""
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != beta.dim:
            raise ValueError(f"z has dim {z.shape[-1]}, beta has dim {beta.dim}")
        out = 1.0
        for j, e in beta.entries:
            out = out * self.he(e, z[..., j - 1])
        return out

    def square_expansion(self, p: int) -> list[tuple[int, float]]:
        """Coefficients C(p,r) with he_p(u)^2 = sum_r C(p,r) he_{2r}(u).

        Derived from the product formula for monic Hermite polynomials,
        H_p^2 = sum_k k! binom(p,k)^2 H_{2p-2k}; only even degrees appear
        and the degree-0 coefficient is always 1.
        """
        if p < 0 or 2 * p > self.max_degree:
            raise DegreeExceededError(
                f"square expansion of degree {p} needs he up to {2 * p} "
                f"(max {self.max_degree})"
            )
        out = []
        for r in range(p + 1):
            k = p - r
            rational = Fraction(math.factorial(k) * math.comb(p, k) ** 2, math.factorial(p))
            coeff = float(rational) * math.sqrt(math.factorial(2 * r))
            out.append((2 * r, coeff))
        return out


def gauss_hermite_probabilists(n_nodes: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E_{u~N(0,1)}[f(u)] ~= sum w_i f(x_i)."""
    # hermegauss integrates against exp(-u^2/2); normalize to the Gaussian.
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    return nodes, weights / math.sqrt(2.0 * math.pi)
