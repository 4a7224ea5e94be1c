"""Change-of-basis and Gaussian moment matrices: the small-scale oracle
behind the eigenvalue formulas.

Everything here is dense and deliberately capped at a few thousand rows;
the production eigenvalue path lives in :mod:`anisokrr.spectral`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import CovarianceSpec
from .multiindex import (
    MultiIndex,
    enumerate_multi_indices,
    factorial_product,
    multinomial,
)

DENSE_CAP = 5000


class DenseCapError(RuntimeError):
    pass


def hermite_expand_monomial(beta: MultiIndex) -> list[tuple[MultiIndex, float]]:
    """Expansion z^beta = sum_kbar coeff(kbar) He_kbar(z) over kbar <= beta
    with kbar == beta (mod 2) componentwise.

    The per-coordinate coefficient is b! / (2^{(b-k)/2} ((b-k)/2)! sqrt(k!)).
    """
    terms: list[tuple[tuple[tuple[int, int], ...], float]] = [((), 1.0)]
    for j, b in beta.entries:
        new_terms = []
        for k in range(b % 2, b + 1, 2):
            half = (b - k) // 2
            coeff = math.factorial(b) / (
                2**half * math.factorial(half) * math.sqrt(math.factorial(k))
            )
            for entries, c in terms:
                ent = entries + ((j, k),) if k > 0 else entries
                new_terms.append((ent, c * coeff))
        terms = new_terms
    return [(MultiIndex(entries, beta.dim), c) for entries, c in terms]


@dataclass
class BasisMatrix:
    """Lambda in the canonical multi-index order, plus its conditioning.

    In the degree-ascending canonical order the matrix is lower-triangular
    (each monomial expands into Hermite terms of equal or lower degree);
    this is the same triangularity the derivation states, up to reversing
    the index order. Diagonal entries equal sqrt(beta!).
    """

    indices: list[MultiIndex]
    matrix: np.ndarray
    op_norm: float
    inv_op_norm: float


@dataclass
class MomentMatrix:
    indices: list[MultiIndex]
    matrix: np.ndarray


def _check_cap(d: int, max_degree: int) -> list[MultiIndex]:
    indices = enumerate_multi_indices(d, max_degree)
    if len(indices) > DENSE_CAP:
        raise DenseCapError(f"dense dimension {len(indices)} exceeds cap {DENSE_CAP}")
    return indices


def _level_coeff(h, degree: int) -> float:
    return float(h[degree])


def build_lambda(d: int, max_degree: int, h, cov: CovarianceSpec) -> BasisMatrix:
    """Feature change-of-basis: Phi = Lambda Psi.

    Entry (beta, kbar) is sqrt(h_|beta| multinom(beta) / (h_|kbar|
    multinom(kbar)) * sigma^{beta-kbar}) times the monomial-to-Hermite
    coefficient of He_kbar in z^beta.
    """
    indices = _check_cap(d, max_degree)
    for k in range(max_degree + 1):
        if _level_coeff(h, k) <= 0:
            raise ValueError(f"level coefficient h_{k} must be > 0 to build Lambda")
    pos = {idx.entries: i for i, idx in enumerate(indices)}
    log_sigma = cov.log_sigma()
    n = len(indices)
    lam = np.zeros((n, n))
    for i, beta in enumerate(indices):
        hb = _level_coeff(h, beta.degree()) * multinomial(beta)
        for kbar, mono_coeff in hermite_expand_monomial(beta):
            jcol = pos[kbar.entries]
            hk = _level_coeff(h, kbar.degree()) * multinomial(kbar)
            log_sig = sum(
                (e - kbar.exponent(j)) * log_sigma[j - 1] for j, e in beta.entries
            )
            # mono_coeff already carries the 1/sqrt(kbar!) factor
            lam[i, jcol] = math.sqrt(hb / hk) * math.exp(0.5 * log_sig) * mono_coeff
    svals = np.linalg.svd(lam, compute_uv=False)
    return BasisMatrix(
        indices=indices,
        matrix=lam,
        op_norm=float(svals[0]),
        inv_op_norm=float(1.0 / svals[-1]),
    )


def gaussian_moment(beta: MultiIndex, cov: CovarianceSpec) -> float:
    """E[x^beta] for x ~ N(0, diag(sigma)): product of (e-1)!! sigma_j^{e/2}
    over even exponents, zero if any exponent is odd."""
    out = 1.0
    for j, e in beta.entries:
        if e % 2 == 1:
            return 0.0
        m = 1.0
        s = cov.sigma[j - 1]
        for k in range(1, e // 2 + 1):
            m *= (2 * k - 1) * s
        out *= m
    return out


def moment_matrix(d: int, max_degree: int, h, cov: CovarianceSpec) -> MomentMatrix:
    """M_{beta,gamma} = sqrt(h_|beta| multinom(beta) h_|gamma|
    multinom(gamma)) * E[x^{beta+gamma}]."""
    indices = _check_cap(d, max_degree)
    n = len(indices)
    weights = np.array(
        [
            math.sqrt(_level_coeff(h, b.degree()) * multinomial(b))
            for b in indices
        ]
    )
    mat = np.zeros((n, n))
    for i, beta in enumerate(indices):
        for j in range(i, n):
            m = gaussian_moment(beta + indices[j], cov)
            if m != 0.0:
                mat[i, j] = mat[j, i] = weights[i] * weights[j] * m
    return MomentMatrix(indices=indices, matrix=mat)


@dataclass
class FactorizationReport:
    mc_feature_deviation: float      # max |Phi - Lambda Psi| over samples
    reconstruction_deviation: float  # max |M - Lambda diag(C) Lambda^T|
    eig_vs_formula_rel_deviation: float  # Remark-style exact-value diagnostic
    bound_lower_ok: bool
    bound_upper_ok: bool
    op_norm: float
    inv_op_norm: float
    eigenvalues: np.ndarray = field(repr=False, default=None)
    formula_values: np.ndarray = field(repr=False, default=None)


def verify_factorization(
    d: int,
    max_degree: int,
    h,
    cov: CovarianceSpec,
    mc_samples: int = 2000,
    seed: int = 0,
) -> FactorizationReport:
    """Three-way diagnostic: (a) Phi = Lambda Psi on sampled data, (b)
    M = Lambda diag(C_beta) Lambda^T exactly, (c) eig(M) against the
    formula values h_|beta| |beta|! sigma^beta, plus the two-sided
    Ostrowski bound with C1 = 1/||Lambda^{-1}||_op^2, C2 = ||Lambda||_op^2.
    """
    basis = build_lambda(d, max_degree, h, cov)
    indices = basis.indices
    mom = moment_matrix(d, max_degree, h, cov)

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((mc_samples, d))
    from .hermite import HermiteEvaluator

    ev = HermiteEvaluator(max_degree=max(2, max_degree))
    c_beta = np.array(
        [
            _level_coeff(h, b.degree())
            * multinomial(b)
            * float(np.prod([cov.sigma[j - 1] ** e for j, e in b.entries]))
            for b in indices
        ]
    )
    sqrt_c = np.sqrt(c_beta)
    phi = np.empty((mc_samples, len(indices)))
    psi = np.empty((mc_samples, len(indices)))
    for i, b in enumerate(indices):
        mono = np.ones(mc_samples)
        herm = np.ones(mc_samples)
        for j, e in b.entries:
            mono *= z[:, j - 1] ** e
            herm *= ev.he(e, z[:, j - 1])
        phi[:, i] = sqrt_c[i] * mono
        psi[:, i] = sqrt_c[i] * herm
    mc_dev = float(np.max(np.abs(phi - psi @ basis.matrix.T)))

    recon = basis.matrix @ np.diag(c_beta) @ basis.matrix.T
    recon_dev = float(np.max(np.abs(recon - mom.matrix)))

    eig = np.sort(np.linalg.eigvalsh(mom.matrix))[::-1]
    formula = np.sort(
        np.array(
            [
                _level_coeff(h, b.degree())
                * math.factorial(b.degree())
                * float(np.prod([cov.sigma[j - 1] ** e for j, e in b.entries]))
                for b in indices
            ]
        )
    )[::-1]
    rel_dev = float(np.max(np.abs(eig - formula) / formula))

    diag_sorted = np.sort(c_beta)[::-1]
    c1 = 1.0 / basis.inv_op_norm**2
    c2 = basis.op_norm**2
    lower_ok = bool(np.all(eig >= c1 * diag_sorted * (1 - 1e-10)))
    upper_ok = bool(np.all(eig <= c2 * diag_sorted * (1 + 1e-10)))

    return FactorizationReport(
        mc_feature_deviation=mc_dev,
        reconstruction_deviation=recon_dev,
        eig_vs_formula_rel_deviation=rel_dev,
        bound_lower_ok=lower_ok,
        bound_upper_ok=upper_ok,
        op_norm=basis.op_norm,
        inv_op_norm=basis.inv_op_norm,
        eigenvalues=eig,
        formula_values=formula,
    )
