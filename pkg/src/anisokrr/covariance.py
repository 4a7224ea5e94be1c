"""Power-law diagonal covariance and its effective dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CovarianceSpec:
    """Diagonal covariance with sigma_j = C_alpha * j^{-alpha}, trace 1."""

    d: int
    alpha: float
    sigma: np.ndarray  # descending, positive, sums to 1
    c_alpha: float

    def log_sigma(self) -> np.ndarray:
        return np.log(self.sigma)


def build(d: int, alpha: float) -> CovarianceSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    j = np.arange(1, d + 1, dtype=float)
    powers = j**-alpha
    # Sum small terms first for accuracy.
    c_alpha = 1.0 / float(np.sum(powers[::-1]))
    sigma = c_alpha * powers
    return CovarianceSpec(d=d, alpha=float(alpha), sigma=sigma, c_alpha=c_alpha)


def r0(spec: CovarianceSpec) -> float:
    """Trace / largest eigenvalue; equals 1/sigma_1 under trace normalization."""
    return float(np.sum(spec.sigma) / spec.sigma[0])


def R0(spec: CovarianceSpec) -> float:
    """Trace^2 / trace of the square."""
    s = float(np.sum(spec.sigma))
    return s * s / float(np.sum(spec.sigma[::-1] ** 2))


def predicted_r0_exponent(alpha: float) -> float:
    if alpha < 1:
        return 1.0 - alpha
    # alpha == 1 grows like log(d); alpha > 1 is O(1). Either way the
    # power-law exponent is 0 and the fit only sees slowly-varying terms.
    return 0.0


def predicted_R0_exponent(alpha: float) -> float:
    if alpha <= 0.5:
        return 1.0
    if alpha < 1:
        return 2.0 - 2.0 * alpha
    return 0.0


@dataclass(frozen=True)
class ScalingReport:
    alpha: float
    d_grid: tuple[int, ...]
    r0_exponent_fit: float
    R0_exponent_fit: float
    r0_exponent_predicted: float
    R0_exponent_predicted: float


def check_asymptotics(alpha: float, d_grid) -> ScalingReport:
    """Least-squares exponent fit of r0(d), R0(d) on a log-log grid."""
    d_grid = tuple(int(d) for d in d_grid)
    if len(d_grid) < 2 or len(set(d_grid)) < 2:
        raise ValueError("need at least two distinct d values")
    if any(b <= a for a, b in zip(d_grid, d_grid[1:])):
        raise ValueError("d_grid must be strictly increasing")
    log_d = np.log([float(d) for d in d_grid])
    log_r0 = np.log([r0(build(d, alpha)) for d in d_grid])
    log_R0 = np.log([R0(build(d, alpha)) for d in d_grid])
    slope_r0 = np.polyfit(log_d, log_r0, 1)[0]
    slope_R0 = np.polyfit(log_d, log_R0, 1)[0]
    return ScalingReport(
        alpha=alpha,
        d_grid=d_grid,
        r0_exponent_fit=float(slope_r0),
        R0_exponent_fit=float(slope_R0),
        r0_exponent_predicted=predicted_r0_exponent(alpha),
        R0_exponent_predicted=predicted_R0_exponent(alpha),
    )
