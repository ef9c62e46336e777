"""Distribution and quantile estimators built on a fitted density ratio model.

The fitted base-measure masses p_kj over the pooled sample give the
estimated base CDF; multiplying by the fitted tilt exp(theta' q) gives the
target CDF. Quantiles use the left-continuous generalized inverse, and the
asymptotic variances are plug-in versions of the limiting-normal variances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.stats import norm

from .basis import BasisSpec, evaluate_matrix
from .errors import (
    InvalidArgumentError,
    InvalidLevelError,
    NonpositiveDensityError,
    NotConvergedError,
    SingularMomentError,
)
from .fit import DrmFit, TwoSampleData, _tilt_fraction

__all__ = [
    "WeightedCdf",
    "QuantileEstimate",
    "AsymptoticVariance",
    "estimate_g0",
    "estimate_g1",
    "drm_quantile",
    "avar_theta",
    "avar_theta_inverse_form",
    "avar_g1_at",
    "avar_quantile",
    "corollary_variance",
    "drm_quantile_estimate",
]


@dataclass(frozen=True)
class WeightedCdf:
    """A discrete CDF: sorted support with aligned nonnegative masses."""

    support: np.ndarray
    mass: np.ndarray
    cumulative: np.ndarray

    @classmethod
    def from_points(cls, points: np.ndarray, mass: np.ndarray) -> "WeightedCdf":
        order = np.argsort(points, kind="stable")
        support = np.asarray(points, dtype=float)[order]
        mass = np.asarray(mass, dtype=float)[order]
        return cls(support=support, mass=mass, cumulative=np.cumsum(mass))

    def evaluate(self, x: float) -> float:
        """Total mass at or below x."""
        idx = int(np.searchsorted(self.support, x, side="right"))
        return 0.0 if idx == 0 else float(self.cumulative[idx - 1])

    def total_mass(self) -> float:
        return float(self.cumulative[-1])


@dataclass(frozen=True)
class QuantileEstimate:
    level: float
    point: float
    std_error: float
    ci_low: float
    ci_high: float
    method: str


@dataclass(frozen=True)
class AsymptoticVariance:
    """Variance of sqrt(n1) * (estimator - truth), with its plug-in pieces."""

    value: float
    ingredients: dict[str, Any] = field(default_factory=dict)


def _check_converged(fit: DrmFit):
    if not fit.converged:
        raise NotConvergedError("fit did not converge; estimators unavailable")


def _tilted_mass(fit: DrmFit, data: TwoSampleData, spec: BasisSpec) -> tuple:
    """Target-sample masses p_kj * exp(theta' q_kj) and the basis matrix.

    Computed as a logistic fraction over n1 so extreme tilts cannot overflow.
    """
    q = evaluate_matrix(spec, data.pooled())
    u = q @ fit.theta_hat
    mass = _tilt_fraction(u, data.n0, data.n1) / data.n1
    return mass, q


def estimate_g1(fit: DrmFit, data: TwoSampleData, spec: BasisSpec) -> WeightedCdf:
    """Estimated target CDF: mass p_kj * exp(theta' q(x_kj)) at each pooled point."""
    _check_converged(fit)
    mass, _ = _tilted_mass(fit, data, spec)
    return WeightedCdf.from_points(data.pooled(), mass)


def estimate_g0(fit: DrmFit, data: TwoSampleData, spec: BasisSpec) -> WeightedCdf:
    """Estimated base CDF: mass p_kj at each pooled point."""
    _check_converged(fit)
    return WeightedCdf.from_points(data.pooled(), fit.weights)


def drm_quantile(cdf: WeightedCdf, p: float) -> float:
    """Smallest support point whose cumulative mass reaches p."""
    if not 0.0 < p < 1.0:
        raise InvalidLevelError(f"quantile level must be in (0,1), got {p}")
    idx = int(np.searchsorted(cdf.cumulative, p, side="left"))
    idx = min(idx, cdf.support.size - 1)
    return float(cdf.support[idx])


def _target_moments(fit: DrmFit, data: TwoSampleData, spec: BasisSpec):
    """Plug-in moments of q under the estimated target CDF.

    Returns (support-ordered mass, support, q_minus rows, E1[q_minus],
    Var1[q_minus] inverse).
    """
    mass, q = _tilted_mass(fit, data, spec)
    pooled = data.pooled()
    order = np.argsort(pooled, kind="stable")
    mass = mass[order]
    support = pooled[order]
    q_minus = q[order, 1:]

    mean_q = mass @ q_minus
    second = (q_minus * mass[:, None]).T @ q_minus
    var_q = second - np.outer(mean_q, mean_q)
    var_q = (var_q + var_q.T) / 2.0
    try:
        np.linalg.cholesky(var_q)
    except np.linalg.LinAlgError:
        raise SingularMomentError(
            "plug-in variance of the non-constant basis components "
            "is not positive definite"
        ) from None
    var_inv = np.linalg.inv(var_q)
    return mass, support, q_minus, mean_q, var_inv


def avar_theta(fit: DrmFit, data: TwoSampleData, spec: BasisSpec) -> np.ndarray:
    """Plug-in asymptotic variance matrix of sqrt(n1)*(theta_hat - theta).

    Computed in the block form built from E1[q_minus] and Var1[q_minus];
    algebraically identical to :func:`avar_theta_inverse_form`.
    """
    _check_converged(fit)
    _, _, _, mean_q, var_inv = _target_moments(fit, data, spec)
    dm = mean_q.size
    m = np.vstack([-mean_q, np.eye(dm)])
    return m @ var_inv @ m.T


def avar_theta_inverse_form(fit: DrmFit, data: TwoSampleData, spec: BasisSpec) -> np.ndarray:
    """Same matrix as :func:`avar_theta`, via inv(E1[q q']) minus the (1,1) unit."""
    _check_converged(fit)
    mass, q = _tilted_mass(fit, data, spec)
    second = (q * mass[:, None]).T @ q
    try:
        inv = np.linalg.inv(second)
    except np.linalg.LinAlgError:
        raise SingularMomentError("plug-in second moment of q is singular") from None
    e11 = np.zeros_like(inv)
    e11[0, 0] = 1.0
    return inv - e11


def _bracket_at(mass, support, q_minus, x: float) -> tuple[np.ndarray, float]:
    """Partial moment Q_hat(x) = sum mass*q_minus*1(support<=x) and G1_hat(x)."""
    idx = int(np.searchsorted(support, x, side="right"))
    partial = mass[:idx] @ q_minus[:idx]
    g1_at = float(np.sum(mass[:idx]))
    return partial, g1_at


def avar_g1_at(fit: DrmFit, data: TwoSampleData, spec: BasisSpec, x: float) -> float:
    """Plug-in asymptotic variance of sqrt(n1)*(G1_hat(x) - G1(x))."""
    _check_converged(fit)
    mass, support, q_minus, mean_q, var_inv = _target_moments(fit, data, spec)
    partial, g1_at = _bracket_at(mass, support, q_minus, x)
    bracket = partial - mean_q * g1_at
    return float(bracket @ var_inv @ bracket)


def avar_quantile(
    fit: DrmFit,
    data: TwoSampleData,
    spec: BasisSpec,
    p: float,
    density_at: float,
) -> AsymptoticVariance:
    """Plug-in asymptotic variance of the DRM quantile estimator at level p.

    ``density_at`` is an estimate of the target density at the estimated
    quantile, typically from a kernel density estimator.
    """
    _check_converged(fit)
    if not 0.0 < p < 1.0:
        raise InvalidLevelError(f"quantile level must be in (0,1), got {p}")
    if not density_at > 0:
        raise NonpositiveDensityError(f"density plug-in must be positive, got {density_at}")
    mass, support, q_minus, mean_q, var_inv = _target_moments(fit, data, spec)
    cdf = WeightedCdf(support=support, mass=mass, cumulative=np.cumsum(mass))
    xi = drm_quantile(cdf, p)
    partial, g1_at = _bracket_at(mass, support, q_minus, xi)
    bracket = partial - p * mean_q
    value = float(bracket @ var_inv @ bracket) / density_at**2
    return AsymptoticVariance(
        value=value,
        ingredients={
            "quantile": xi,
            "partial_moment": partial,
            "mean_q_minus": mean_q,
            "g1_at_quantile": g1_at,
            "density_at_quantile": density_at,
        },
    )


def corollary_variance(k: float, p: float, density_at: float, parametric_avar: float) -> float:
    """Limiting variance of the DRM quantile estimator with identical populations.

    A weighted average of the empirical-quantile variance p(1-p)/g^2
    (weight 1/(k+1)) and the parametric-MLE variance (weight k/(k+1)),
    where k is the base-to-target sample size ratio.
    """
    if not k >= 0:
        raise InvalidArgumentError(f"sample size ratio k must be nonnegative, got {k}")
    if not 0.0 < p < 1.0:
        raise InvalidLevelError(f"quantile level must be in (0,1), got {p}")
    if not density_at > 0:
        raise NonpositiveDensityError(f"density must be positive, got {density_at}")
    if parametric_avar < 0:
        raise InvalidArgumentError("parametric variance must be nonnegative")
    empirical = p * (1.0 - p) / density_at**2
    return empirical / (k + 1.0) + parametric_avar * k / (k + 1.0)


def drm_quantile_estimate(
    fit: DrmFit,
    data: TwoSampleData,
    spec: BasisSpec,
    p: float,
    ci_level: float = 0.95,
) -> QuantileEstimate:
    """Point estimate, standard error and normal CI for the target p-quantile.

    The density plug-in for the variance is a Gaussian KDE on the target
    sample with Silverman's rule-of-thumb bandwidth.
    """
    from .nonparametric import KdeModel, kde_density, silverman_bandwidth

    cdf = estimate_g1(fit, data, spec)
    point = drm_quantile(cdf, p)
    kde = KdeModel(sample=data.x1, bandwidth=silverman_bandwidth(data.x1))
    g_hat = kde_density(kde, point)
    avar = avar_quantile(fit, data, spec, p, g_hat)
    se = float(np.sqrt(avar.value / data.n1))
    z = float(norm.ppf(0.5 + ci_level / 2.0))
    return QuantileEstimate(
        level=p,
        point=point,
        std_error=se,
        ci_low=point - z * se,
        ci_high=point + z * se,
        method="drm",
    )
