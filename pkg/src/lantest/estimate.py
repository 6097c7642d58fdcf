"""Least-squares AR fits, confidence intervals and the extended-sample estimator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy import stats

from .dgp import ModelConfig, SeriesPath, simulate
from .errors import DegenerateDesignError, DomainError, InsufficientDataError, NumericError


def _values(path) -> np.ndarray:
    y = path.y if isinstance(path, SeriesPath) else path
    return np.asarray(y, dtype=float)


def lag_matrix(y: np.ndarray, m: int) -> np.ndarray:
    """Rows ``(Y_{t-1}, ..., Y_{t-m})`` for ``t = m .. n-1``."""
    n = len(y)
    return np.column_stack([y[m - k:n - k] for k in range(1, m + 1)])


@dataclass(frozen=True, eq=False)
class FitResult:
    """``cov`` is the observed covariance of ``sqrt(n) (theta_hat - theta)``."""

    theta: np.ndarray
    sigma: float
    cov: np.ndarray
    residuals: np.ndarray
    n: int
    provenance: dict | None = None

    @property
    def order(self) -> int:
        return len(self.theta)

    def csv_row(self) -> list:
        return [self.n, self.order, *map(float, self.theta), float(self.sigma),
                *map(float, np.diag(self.cov))]

    @staticmethod
    def csv_header(m: int) -> list[str]:
        return (["n", "m"] + [f"theta_hat_{j}" for j in range(1, m + 1)] + ["sigma_hat"]
                + [f"sigma_tilde_{j}{j}" for j in range(1, m + 1)])


def fit_ar1_lse(path) -> FitResult:
    y = _values(path)
    n = len(y)
    if n < 3:
        raise DomainError(f"need at least 3 observations, got {n}")
    lag, cur = y[:-1], y[1:]
    energy = float(np.dot(lag, lag))
    if energy <= 0.0:
        raise DegenerateDesignError("lagged values have zero energy")
    theta = float(np.dot(cur, lag)) / energy
    resid = cur - theta * lag
    sigma2 = float(np.dot(resid, resid)) / (n - 1)
    cov = np.array([[sigma2 * n / energy]])
    return FitResult(np.array([theta]), math.sqrt(sigma2), cov, resid, n)


def fit_arm_lse(path, m: int) -> FitResult:
    y = _values(path)
    n = len(y)
    if m < 1:
        raise DomainError("order must be positive")
    if n <= 2 * m:
        raise DomainError(f"need more than {2 * m} observations for order {m}, got {n}")
    X = lag_matrix(y, m)
    cur = y[m:]
    if np.linalg.matrix_rank(X) < m:
        raise DegenerateDesignError(f"lag design of order {m} is rank deficient")
    xtx = X.T @ X
    theta = np.linalg.solve(xtx, X.T @ cur)
    resid = cur - X @ theta
    sigma2 = float(np.dot(resid, resid)) / (n - m)
    cov = sigma2 * n * np.linalg.inv(xtx)
    cov = 0.5 * (cov + cov.T)
    return FitResult(theta, math.sqrt(sigma2), cov, resid, n)


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    level: float

    @property
    def center(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)

    def __contains__(self, value) -> bool:
        return self.lower <= value <= self.upper


def _check_level(level: float):
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")


def ci_univariate(fit: FitResult, level: float = 0.95) -> Interval:
    """``theta_hat +- s t_{(1-level)/2}(n-1) / sqrt(n)`` with ``s^2`` the
    asymptotic variance estimate of ``sqrt(n) theta_hat``."""
    _check_level(level)
    if fit.n < 2:
        raise DomainError("need n >= 2")
    t = stats.t.ppf(0.5 + level / 2, fit.n - 1)
    half = math.sqrt(fit.cov[0, 0]) * t / math.sqrt(fit.n)
    c = float(fit.theta[0])
    return Interval(c - half, c + half, level)


def ci_simultaneous(fit: FitResult, level: float = 0.95) -> list[Interval]:
    """Per-coordinate delta-method intervals with ``t(n - m)`` quantiles."""
    _check_level(level)
    m = fit.order
    if fit.n <= m:
        raise DomainError("need n > m")
    eig = np.linalg.eigvalsh(fit.cov)
    if eig.min() < -1e-12 * max(1.0, abs(eig).max()):
        raise NumericError(f"observed covariance is not PSD (min eigenvalue {eig.min():.3e})")
    t = stats.t.ppf(0.5 + level / 2, fit.n - m)
    out = []
    for j in range(m):
        half = math.sqrt(max(fit.cov[j, j], 0.0)) * t / math.sqrt(fit.n)
        c = float(fit.theta[j])
        out.append(Interval(c - half, c + half, level))
    return out


@dataclass(frozen=True)
class SEstimatorConfig:
    """Extended sample size ``N = floor(1 + n**(S + shift))``.

    ``shift=1`` is the default; ``shift=0`` gives ``floor(1 + n**S)``.
    """

    S: float = 1.0
    shift: int = 1

    def __post_init__(self):
        if not self.S > 0:
            raise DomainError(f"S must be positive, got {self.S}")

    def N(self, n: int) -> int:
        expo = self.S + self.shift
        if float(expo).is_integer():
            return 1 + n ** int(expo)
        return math.floor(1 + n**expo)

    def rate_exponent(self) -> float:
        return self.S / 4


class SeriesSource(Protocol):
    def take(self, N: int, seed: int) -> np.ndarray: ...


@dataclass(frozen=True)
class SimulatedSource:
    config: ModelConfig

    def take(self, N: int, seed: int) -> np.ndarray:
        return simulate(self.config, N, seed).y


@dataclass(frozen=True, eq=False)
class ArraySource:
    y: np.ndarray

    def take(self, N: int, seed: int) -> np.ndarray:
        if len(self.y) < N:
            raise InsufficientDataError(N, len(self.y))
        return np.asarray(self.y[:N], dtype=float)


def s_estimate(source: SeriesSource, n: int, cfg: SEstimatorConfig, seed: int = 0,
               order: int = 1) -> FitResult:
    """LSE on the first ``N = cfg.N(n)`` observations of ``source``."""
    N = cfg.N(n)
    y = source.take(N, seed)
    fit = fit_ar1_lse(y) if order == 1 else fit_arm_lse(y, order)
    return FitResult(fit.theta, fit.sigma, fit.cov, fit.residuals, fit.n,
                     {"n": n, "S": cfg.S, "shift": cfg.shift, "N": N})
