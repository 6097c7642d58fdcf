"""Central sequences, their gradients, plug-in variances and corrections.

For residuals ``e_i = Y_i - sum_k theta_k Y_{i-k}`` the central sequence is

    V_n(theta) = -(1/sqrt(n)) sum_i [ M(e_i) G(Y_{i-1}) + N(e_i) L(Y_{i-1}) ]

with ``N(x) = 1 + x M(x)``; the AR(1) location case drops the ``L`` term.
Since ``de_i/dtheta_k = -Y_{i-k}`` the gradient is

    dV_n/dtheta_k = (1/sqrt(n)) sum_i [ M'(e_i) G + N'(e_i) L ] Y_{i-k}.

``n`` here is the number of residual terms, ``len(path) - m``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dgp import Perturbation, SeriesPath
from .errors import ConditionViolation, DomainError
from .estimate import lag_matrix
from .scores import ScoreFamily

SETTINGS = ("ar1", "arch", "general")


@dataclass(frozen=True, eq=False)
class CentralEval:
    v: float
    grad: np.ndarray
    tau2: float
    theta: np.ndarray
    n: int

    @property
    def statistic(self) -> float:
        return self.v / math.sqrt(self.tau2)


@dataclass(frozen=True)
class EquivalenceDiagnostic:
    delta: float
    correction: float
    rate_exponent: float


def _values(path) -> np.ndarray:
    y = path.y if isinstance(path, SeriesPath) else path
    return np.asarray(y, dtype=float)


def _evaluate(y, theta, G, L, score: ScoreFamily, setting: str, moments: str) -> CentralEval:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = len(theta)
    if m < 1:
        raise DomainError("empty parameter vector")
    if len(y) < m + 1:
        raise DomainError(f"path of length {len(y)} leaves no residuals for order {m}")
    X = lag_matrix(y, m)
    resid = y[m:] - X @ theta
    prev = X[:, 0]
    n = len(resid)
    g = G(prev)
    M = score.score(resid)
    dM, _ = score.score_derivs(resid)
    terms = M * g
    slope = dM * g
    if L is not None:
        l = L(prev)
        terms = terms + score.nf(resid) * l
        slope = slope + score.nf_deriv(resid) * l
    root = math.sqrt(n)
    v = -float(terms.sum()) / root
    grad = (slope @ X) / root
    tau2 = tau2_plugin(resid, prev, G, L, score, setting, moments)
    return CentralEval(v, grad, tau2, theta, n)


def central_ar1(path, theta: float, G: Perturbation, score: ScoreFamily,
                moments: str = "theoretical") -> CentralEval:
    y = _values(path)
    if np.ndim(theta) and np.size(theta) != 1:
        raise DomainError("central_ar1 takes a scalar theta")
    return _evaluate(y, theta, G, None, score, "ar1", moments)


def central_arch(path, theta: float, G: Perturbation, L: Perturbation, score: ScoreFamily,
                 moments: str = "theoretical") -> CentralEval:
    """ARCH-type alternative; ``L`` is the linearized scale perturbation (``B/2``)."""
    y = _values(path)
    if np.ndim(theta) and np.size(theta) != 1:
        raise DomainError("central_arch takes a scalar theta")
    return _evaluate(y, theta, G, L, score, "general", moments)


def central_arm(path, theta, G: Perturbation, L: Perturbation | None, score: ScoreFamily,
                moments: str = "theoretical") -> CentralEval:
    y = _values(path)
    return _evaluate(y, theta, G, L, score, "general", moments)


def central(kind: str, path, theta, G, L, score, moments: str = "theoretical") -> CentralEval:
    """Dispatch on the model kind used by ``dgp.ModelConfig``."""
    if kind == "ar1":
        return central_ar1(path, theta, G, score, moments)
    if kind == "arch":
        return central_arch(path, theta, G, L, score, moments)
    return central_arm(path, theta, G, L, score, moments)


def _moment_estimates(resid, score: ScoreFamily, moments: str):
    if moments == "theoretical":
        return score.moments
    if moments == "empirical":
        M2 = score.score(resid) ** 2
        return (float(M2.mean()), float((resid * M2).mean()), float((resid**2 * M2).mean()))
    raise DomainError(f"moments must be 'theoretical' or 'empirical', got {moments!r}")


def tau2_plugin(residuals, lags, G, L, score: ScoreFamily, setting: str = "ar1",
                moments: str = "theoretical") -> float:
    """Plug-in LAN variance.

    ``ar1``:     I0 E[G^2]
    ``arch``:    I0 E[G^2] + (I2 - 1)/4 E[H^2] + I1 E[G H]
    ``general``: I0 E[G^2] + (I2 - 1) E[H^2] + 2 I1 E[G H]   (unit scale)

    ``H`` is the scale function passed as ``L``. The ``arch`` form equals the
    ``general`` form when it is given ``B = 2 L``. ``moments="empirical"``
    replaces ``I_j`` by sample means of ``e^j M(e)^2`` over ``residuals``.
    """
    residuals = np.asarray(residuals, dtype=float)
    lags = np.asarray(lags, dtype=float)
    if residuals.size == 0 or lags.size == 0:
        raise DomainError("tau2_plugin needs non-empty inputs")
    if setting not in SETTINGS:
        raise DomainError(f"setting must be one of {SETTINGS}, got {setting!r}")
    I0, I1, I2 = _moment_estimates(residuals, score, moments)
    g = G(lags)
    tau2 = I0 * float(np.mean(g * g))
    if setting != "ar1" and L is not None:
        h = L(lags)
        if setting == "arch":
            tau2 += (I2 - 1) / 4 * float(np.mean(h * h)) + I1 * float(np.mean(g * h))
        else:
            tau2 += (I2 - 1) * float(np.mean(h * h)) + 2 * I1 * float(np.mean(g * h))
    if tau2 < 0:
        warnings.warn("negative plug-in variance clipped to 0", RuntimeWarning)
        tau2 = 0.0
    return tau2


def ws_correct(at_fit: CentralEval, theta_n, theta_N) -> float:
    """First-order corrected sequence ``V_n(theta_n) + grad . (theta_N - theta_n)``."""
    grad = np.atleast_1d(at_fit.grad)
    if not np.any(grad != 0):
        raise ConditionViolation("gradient of V_n vanishes at the fitted parameter")
    step = np.atleast_1d(np.asarray(theta_N, dtype=float)) - np.atleast_1d(
        np.asarray(theta_n, dtype=float))
    return at_fit.v + float(grad @ step)


def modify_estimator_univ(theta_n: float, theta_N: float) -> float:
    # On the tangent line the shift that absorbs the correction is theta_N - theta_n.
    return float(theta_N)


def modify_estimator_multi(theta_n, theta_N, at_fit: CentralEval, j: int) -> np.ndarray:
    """Move coordinate ``j`` (0-based) of ``theta_n`` along the tangent plane.

    The shift ``rho_j = grad . (theta_N - theta_n) / grad_j`` keeps every other
    coordinate fixed and reproduces the full linear correction.
    """
    theta_n = np.atleast_1d(np.asarray(theta_n, dtype=float))
    theta_N = np.atleast_1d(np.asarray(theta_N, dtype=float))
    grad = np.atleast_1d(at_fit.grad)
    if not 0 <= j < len(grad):
        raise DomainError(f"coordinate {j} out of range for dimension {len(grad)}")
    if grad[j] == 0:
        raise ConditionViolation(f"gradient component {j} is zero")
    rho = float(grad @ (theta_N - theta_n)) / grad[j]
    out = theta_n.copy()
    out[j] += rho
    return out


def equivalence_diagnostic(kind: str, path, theta_true, theta_n, theta_N, G, L,
                           score: ScoreFamily, S: float = 1.0) -> EquivalenceDiagnostic:
    v_true = central(kind, path, theta_true, G, L, score).v
    v_N = central(kind, path, theta_N, G, L, score).v
    at_fit = central(kind, path, theta_n, G, L, score)
    step = np.atleast_1d(theta_N) - np.atleast_1d(theta_n)
    return EquivalenceDiagnostic(abs(v_true - v_N), float(at_fit.grad @ step), S / 4)
