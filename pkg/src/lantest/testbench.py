"""One-sided Neyman-Pearson decision and asymptotic power predictions."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import norm

from .central import CentralEval
from .errors import DegenerateVarianceError, DomainError

FLAVORS = ("oracle", "lse", "sestimator")
CONVENTIONS = ("tau", "tau2")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # not a pytest class

    statistic: float
    threshold: float
    reject: bool
    level: float
    flavor: str


def critical_value(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    return float(norm.ppf(1.0 - level))


def np_decide(ev: CentralEval, level: float = 0.05, flavor: str = "oracle") -> TestOutcome:
    """Reject when ``V_n / tau_hat >= z_{1-level}`` (boundary included)."""
    z = critical_value(level)
    if not ev.tau2 > 0:
        raise DegenerateVarianceError(f"plug-in variance is {ev.tau2}")
    stat = ev.v / math.sqrt(ev.tau2)
    return TestOutcome(stat, z, stat >= z, level, flavor)


def theoretical_power(tau2: float, level: float = 0.05, convention: str = "tau") -> float:
    """Asymptotic power under the contiguous alternative.

    ``"tau"`` standardizes the ``N(tau2, tau2)`` limit: ``1 - Phi(z - tau)``.
    ``"tau2"`` is ``1 - Phi(z - tau2)``, which uses the variance itself as
    the shift. Simulation decides between the two.
    """
    if tau2 < 0:
        raise DomainError(f"tau2 must be non-negative, got {tau2}")
    z = critical_value(level)
    if convention == "tau":
        shift = math.sqrt(tau2)
    elif convention == "tau2":
        shift = tau2
    else:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if shift == 0.0:
        return level
    # power never falls below the level; the clamp absorbs quantile round-off
    return max(level, float(norm.sf(z - shift)))


def lecam_prediction(tau2: float) -> tuple[float, float]:
    """Mean and variance of the central sequence under ``H1n``."""
    if tau2 < 0:
        raise DomainError(f"tau2 must be non-negative, got {tau2}")
    return tau2, tau2
