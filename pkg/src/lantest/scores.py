"""Innovation densities described through their location score.

A family is either standard Gaussian or Student-t rescaled to unit
variance. Everything downstream only needs the score ``M = f'/f``, its
first two derivatives, the scale score ``N(x) = 1 + x M(x)`` and the
moments ``I_j = E[eps^j M(eps)^2]``.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericError

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-10
# Tail beyond which the truncation sensitivity check measures mass.
TAIL_CUTOFF = 50.0


def _finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("score evaluated at a non-finite point")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _quad(fn, label: str) -> float:
    """Integrate ``fn`` over the real line, split at 0."""
    total = 0.0
    for lo, hi in ((-np.inf, 0.0), (0.0, np.inf)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            res = integrate.quad(fn, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                 limit=500, full_output=1)
        if len(res) > 3:
            value, abserr, info, msg = res
            raise NumericError(
                f"quadrature for {label} on ({lo}, {hi}) did not converge: "
                f"value={value:.3e} abserr={abserr:.3e} neval={info['neval']} ({msg.strip()})"
            )
        total += res[0]
    return total


@functools.lru_cache(maxsize=None)
def _moments(kind: str, nu: float | None) -> tuple[float, float, float]:
    fam = object.__new__(ScoreFamily)
    object.__setattr__(fam, "kind", kind)
    object.__setattr__(fam, "nu", nu)
    return tuple(
        _quad(lambda x, j=j: x**j * fam._score(x) ** 2 * fam._pdf(x), f"I_{j}")
        for j in range(3)
    )


@dataclass(frozen=True)
class ScoreFamily:
    """Unit-variance innovation family.

    ``kind`` is ``"gaussian"`` or ``"student_t"``; ``nu`` is the degrees of
    freedom for the latter (``nu >= 3``). The moments ``I_0, I_1, I_2`` are
    computed by quadrature when the instance is built.
    """

    kind: str = "gaussian"
    nu: float | None = None
    moments: tuple[float, float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.nu is not None:
                raise DomainError("gaussian family takes no degrees of freedom")
        elif self.kind == "student_t":
            if self.nu is None or not self.nu >= 3:
                raise DomainError(f"student_t needs nu >= 3, got {self.nu}")
            object.__setattr__(self, "nu", float(self.nu))
        else:
            raise DomainError(f"unknown score family {self.kind!r}")
        object.__setattr__(self, "moments", _moments(self.kind, self.nu))

    @classmethod
    def gaussian(cls) -> "ScoreFamily":
        return cls("gaussian")

    @classmethod
    def student_t(cls, nu: float) -> "ScoreFamily":
        return cls("student_t", nu)

    @property
    def label(self) -> str:
        return "gaussian" if self.kind == "gaussian" else f"student_t(nu={self.nu:g})"

    # ``a = nu - 2`` is the squared scale times nu after rescaling to unit variance.
    @property
    def _a(self) -> float:
        return self.nu - 2.0

    def _pdf(self, x):
        if self.kind == "gaussian":
            return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
        nu, a = self.nu, self._a
        logc = (special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2)
                - 0.5 * math.log(math.pi * a))
        return np.exp(logc - 0.5 * (nu + 1) * np.log1p(x * x / a))

    def _score(self, x):
        if self.kind == "gaussian":
            return -x
        return -(self.nu + 1) * x / (self._a + x * x)

    def _score_d1(self, x):
        if self.kind == "gaussian":
            return -np.ones_like(x)
        a = self._a
        return -(self.nu + 1) * (a - x * x) / (a + x * x) ** 2

    def _score_d2(self, x):
        if self.kind == "gaussian":
            return np.zeros_like(x)
        a = self._a
        return 2 * (self.nu + 1) * x * (3 * a - x * x) / (a + x * x) ** 3

    def pdf(self, x):
        arr = _finite(x)
        return _out(self._pdf(arr), x)

    def logpdf(self, x):
        arr = _finite(x)
        return _out(np.log(self._pdf(arr)), x)

    def score(self, x):
        """``M_f(x) = f'(x)/f(x)``, vectorized."""
        arr = _finite(x)
        return _out(self._score(arr), x)

    def score_derivs(self, x):
        """First and second derivative of the score at ``x``."""
        arr = _finite(x)
        return _out(self._score_d1(arr), x), _out(self._score_d2(arr), x)

    def nf(self, x):
        arr = _finite(x)
        return _out(1.0 + arr * self._score(arr), x)

    def nf_deriv(self, x):
        # d/dx [1 + x M(x)] = M(x) + x M'(x)
        arr = _finite(x)
        return _out(self._score(arr) + arr * self._score_d1(arr), x)

    def fisher_moment(self, j: int) -> float:
        if j not in (0, 1, 2):
            raise DomainError(f"fisher moment index must be 0, 1 or 2, got {j}")
        return self.moments[j]

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        return rng.standard_t(self.nu, size) * math.sqrt(self._a / self.nu)


@dataclass(frozen=True)
class RegularityReport:
    family: str
    values: tuple[float, ...]
    targets: tuple[float, ...]
    normalization: tuple[float, float, float]
    tail_mass: dict[str, float]
    tol: float

    @property
    def residuals(self) -> tuple[float, ...]:
        return tuple(v - t for v, t in zip(self.values, self.targets))

    @property
    def flagged(self) -> tuple[str, ...]:
        """``I_j`` whose integrand mass beyond ``|x| > TAIL_CUTOFF`` exceeds the tolerance."""
        return tuple(k for k, v in self.tail_mass.items() if k.startswith("I_") and v > self.tol)

    @property
    def ok(self) -> bool:
        return max(abs(r) for r in self.residuals) < self.tol


D4_TARGETS = (0.0, -1.0, 0.0, 0.0, 2.0)


def check_regularity(family: ScoreFamily, tol: float = 1e-6) -> RegularityReport:
    """Evaluate the five moment identities a regular location-scale family satisfies.

    ``E M = 0``, ``E eps M = -1``, ``E (M' + M^2) = 0``,
    ``E eps (M' + M^2) = 0`` and ``E eps^2 (M' + M^2) = 2``.
    Also returns the density normalization (mass, mean, variance) and the
    tail mass of each ``I_j`` integrand past ``TAIL_CUTOFF``.
    """
    f, M, dM = family._pdf, family._score, family._score_d1
    integrands = (
        lambda x: M(x) * f(x),
        lambda x: x * M(x) * f(x),
        lambda x: (dM(x) + M(x) ** 2) * f(x),
        lambda x: x * (dM(x) + M(x) ** 2) * f(x),
        lambda x: x * x * (dM(x) + M(x) ** 2) * f(x),
    )
    values = tuple(_quad(g, f"D4.{k + 1}") for k, g in enumerate(integrands))
    norm = (
        _quad(f, "mass"),
        _quad(lambda x: x * f(x), "mean"),
        _quad(lambda x: x * x * f(x), "variance"),
    )
    tail = {}
    for j in range(3):
        g = lambda x, j=j: abs(x) ** j * M(x) ** 2 * f(x)
        tail[f"I_{j}"] = 2 * integrate.quad(g, TAIL_CUTOFF, np.inf, epsabs=1e-14, limit=200)[0]
    tail["variance"] = 2 * integrate.quad(lambda x: x * x * f(x), TAIL_CUTOFF, np.inf,
                                          epsabs=1e-14, limit=200)[0]
    return RegularityReport(family.label, values, D4_TARGETS, norm, tail, tol)
