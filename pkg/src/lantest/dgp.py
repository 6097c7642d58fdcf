"""Simulation of perturbed AR(1), ARCH-type and AR(m) paths.

All three models share one recursion

    Y_t = sum_j theta_j Y_{t-j} + alpha G(Y_{t-1}) + s_t eps_t

with ``s_t = 1`` (AR(1)/AR(m) location alternatives),
``s_t = sqrt(1 + beta B(Y_{t-1}))`` (ARCH) or ``s_t = 1 + beta L(Y_{t-1})``
(AR(m) with a scale alternative). The perturbations act on the first lag.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import _kernels as K
from .errors import DomainError, NumericError, StationarityError
from .scores import ScoreFamily

MODEL_KINDS = ("ar1", "arch", "arm")


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


# name -> (kernel code, numpy implementation)
PERTURBATIONS: dict[str, tuple[int, Callable]] = {
    "zero": (K.ZERO, _zero),
    "rational": (K.RATIONAL, lambda x: 1.0 / (1.0 + np.square(x))),
    "gauss": (K.GAUSS, lambda x: np.exp(-0.5 * np.square(x))),
    "tanh": (K.TANH, np.tanh),
    "one": (K.ONE, _one),
}


@dataclass(frozen=True)
class Perturbation:
    """A named scalar function times a constant, e.g. ``2*rational``."""

    name: str = "rational"
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in PERTURBATIONS:
            raise DomainError(f"unknown perturbation {self.name!r}; "
                              f"choose from {sorted(PERTURBATIONS)}")
        object.__setattr__(self, "scale", float(self.scale))

    @classmethod
    def parse(cls, text: str) -> "Perturbation":
        text = text.strip()
        if "*" in text:
            coef, name = text.split("*", 1)
            try:
                scale = float(coef)
            except ValueError:
                raise DomainError(f"bad perturbation coefficient in {text!r}") from None
            return cls(name.strip(), scale)
        return cls(text)

    def __str__(self):
        return self.name if self.scale == 1.0 else f"{self.scale!r}*{self.name}"

    def __call__(self, x):
        return self.scale * PERTURBATIONS[self.name][1](x)

    @property
    def code(self) -> int:
        return PERTURBATIONS[self.name][0]

    @property
    def is_zero(self) -> bool:
        return self.name == "zero" or self.scale == 0.0


@dataclass(frozen=True)
class StationarityReport:
    stationary: bool
    root_moduli: tuple[float, ...]

    def __bool__(self):
        return self.stationary


def check_stationarity(theta) -> StationarityReport:
    """Roots of ``1 - theta_1 z - ... - theta_m z^m`` must all lie outside the unit disc."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size == 0:
        raise DomainError("empty coefficient vector")
    # roots are reciprocals of the companion-matrix eigenvalues; this avoids
    # np.roots dividing by a tiny leading coefficient
    m = theta.size
    comp = np.zeros((m, m))
    comp[0] = theta
    comp[1:, :-1] = np.eye(m - 1)
    lam = np.abs(np.linalg.eigvals(comp))
    with np.errstate(divide="ignore", over="ignore"):
        moduli = tuple(sorted(float(1.0 / v) for v in lam))
    return StationarityReport(all(r > 1.0 for r in moduli), moduli)


@dataclass(frozen=True)
class ModelConfig:
    kind: str = "ar1"
    theta: tuple[float, ...] = (0.6,)
    alpha: float = 0.0
    beta: float = 0.0
    G: Perturbation = field(default_factory=Perturbation)
    L: Perturbation = field(default_factory=Perturbation)
    B: Perturbation = field(default_factory=lambda: Perturbation("rational", 2.0))
    score: ScoreFamily = field(default_factory=ScoreFamily.gaussian)
    burn_in: int = 500

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DomainError(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        theta = tuple(float(t) for t in np.atleast_1d(self.theta))
        object.__setattr__(self, "theta", theta)
        if self.kind in ("ar1", "arch") and len(theta) != 1:
            raise DomainError(f"{self.kind} takes a scalar theta, got {len(theta)} values")
        report = check_stationarity(theta)
        if not report:
            raise StationarityError(
                f"theta={theta} is not stationary (root moduli {report.root_moduli})")
        if self.burn_in < 0:
            raise DomainError("burn_in must be non-negative")

    @property
    def order(self) -> int:
        return len(self.theta)

    def under(self, hypothesis: str, n: int) -> "ModelConfig":
        """Copy with amplitudes set for ``H0`` (zero) or ``H1n`` (``n**-0.5``)."""
        if hypothesis == "H0":
            return replace(self, alpha=0.0, beta=0.0)
        if hypothesis == "H1n":
            amp = 1.0 / math.sqrt(n)
            return replace(self, alpha=amp, beta=amp)
        raise DomainError(f"hypothesis must be H0 or H1n, got {hypothesis!r}")


@dataclass(frozen=True, eq=False)
class SeriesPath:
    y: np.ndarray
    innovations: np.ndarray
    config: ModelConfig | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.y)

    def head(self, n: int) -> "SeriesPath":
        return SeriesPath(self.y[:n], self.innovations[:n], self.config, self.seed)

    @classmethod
    def from_values(cls, y) -> "SeriesPath":
        y = np.asarray(y, dtype=float)
        return cls(y, np.full_like(y, np.nan))


def _simulate(config: ModelConfig, n: int, seed: int, scale_mode: int,
              scale_fn: Perturbation) -> SeriesPath:
    m = config.order
    if n < m + 1:
        raise DomainError(f"path length must be at least {m + 1}, got {n}")
    rng = np.random.default_rng(seed)
    total = m + config.burn_in + n
    eps = config.score.draw(rng, total)
    out = np.empty(total)
    bad = K.recurse(np.asarray(config.theta), eps, config.alpha, config.G.code, config.G.scale,
                    config.beta, scale_fn.code, scale_fn.scale, scale_mode, out)
    if bad >= 0:
        raise NumericError(f"conditional scale became non-positive at step {bad}")
    start = m + config.burn_in
    return SeriesPath(out[start:], eps[start:], config, seed)


def simulate_ar1(config: ModelConfig, n: int, seed: int) -> SeriesPath:
    if config.order != 1:
        raise DomainError("simulate_ar1 needs a scalar theta")
    return _simulate(config, n, seed, K.SCALE_NONE, config.B)


def simulate_arch(config: ModelConfig, n: int, seed: int) -> SeriesPath:
    """Exact ``sqrt(1 + beta B(Y_{t-1}))`` scale, no linearization."""
    if config.order != 1:
        raise DomainError("simulate_arch needs a scalar theta")
    return _simulate(config, n, seed, K.SCALE_SQRT, config.B)


def simulate_arm(config: ModelConfig, n: int, seed: int) -> SeriesPath:
    return _simulate(config, n, seed, K.SCALE_LINEAR, config.L)


def simulate(config: ModelConfig, n: int, seed: int) -> SeriesPath:
    fn = {"ar1": simulate_ar1, "arch": simulate_arch, "arm": simulate_arm}[config.kind]
    return fn(config, n, seed)


def write_path_csv(path: SeriesPath | np.ndarray, dest) -> Path:
    y = path.y if isinstance(path, SeriesPath) else np.asarray(path, dtype=float)
    dest = Path(dest)
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "y"])
        for i, v in enumerate(y):
            w.writerow([i, format(float(v), ".17g")])
    return dest


def read_path_csv(src) -> np.ndarray:
    with Path(src).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["index", "y"]:
        raise DomainError(f"{src}: expected header 'index,y'")
    return np.array([float(r[1]) for r in rows[1:]])
