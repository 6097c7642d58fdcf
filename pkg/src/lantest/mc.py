"""Monte Carlo harness: seeds, replicate loops, aggregation and oracles.

Every replicate draws from a seed derived from ``(master, replicate, stream)``,
so results do not depend on execution order. Within a replicate all
estimator flavors see the same path; the extended-sample estimator uses a
longer realization of the same process whose first ``n`` values are the
test sample.
"""
from __future__ import annotations

import hashlib
import io
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .central import central, ws_correct
from .dgp import ModelConfig, Perturbation, simulate
from .errors import DomainError, ExperimentError, LanError
from .estimate import (SEstimatorConfig, ci_simultaneous, ci_univariate, fit_ar1_lse,
                       fit_arm_lse)
from .testbench import FLAVORS, np_decide, theoretical_power

log = logging.getLogger(__name__)

MAX_FAILURE_RATE = 0.01
CSV_HEADER = "n,flavor,rejections,replicates,power,mc_se,tau2_mean,theory_tau,theory_tau2"


def derive_seed(master: int, replicate: int, stream: str) -> int:
    """64-bit seed for one replicate and one named random stream."""
    key = struct.pack("<QQ", master % 2**64, replicate) + stream.encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig
    ns: tuple[int, ...]
    replicates: int
    level: float = 0.05
    sest: SEstimatorConfig = field(default_factory=SEstimatorConfig)
    flavors: tuple[str, ...] = FLAVORS
    seed: int = 0
    hypothesis: str = "H1n"
    tau_moments: str = "empirical"
    # functions used by the statistic; None means "same as the model's"
    test_G: Perturbation | None = None
    test_L: Perturbation | None = None

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        object.__setattr__(self, "flavors", tuple(self.flavors))
        if self.replicates < 1:
            raise DomainError("replicates must be at least 1")
        if not self.ns:
            raise DomainError("sample-size grid is empty")
        if not self.flavors:
            raise DomainError("no estimator flavors selected")
        bad = set(self.flavors) - set(FLAVORS)
        if bad:
            raise DomainError(f"unknown flavors {sorted(bad)}")
        if self.hypothesis not in ("H0", "H1n"):
            raise DomainError(f"hypothesis must be H0 or H1n, got {self.hypothesis!r}")
        if not 0 < self.level < 1:
            raise DomainError(f"level must lie in (0, 1), got {self.level}")
        m = self.model.order
        for n in self.ns:
            if n <= 2 * m:
                raise DomainError(f"sample size {n} too small for order {m}")

    @property
    def G(self) -> Perturbation:
        return self.test_G or self.model.G

    @property
    def L(self) -> Perturbation:
        return self.test_L or self.model.L


def _fit(y: np.ndarray, m: int) -> np.ndarray:
    return (fit_ar1_lse(y) if m == 1 else fit_arm_lse(y, m)).theta


@dataclass
class FlavorRecord:
    """Per-replicate output for one ``(n, flavor)`` cell; NaN marks failures."""

    v: np.ndarray
    tau2: np.ndarray
    reject: np.ndarray
    theta: np.ndarray
    failures: list[tuple[int, str]] = field(default_factory=list)

    @classmethod
    def empty(cls, R: int, m: int) -> "FlavorRecord":
        return cls(np.full(R, np.nan), np.full(R, np.nan), np.zeros(R, dtype=bool),
                   np.full((R, m), np.nan))

    @property
    def ok(self) -> np.ndarray:
        return ~np.isnan(self.v)


def collect(cfg: ExperimentConfig) -> dict[tuple[int, str], FlavorRecord]:
    """Run all replicates and keep per-replicate statistics."""
    m = cfg.model.order
    theta_true = np.asarray(cfg.model.theta)
    R = cfg.replicates
    records = {}
    for n in cfg.ns:
        model = cfg.model.under(cfg.hypothesis, n)
        N = cfg.sest.N(n) if "sestimator" in cfg.flavors else n
        cells = {fl: FlavorRecord.empty(R, m) for fl in cfg.flavors}
        for rep in range(R):
            seed = derive_seed(cfg.seed, rep, f"path/{n}")
            try:
                long_y = simulate(model, N, seed).y
            except LanError as exc:
                for cell in cells.values():
                    cell.failures.append((rep, f"simulation: {exc}"))
                continue
            y = long_y[:n]
            for fl, cell in cells.items():
                try:
                    if fl == "oracle":
                        th = theta_true
                    elif fl == "lse":
                        th = _fit(y, m)
                    else:
                        th = _fit(long_y, m)
                    ev = central(cfg.model.kind, y, th, cfg.G, cfg.L, cfg.model.score,
                                 cfg.tau_moments)
                    out = np_decide(ev, cfg.level, fl)
                except LanError as exc:
                    cell.failures.append((rep, f"{type(exc).__name__}: {exc}"))
                    continue
                cell.v[rep] = ev.v
                cell.tau2[rep] = ev.tau2
                cell.reject[rep] = out.reject
                cell.theta[rep] = th
        for fl, cell in cells.items():
            if len(cell.failures) > MAX_FAILURE_RATE * R:
                raise ExperimentError(
                    f"n={n} flavor={fl}: {len(cell.failures)}/{R} replicates failed; "
                    f"first: {cell.failures[0][1]}")
            if cell.failures:
                log.warning("n=%d flavor=%s: %d replicate failures", n, fl, len(cell.failures))
            records[(n, fl)] = cell
    return records


@dataclass(frozen=True)
class PowerPoint:
    n: int
    flavor: str
    rejections: int
    replicates: int
    failures: int
    power: float
    mc_se: float
    tau2_mean: float
    theory_tau: float
    theory_tau2: float

    @property
    def degenerate(self) -> bool:
        """Zero MC standard error (single replicate or all-or-nothing outcome)."""
        return self.mc_se == 0.0


@dataclass(frozen=True)
class PowerCurve:
    points: tuple[PowerPoint, ...]
    config: ExperimentConfig | None = None

    def __post_init__(self):
        keys = [(p.n, p.flavor) for p in self.points]
        if len(set(keys)) != len(keys):
            raise DomainError("duplicate (n, flavor) entries in power curve")

    def get(self, n: int, flavor: str) -> PowerPoint:
        for p in self.points:
            if p.n == n and p.flavor == flavor:
                return p
        raise KeyError((n, flavor))

    @property
    def ns(self) -> tuple[int, ...]:
        return tuple(sorted({p.n for p in self.points}))

    @property
    def flavors(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(p.flavor for p in self.points))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for p in self.points:
            row = [str(p.n), p.flavor, str(p.rejections), str(p.replicates)]
            row += [repr(float(x)) for x in (p.power, p.mc_se, p.tau2_mean, p.theory_tau,
                                             p.theory_tau2)]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def aggregate(records: dict[tuple[int, str], FlavorRecord], level: float,
              config: ExperimentConfig | None = None) -> PowerCurve:
    points = []
    for (n, fl), cell in records.items():
        ok = cell.ok
        R = int(ok.sum())
        rej = int(cell.reject[ok].sum())
        p = rej / R if R else float("nan")
        se = math.sqrt(p * (1 - p) / R) if R else float("nan")
        t2 = float(cell.tau2[ok].mean()) if R else float("nan")
        th = ((theoretical_power(t2, level, "tau"), theoretical_power(t2, level, "tau2"))
              if R else (float("nan"), float("nan")))
        points.append(PowerPoint(n, fl, rej, R, len(cell.failures), p, se, t2, *th))
    return PowerCurve(tuple(points), config)


def run_experiment(cfg: ExperimentConfig) -> PowerCurve:
    return aggregate(collect(cfg), cfg.level, cfg)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float
    level: float

    @property
    def passed(self) -> bool:
        return self.pvalue >= self.level


def ks_normality(samples, scale=None, level: float = 0.01) -> KSResult:
    """One-sample KS test of ``samples / scale`` against N(0, 1)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 100:
        raise DomainError(f"KS check needs at least 100 samples, got {x.size}")
    if scale is not None:
        x = x / np.asarray(scale, dtype=float)
    res = stats.kstest(x, "norm")
    return KSResult(float(res.statistic), float(res.pvalue), level)


def grad_fd_check(kind: str, path, theta, G, L, score, step: float = 1e-5) -> float:
    """Largest central-difference discrepancy of the analytic gradient.

    Discrepancies are scaled by the largest absolute gradient component
    (floored at 1), so flat directions do not inflate the ratio.
    """
    if not step > 0:
        raise DomainError("step must be positive")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    analytic = central(kind, path, theta, G, L, score).grad
    fd = np.empty_like(theta)
    for k in range(len(theta)):
        up, dn = theta.copy(), theta.copy()
        up[k] += step
        dn[k] -= step
        fd[k] = (central(kind, path, up, G, L, score).v
                 - central(kind, path, dn, G, L, score).v) / (2 * step)
    diff = np.abs(analytic - fd).max()
    if diff == 0.0:
        return 0.0
    return float(diff / max(1.0, np.abs(analytic).max()))


@dataclass(frozen=True)
class CoverageResult:
    coverage: np.ndarray
    replicates: int

    @property
    def mc_se(self) -> np.ndarray:
        return np.sqrt(self.coverage * (1 - self.coverage) / self.replicates)


def coverage_study(model: ModelConfig, n: int, replicates: int, level: float = 0.95,
                   seed: int = 0, method: str = "simultaneous") -> CoverageResult:
    """Fraction of replicates whose interval holds the true coefficient."""
    m = model.order
    truth = np.asarray(model.theta)
    hits = np.zeros(m)
    for rep in range(replicates):
        y = simulate(model, n, derive_seed(seed, rep, "coverage")).y
        if method == "univariate":
            if m != 1:
                raise DomainError("univariate intervals need order 1")
            ivs = [ci_univariate(fit_ar1_lse(y), level)]
        elif method == "simultaneous":
            ivs = ci_simultaneous(fit_arm_lse(y, m), level)
        else:
            raise DomainError(f"unknown interval method {method!r}")
        hits += [truth[j] in iv for j, iv in enumerate(ivs)]
    return CoverageResult(hits / replicates, replicates)


@dataclass(frozen=True)
class EquivalenceRow:
    n: int
    N: int
    delta_sest: float      # median |V_n(theta) - V_n(theta_N)|
    delta_ws: float        # median |V_n(theta) - W^S_n(theta_n)|
    delta_lse: float       # median |V_n(theta) - V_n(theta_n)|
    err_sest: float        # median |theta_N - theta|
    err_scaled: float      # median n^(S/4 + 1/2) |theta_N - theta|
    c0_failures: int


def equivalence_study(model: ModelConfig, ns, replicates: int,
                      sest: SEstimatorConfig | None = None, seed: int = 0,
                      G: Perturbation | None = None, L: Perturbation | None = None
                      ) -> list[EquivalenceRow]:
    """Medians of the gaps between true, estimated and corrected central sequences."""
    sest = sest or SEstimatorConfig()
    G = G or model.G
    L = L or model.L
    m = model.order
    truth = np.asarray(model.theta)
    rows = []
    for n in ns:
        N = sest.N(n)
        d_s, d_w, d_l, e_s = [], [], [], []
        c0 = 0
        for rep in range(replicates):
            long_y = simulate(model, N, derive_seed(seed, rep, f"equivalence/{n}")).y
            y = long_y[:n]
            th_n, th_N = _fit(y, m), _fit(long_y, m)
            v_true = central(model.kind, y, truth, G, L, model.score).v
            at_fit = central(model.kind, y, th_n, G, L, model.score)
            v_N = central(model.kind, y, th_N, G, L, model.score).v
            d_s.append(abs(v_true - v_N))
            d_l.append(abs(v_true - at_fit.v))
            e_s.append(float(np.abs(th_N - truth).max()))
            try:
                d_w.append(abs(v_true - ws_correct(at_fit, th_n, th_N)))
            except LanError:
                c0 += 1
        e_s = np.asarray(e_s)
        rows.append(EquivalenceRow(
            n, N, float(np.median(d_s)), float(np.median(d_w)) if d_w else float("nan"),
            float(np.median(d_l)), float(np.median(e_s)),
            float(np.median(n ** (sest.S / 4 + 0.5) * e_s)), c0))
    return rows


def write_csv(curve: PowerCurve, dest) -> Path:
    dest = Path(dest)
    dest.write_text(curve.to_csv())
    return dest
