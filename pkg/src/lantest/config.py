"""Flat ``key=value`` experiment configuration.

Lines hold whitespace-separated ``key=value`` tokens; ``#`` starts a comment,
``[section]`` headers are allowed for readability and otherwise ignored,
list values are comma-separated. Example::

    model=ar1 theta=0.6 n=30,49,52 replicates=50
"""
from __future__ import annotations

import shlex
from dataclasses import replace

from .dgp import ModelConfig, Perturbation
from .errors import ConfigError, LanError
from .estimate import SEstimatorConfig
from .mc import ExperimentConfig
from .scores import ScoreFamily

REQUIRED = ("model", "theta", "n", "replicates")

KEYS = {
    "model": "ar1 | arch | arm",
    "theta": "comma-separated AR coefficients",
    "n": "comma-separated sample sizes",
    "replicates": "Monte Carlo replicates per sample size",
    "alpha": "test level (default 0.05)",
    "S": "extended-sample exponent (default 1)",
    "shift": "N = floor(1 + n^(S + shift)) (default 1)",
    "burn_in": "discarded warm-up steps (default 500)",
    "G": "location perturbation, e.g. rational or 2*rational (default rational)",
    "L": "scale perturbation used by the statistic (default rational)",
    "B": "ARCH variance perturbation (default 2*rational)",
    "test_G": "G used by the statistic when it differs from the data-generating G",
    "test_L": "L used by the statistic when it differs from the data-generating L",
    "score": "gaussian | student_t (default gaussian)",
    "nu": "degrees of freedom for student_t",
    "flavors": "subset of oracle,lse,sestimator (default all)",
    "hypothesis": "H0 | H1n (default H1n)",
    "tau_moments": "empirical | theoretical (default empirical)",
    "seed": "master seed (default 0)",
    "level": "confidence level for interval subcommands (default 0.95)",
}


def parse_pairs(text: str) -> dict[str, tuple[str, int]]:
    """Return ``{key: (raw value, line number)}``."""
    out: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        for tok in shlex.split(line):
            if "=" not in tok:
                raise ConfigError(f"expected key=value, got {tok!r}", lineno)
            key, value = (s.strip() for s in tok.split("=", 1))
            if key not in KEYS:
                raise ConfigError(f"unknown key {key!r}", lineno)
            if key in out:
                raise ConfigError(f"duplicate key {key!r}", lineno)
            out[key] = (value, lineno)
    return out


def _conv(pairs, key, fn, default=None):
    if key not in pairs:
        return default
    value, line = pairs[key]
    try:
        return fn(value)
    except (ValueError, LanError) as exc:
        raise ConfigError(f"invalid value for {key}: {value!r} ({exc})", line) from None


def _floats(s):
    return tuple(float(x) for x in s.split(",") if x.strip())


def _ints(s):
    return tuple(int(x) for x in s.split(",") if x.strip())


def _strs(s):
    return tuple(x.strip() for x in s.split(",") if x.strip())


def parse_overrides(items) -> dict[str, tuple[str, None]]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r} in override")
        out[key] = (value, None)
    return out


def parse_config(text: str, required=REQUIRED, overrides=None) -> ExperimentConfig:
    """Validated experiment config; ``overrides`` are ``key=value`` strings
    applied after the file."""
    pairs = parse_pairs(text)
    pairs.update(parse_overrides(overrides))
    missing = [k for k in required if k not in pairs]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    kind = _conv(pairs, "model", str, "ar1")
    score_kind = _conv(pairs, "score", str, "gaussian")
    nu = _conv(pairs, "nu", float)
    try:
        score = ScoreFamily(score_kind, nu)
    except LanError as exc:
        line = pairs.get("score", pairs.get("nu", (None, None)))[1]
        raise ConfigError(str(exc), line) from None
    model_kw = dict(
        kind=kind,
        theta=_conv(pairs, "theta", _floats, (0.6,)),
        G=_conv(pairs, "G", Perturbation.parse, Perturbation()),
        L=_conv(pairs, "L", Perturbation.parse, Perturbation()),
        B=_conv(pairs, "B", Perturbation.parse, Perturbation("rational", 2.0)),
        score=score,
        burn_in=_conv(pairs, "burn_in", int, 500),
    )
    try:
        model = ModelConfig(**model_kw)
    except LanError as exc:
        line = pairs.get("theta", pairs.get("model", (None, None)))[1]
        raise ConfigError(str(exc), line) from None
    sest = _conv(pairs, "S", lambda s: SEstimatorConfig(float(s)), SEstimatorConfig())
    shift = _conv(pairs, "shift", int, 1)
    sest = replace(sest, shift=shift)
    kw = dict(
        model=model,
        ns=_conv(pairs, "n", _ints, (100,)),
        replicates=_conv(pairs, "replicates", int, 100),
        level=_conv(pairs, "alpha", float, 0.05),
        sest=sest,
        flavors=_conv(pairs, "flavors", _strs, ("oracle", "lse", "sestimator")),
        seed=_conv(pairs, "seed", int, 0),
        hypothesis=_conv(pairs, "hypothesis", str, "H1n"),
        tau_moments=_conv(pairs, "tau_moments", str, "empirical"),
        test_G=_conv(pairs, "test_G", Perturbation.parse),
        test_L=_conv(pairs, "test_L", Perturbation.parse),
    )
    if kw["tau_moments"] not in ("empirical", "theoretical"):
        raise ConfigError("tau_moments must be empirical or theoretical",
                          pairs["tau_moments"][1])
    try:
        return ExperimentConfig(**kw)
    except LanError as exc:
        raise ConfigError(str(exc)) from None


def config_level(text: str, default: float = 0.95, overrides=None) -> float:
    pairs = parse_pairs(text)
    pairs.update(parse_overrides(overrides))
    return _conv(pairs, "level", float, default)


def render_config(cfg: ExperimentConfig) -> str:
    """Inverse of ``parse_config`` for every field it sets."""
    m = cfg.model
    lines = [
        f"model={m.kind}",
        "theta=" + ",".join(repr(t) for t in m.theta),
        "n=" + ",".join(str(n) for n in cfg.ns),
        f"replicates={cfg.replicates}",
        f"alpha={cfg.level!r}",
        f"S={cfg.sest.S!r}",
        f"shift={cfg.sest.shift}",
        f"burn_in={m.burn_in}",
        f"G={m.G}",
        f"L={m.L}",
        f"B={m.B}",
        f"score={m.score.kind}",
    ]
    if m.score.nu is not None:
        lines.append(f"nu={m.score.nu!r}")
    if cfg.test_G is not None:
        lines.append(f"test_G={cfg.test_G}")
    if cfg.test_L is not None:
        lines.append(f"test_L={cfg.test_L}")
    lines += [
        "flavors=" + ",".join(cfg.flavors),
        f"hypothesis={cfg.hypothesis}",
        f"tau_moments={cfg.tau_moments}",
        f"seed={cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
