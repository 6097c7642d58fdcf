"""Command-line front end.

    lantest <subcommand> --config FILE [--out DIR] [--set key=value ...] [--seed SEED]

Exit status: 0 success, 1 usage or configuration error, 2 numeric or
experiment error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .central import central
from .dgp import read_path_csv, simulate, write_path_csv
from .errors import ConfigError, DomainError, LanError
from .estimate import FitResult, ci_simultaneous, ci_univariate, fit_ar1_lse, fit_arm_lse
from .mc import (PowerCurve, coverage_study, derive_seed, grad_fd_check, run_experiment)
from .plotting import power_svg
from .scores import check_regularity
from .testbench import np_decide

log = logging.getLogger("lantest")

SUBCOMMANDS = ("simulate", "estimate", "test", "power", "size", "coverage",
               "check-regularity", "grad-check")
GRAD_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _timestamp() -> str:
    return time.strftime("%Y%m%dT%H%M%S")


def emit_outputs(curve: PowerCurve, out_dir, model: str, kind: str = "power",
                 timestamp: str | None = None) -> tuple[Path, Path]:
    """Write ``<kind>_<model>_<timestamp>.csv`` and the matching ``.svg``."""
    bad = [(p.n, p.flavor) for p in curve.points if p.replicates == 0]
    if bad:
        raise DomainError(f"refusing to emit a curve with zero successful replicates at {bad}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{kind}_{model}_{timestamp or _timestamp()}"
    csv_path = out_dir / f"{stem}.csv"
    svg_path = out_dir / f"{stem}.svg"
    csv_path.write_text(curve.to_csv())
    title = f"{'Power' if kind == 'power' else 'Size'}: {model} model"
    svg_path.write_text(power_svg(curve, title))
    return csv_path, svg_path


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lantest", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    keys = "\n".join(f"  {k:<12} {v}" for k, v in cfgmod.KEYS.items())
    helps = {
        "simulate": "simulate one path of length n (first grid value) and write it as CSV",
        "estimate": "least-squares fit and confidence intervals",
        "test": "one-path decision for every estimator flavor",
        "power": "Monte Carlo rejection rates under the contiguous alternative",
        "size": "Monte Carlo rejection rates under the null",
        "coverage": "Monte Carlo coverage of the confidence intervals",
        "check-regularity": "quadrature check of the score-family moment identities",
        "grad-check": "analytic gradient of V_n against central differences",
    }
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, help=helps[name], description=helps[name],
                            epilog="config keys:\n" + keys,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=Path("."))
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        dest="overrides")
        sp.add_argument("--seed", type=int)
        if name == "estimate":
            sp.add_argument("--input", type=Path, help="CSV path with header index,y")
        if name == "grad-check":
            sp.add_argument("--step", type=float, default=1e-5)
    return p


def _load(args, required=cfgmod.REQUIRED):
    if not args.config.is_file():
        raise ConfigError(f"config file {args.config} does not exist")
    text = args.config.read_text()
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return text, cfgmod.parse_config(text, required, overrides), overrides


def _path(cfg, n):
    model = cfg.model.under(cfg.hypothesis, n)
    return simulate(model, n, derive_seed(cfg.seed, 0, f"path/{n}"))


def cmd_simulate(args):
    _, cfg, _ = _load(args)
    n = cfg.ns[0]
    path = _path(cfg, n)
    args.out.mkdir(parents=True, exist_ok=True)
    dest = write_path_csv(path, args.out / f"path_{cfg.model.kind}_{_timestamp()}.csv")
    print(f"wrote {n} observations to {dest}")


def cmd_estimate(args):
    text, cfg, overrides = _load(args)
    level = cfgmod.config_level(text, overrides=overrides)
    y = read_path_csv(args.input) if args.input else _path(cfg, cfg.ns[0]).y
    m = cfg.model.order
    fit = fit_ar1_lse(y) if m == 1 else fit_arm_lse(y, m)
    ivs = [ci_univariate(fit, level)] if m == 1 else ci_simultaneous(fit, level)
    args.out.mkdir(parents=True, exist_ok=True)
    dest = args.out / f"fit_{cfg.model.kind}_{_timestamp()}.csv"
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FitResult.csv_header(m))
        w.writerow([repr(x) if isinstance(x, float) else x for x in fit.csv_row()])
    for j, iv in enumerate(ivs, start=1):
        print(f"theta_{j} = {fit.theta[j - 1]:.6f}  {level:.0%} CI [{iv.lower:.6f}, {iv.upper:.6f}]")
    print(f"sigma_hat = {fit.sigma:.6f}; wrote {dest}")


def cmd_test(args):
    _, cfg, _ = _load(args)
    n = cfg.ns[0]
    m = cfg.model.order
    N = cfg.sest.N(n) if "sestimator" in cfg.flavors else n
    long_y = _path(cfg, N).y
    y = long_y[:n]
    print(f"{'flavor':<11} {'theta':>24} {'V_n':>10} {'tau2':>9} {'stat':>9} reject")
    for fl in cfg.flavors:
        if fl == "oracle":
            th = np.asarray(cfg.model.theta)
        else:
            src = y if fl == "lse" else long_y
            th = (fit_ar1_lse(src) if m == 1 else fit_arm_lse(src, m)).theta
        ev = central(cfg.model.kind, y, th, cfg.G, cfg.L, cfg.model.score, cfg.tau_moments)
        out = np_decide(ev, cfg.level, fl)
        th_s = ",".join(f"{t:.4f}" for t in th)
        print(f"{fl:<11} {th_s:>24} {ev.v:>10.4f} {ev.tau2:>9.4f} {out.statistic:>9.4f} "
              f"{out.reject}")


def _curve(args, hypothesis):
    _, cfg, _ = _load(args)
    cfg = replace(cfg, hypothesis=hypothesis)
    curve = run_experiment(cfg)
    kind = "power" if hypothesis == "H1n" else "size"
    csv_path, svg_path = emit_outputs(curve, args.out, cfg.model.kind, kind)
    sys.stdout.write(curve.to_csv())
    print(f"wrote {csv_path} and {svg_path}")


def cmd_coverage(args):
    text, cfg, overrides = _load(args)
    level = cfgmod.config_level(text, overrides=overrides)
    method = "univariate" if cfg.model.order == 1 else "simultaneous"
    rows = []
    for n in cfg.ns:
        res = coverage_study(cfg.model, n, cfg.replicates, level, cfg.seed, method)
        for j, (c, se) in enumerate(zip(res.coverage, res.mc_se), start=1):
            rows.append((n, j, cfg.model.theta[j - 1], float(c), float(se), res.replicates))
    args.out.mkdir(parents=True, exist_ok=True)
    dest = args.out / f"coverage_{cfg.model.kind}_{_timestamp()}.csv"
    with dest.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "coordinate", "theta", "coverage", "mc_se", "replicates"])
        for r in rows:
            w.writerow([r[0], r[1], repr(r[2]), repr(r[3]), repr(r[4]), r[5]])
    for r in rows:
        print(f"n={r[0]} theta_{r[1]}: coverage {r[3]:.4f} (se {r[4]:.4f})")
    print(f"wrote {dest}")


def cmd_check_regularity(args):
    _, cfg, _ = _load(args, required=())
    rep = check_regularity(cfg.model.score)
    names = ("E M", "E eps M + 1", "E (M' + M^2)", "E eps (M' + M^2)", "E eps^2 (M' + M^2) - 2")
    print(f"family {rep.family}")
    for name, r in zip(names, rep.residuals):
        print(f"  {name:<24} {r: .3e}")
    print(f"  mass/mean/variance       {rep.normalization}")
    if rep.flagged:
        print(f"  heavy tail flagged for: {', '.join(rep.flagged)}")
    if not rep.ok:
        print("regularity residuals exceed tolerance", file=sys.stderr)
        return 2
    return 0


def cmd_grad_check(args):
    _, cfg, _ = _load(args)
    n = cfg.ns[0]
    m = cfg.model.order
    worst = 0.0
    for rep in range(cfg.replicates):
        seed = derive_seed(cfg.seed, rep, "grad-check")
        y = simulate(cfg.model, n, seed).y
        rng = np.random.default_rng(seed)
        theta = np.asarray(cfg.model.theta) + rng.uniform(-0.1, 0.1, m)
        err = grad_fd_check(cfg.model.kind, y, theta, cfg.G, cfg.L, cfg.model.score, args.step)
        worst = max(worst, err)
    print(f"max relative gradient error over {cfg.replicates} instances: {worst:.3e}")
    return 0 if worst < GRAD_TOL else 2


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "test": cmd_test,
    "power": lambda a: _curve(a, "H1n"),
    "size": lambda a: _curve(a, "H0"),
    "coverage": cmd_coverage,
    "check-regularity": cmd_check_regularity,
    "grad-check": cmd_grad_check,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"lantest: error: {exc}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args) or 0
    except ConfigError as exc:
        print(f"lantest: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lantest: {exc}", file=sys.stderr)
        return 1
    except LanError as exc:
        print(f"lantest: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
