"""Empirical power of the three test flavors for the ARCH-type model.

The data have conditional variance 1 + beta B(Y_{t-1}) with B = 2/(1+x^2).

    python3 scripts/power_arch.py --replicates 1000 --out results
"""
import argparse
from pathlib import Path

from lantest.cli import emit_outputs
from lantest.dgp import ModelConfig
from lantest.mc import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default="30,68,100")
    ap.add_argument("--theta", type=float, default=0.6)
    ap.add_argument("--replicates", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = ExperimentConfig(ModelConfig("arch", theta=args.theta),
                           ns=tuple(int(n) for n in args.ns.split(",")),
                           replicates=args.replicates, seed=args.seed)
    curve = run_experiment(cfg)
    print(curve.to_csv(), end="")
    for path in emit_outputs(curve, args.out, "arch"):
        print("wrote", path)


if __name__ == "__main__":
    main()
