"""How far the GA gets on noiseless linear data as the generation budget grows.

Prints, per budget, the GA's training RMSE next to MLR's and the worst
relative slope error on the continuous predictors. MLR's training RMSE on
noiseless data is rounding noise, which is why a '10x MLR' bound is out of
reach for any stochastic search at these budgets.

    python scripts/ga_budget.py --seed 7 --generations 200 500 2000 10000
"""

import argparse
import time

import numpy as np

from airdemand.data import make_split, synthesize
from airdemand.models.ga import GaConfig, fit_ga
from airdemand.models.mlr import fit_mlr


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--generations", type=int, nargs="+", default=[200, 500, 2000, 10000])
    ap.add_argument("--mutation-sd", type=float, default=0.1)
    args = ap.parse_args()

    ds, truth = synthesize(42, args.seed, 0.0)
    plan = make_split(42, seed=args.seed)
    X, y = ds.rows(plan.train_idx)
    mask = ds.continuous_mask
    mlr = float(np.sqrt(np.mean((fit_mlr(ds, plan).predict(X) - y) ** 2)))
    print(f"MLR training RMSE {mlr:.3g}")
    for g in args.generations:
        start = time.perf_counter()
        m = fit_ga(ds, plan, GaConfig(generations=g, mutation_sd=args.mutation_sd))
        took = time.perf_counter() - start
        _, slopes = m.raw_linear_coefficients()
        rel = np.abs(slopes - truth.coefficients)[mask] / np.abs(truth.coefficients[mask])
        rmse = float(np.sqrt(np.mean((m.predict(X) - y) ** 2)))
        print(f"{g:>7} generations  RMSE {rmse:10.4g}  ratio to MLR {rmse / mlr:9.3g}  worst slope error {rel.max():.3f}  {took:.2f}s")


if __name__ == "__main__":
    main()
