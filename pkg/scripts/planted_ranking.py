"""Survey of the planted-quadratic ranking over seeds and curvature strengths.

For each (quadratic strength, seed) it fits all six models on one synthetic
dataset and prints all-rows RMSE plus how many curvature-capable models beat
MLR. Used to pick the setting of the acceptance test.

    python scripts/planted_ranking.py --quadratic 5000 --noise 30 --seeds 10
"""

import argparse

import numpy as np

from airdemand.data import make_split, synthesize
from airdemand.models.anfis import fit_anfis
from airdemand.models.ann import fit_ann
from airdemand.models.ga import GaConfig, fit_ga
from airdemand.models.mlr import fit_mlr
from airdemand.models.rtree import fit_tree
from airdemand.models.svr import fit_svr

FITTERS = {
    "MLR": fit_mlr,
    "ANN": fit_ann,
    "ANFIS": fit_anfis,
    "SVR": fit_svr,
    "GAq": lambda ds, plan: fit_ga(ds, plan, GaConfig(form="quadratic")),
    "RT": fit_tree,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quadratic", type=float, nargs="+", default=[5000.0])
    ap.add_argument("--noise", type=float, default=30.0)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    for q in args.quadratic:
        wins = dict.fromkeys(FITTERS, 0)
        print(f"quadratic={q:g} noise={args.noise:g}")
        for seed in range(args.seeds):
            ds, _ = synthesize(42, seed, args.noise, q)
            plan = make_split(42, seed=seed)
            scores = {
                name: float(np.sqrt(np.mean((fit(ds, plan).predict(ds.predictors) - ds.target) ** 2)))
                for name, fit in FITTERS.items()
            }
            beat = [k for k in scores if k != "MLR" and scores[k] < scores["MLR"]]
            for k in beat:
                wins[k] += 1
            print(f"  seed {seed}: " + "  ".join(f"{k} {v:7.0f}" for k, v in scores.items()) + f"   beat MLR: {len(beat)}/5")
        print("  wins over MLR: " + ", ".join(f"{k} {wins[k]}/{args.seeds}" for k in FITTERS if k != "MLR"))


if __name__ == "__main__":
    main()
