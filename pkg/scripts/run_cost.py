"""Charged-query growth against n for A_2 and A_3, checked against the schedule formula."""

import argparse
from pathlib import Path

from randivp.harness import COST_HEADER, ExperimentSpec, cost_study, write_csv

STUDIES = {
    "a2_rand_exact": ExperimentSpec("logistic", level=2, n_grid=(2, 3, 4, 6)),
    "a2_rand_mom": ExperimentSpec("logistic", level=2, n_grid=(2, 3, 4, 6), mean_mode="randomized"),
    "a2_quant_sim": ExperimentSpec(
        "logistic", setting="QUANT", level=2, n_grid=(2, 4, 8, 12), mean_mode="quantum_sim"
    ),
    "a3_rand_exact": ExperimentSpec("exp_growth", level=3, n_grid=(1, 2, 3)),
    "a3_quant_sim": ExperimentSpec(
        "logistic", setting="QUANT", level=3, n_grid=(2, 3, 4, 6), mean_mode="quantum_sim"
    ),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in STUDIES.items():
        res = cost_study(spec)
        write_csv(COST_HEADER, res.rows, out / f"cost_{name}.csv")
        print(f"{name:16s} {res.note}")


if __name__ == "__main__":
    main()
