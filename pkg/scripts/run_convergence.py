"""Error-order tables for A_1 and A_2 in every mean mode; CSVs go to results/."""

import argparse
from pathlib import Path

from randivp.harness import CONVERGE_HEADER, ExperimentSpec, convergence_study, converge_rows, write_csv

STUDIES = {
    "a1_exp_growth": ExperimentSpec("exp_growth", level=1, r=2, n_grid=(4, 8, 16, 32)),
    "a2_rand_exact_exp_growth": ExperimentSpec("exp_growth", level=2, n_grid=(2, 3, 4, 6)),
    "a2_rand_exact_logistic": ExperimentSpec("logistic", level=2, n_grid=(2, 3, 4, 6)),
    "a2_rand_mom_logistic": ExperimentSpec(
        "logistic", level=2, n_grid=(2, 3, 4, 6), mean_mode="randomized", repetitions=20
    ),
    "a2_quant_exact_logistic": ExperimentSpec("logistic", setting="QUANT", level=2, n_grid=(2, 4, 8, 12)),
    "a2_quant_adversarial_logistic": ExperimentSpec(
        "logistic", setting="QUANT", level=2, n_grid=(2, 4, 8, 12),
        mean_mode="quantum_sim", perturbation="adversarial_sign", seed=1,
    ),
    "a3_rand_exact_exp_growth": ExperimentSpec("exp_growth", level=3, n_grid=(1, 2, 3)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--only", nargs="*", choices=sorted(STUDIES))
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.only or STUDIES:
        res = convergence_study(STUDIES[name])
        write_csv(CONVERGE_HEADER, converge_rows(res), out / f"{name}.csv")
        print(f"{name:32s} {res.note}")


if __name__ == "__main__":
    main()
