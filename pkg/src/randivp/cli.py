"""Command-line driver.

    randivp converge --problem exp_growth --level 2 --r 1 --n-grid 2,3,4,6 --out conv.csv
    randivp cost --setting quant --level 2 --mean-mode quantum-sim --n-grid 2,4,8,12
    randivp plan --epsilon 1e-3 --gamma 0.5 --r 1 --rho 1
    randivp exponents --level 6 --r 2 --rho 1

Options may also come from ``--config FILE`` holding ``key=value`` lines with
the same keys as the flags; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    GridMismatch,
    InvalidPlan,
    InvalidRequest,
    InvalidSpec,
    JetError,
    OracleFailure,
    UnknownProblem,
)
from .harness import (
    CONVERGE_HEADER,
    COST_HEADER,
    ExperimentSpec,
    convergence_study,
    converge_rows,
    cost_study,
    write_csv,
)
from .piecewise import sup_norm_distance
from .problems import NAMES, builtin
from .solver import alpha_exponent, beta_exponent, plan_for_epsilon, psi_count, solve_As

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

MEAN_MODES = {"exact": "exact", "randomized": "randomized", "quantum-sim": "quantum_sim"}
PERTURBATIONS = {"none": "none", "uniform": "uniform_random", "adversarial": "adversarial_sign"}


def _grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n grid {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file with default option values")
    p.add_argument("--problem", default="exp_growth", choices=NAMES)
    p.add_argument("--setting", default="rand", choices=["rand", "quant"])
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="top level for delta_1 (default: level)")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--n-grid", type=_grid, default=(4, 8, 16, 32))
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--mean-mode", default="exact", choices=list(MEAN_MODES))
    p.add_argument("--perturbation", default="none", choices=list(PERTURBATIONS))
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--K", type=float, default=1.0, dest="K")
    p.add_argument("--cbar", type=float, default=1.0)
    p.add_argument("--bound-g", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples-per-piece", type=int, default=8)
    p.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 (byte-stable CSV)")
    p.add_argument("--out", default=None)
    return p


def build_parser(defaults: dict[str, str] | None = None) -> argparse.ArgumentParser:
    common = _common()
    if defaults:
        dests = {a.dest for a in common._actions}
        unknown = sorted(set(defaults) - dests)
        if unknown:
            raise InvalidSpec(f"unknown config keys: {', '.join(unknown)}")
        common.set_defaults(**defaults)
    parser = argparse.ArgumentParser(prog="randivp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="run A_s once at --n")
    sub.add_parser("converge", parents=[common], help="sup error vs n, fitted order")
    sub.add_parser("cost", parents=[common], help="charged queries vs n, fitted exponent")
    sub.add_parser("plan", parents=[common], help="level, n and delta for a target error")
    sub.add_parser("exponents", parents=[common], help="alpha_s, beta_s and psi for s <= level")
    return parser


def read_config(path: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, keys use flag spelling."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidSpec(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def parse_args(argv=None) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    defaults = read_config(known.config) if known.config else None
    return build_parser(defaults).parse_args(argv)


def spec_from_args(args) -> ExperimentSpec:
    return ExperimentSpec(
        problem=args.problem,
        setting=args.setting.upper(),
        level=args.level,
        n_grid=args.n_grid,
        repetitions=args.reps,
        mean_mode=MEAN_MODES[args.mean_mode],
        perturbation=PERTURBATIONS[args.perturbation],
        r=args.r,
        rho=args.rho,
        k=args.k,
        gamma=args.gamma,
        delta=args.delta,
        epsilon=args.epsilon,
        bound_G=args.bound_g,
        seed=args.seed,
        samples_per_piece=args.samples_per_piece,
        timing=not args.no_timing,
        out=args.out,
    )


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)


def cmd_solve(args, spec: ExperimentSpec) -> None:
    named = builtin(spec.problem)
    poly, ledger = solve_As(named.problem, spec.config(args.n))
    err = sup_norm_distance(poly, named.reference_solution, spec.samples_per_piece)
    print(f"problem={named.name} setting={spec.setting} level={spec.level} n={args.n}")
    print(f"pieces={poly.pieces} sup_error={err!r}")
    print(
        f"charged_queries={ledger.charged_queries} actual_evaluations={ledger.actual_evaluations} "
        f"classical_derivative_evals={ledger.classical_derivative_evals}"
    )
    if spec.out:
        poly.to_csv(spec.out)


def cmd_converge(args, spec: ExperimentSpec) -> None:
    result = convergence_study(spec)
    _emit(write_csv(CONVERGE_HEADER, converge_rows(result), spec.out), spec.out)
    print(result.note, file=sys.stderr)


def cmd_cost(args, spec: ExperimentSpec) -> None:
    result = cost_study(spec)
    _emit(write_csv(COST_HEADER, result.rows, spec.out), spec.out)
    print(result.note, file=sys.stderr)
    if not result.extra["formula_ok"]:
        raise GridMismatch("ledger does not match the schedule formula")


def cmd_plan(args, spec: ExperimentSpec) -> None:
    plan = plan_for_epsilon(
        spec.epsilon, spec.gamma, K=args.K, Cbar=args.cbar, q=spec.r + spec.rho,
        setting=spec.setting, delta=spec.delta,
    )
    print(f"k={plan.k} n={plan.n} delta={plan.delta!r} alpha_k={plan.alpha:g} beta_k={plan.beta}")


def cmd_exponents(args, spec: ExperimentSpec) -> None:
    q = spec.r + spec.rho
    n = max(args.n, 2)
    print(f"s,alpha_s,beta_s,beta_over_alpha,psi(n={n})")
    for s in range(1, max(spec.level, 1) + 1):
        a = alpha_exponent(s, q, spec.setting)
        b = beta_exponent(s, spec.setting)
        print(f"{s},{a:g},{b},{b / a:.6f},{psi_count(n, s, spec.setting)}")


COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "cost": cmd_cost,
    "plan": cmd_plan,
    "exponents": cmd_exponents,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        spec = spec_from_args(args)
        COMMANDS[args.command](args, spec)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code else EXIT_OK
    except (InvalidSpec, InvalidRequest, InvalidPlan, UnknownProblem, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (JetError, OracleFailure, GridMismatch, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
