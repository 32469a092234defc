"""Convergence and cost experiments over grids of the basic parameter."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .mean_estimation import charge_for
from .piecewise import sup_norm_distance
from .problems import NamedProblem, builtin
from .solver import (
    CostLedger,
    SolverConfig,
    alpha_exponent,
    beta_exponent,
    delta1_of,
    params_for_level,
    solve_As,
)

ERROR_FLOOR = 100 * np.finfo(float).eps
CONVERGE_HEADER = ["n", "error", "charged_queries", "actual_evaluations", "wall_ms"]
COST_HEADER = [
    "n",
    "charged_queries",
    "actual_evaluations",
    "classical_derivative_evals",
    "formula_charged_queries",
]


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str | NamedProblem = "exp_growth"
    setting: str = "RAND"
    level: int = 1
    n_grid: tuple[int, ...] = (4, 8, 16, 32)
    repetitions: int = 1
    mean_mode: str = "exact"
    perturbation: str = "none"
    r: int = 1
    rho: float = 1.0
    k: int | None = None
    gamma: float = 0.5
    delta: float = 0.1
    epsilon: float = 1e-3
    bound_G: float | None = None  # None: the problem's recommended bound
    seed: int = 0
    samples_per_piece: int = 8
    timing: bool = True
    out: str | None = None

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidSpec("n_grid must be strictly increasing")
        if grid and grid[0] < 1:
            raise InvalidSpec("n_grid entries must be >= 1")
        if self.repetitions < 1:
            raise InvalidSpec("repetitions must be >= 1")

    def named(self) -> NamedProblem:
        if isinstance(self.problem, NamedProblem):
            return self.problem
        return builtin(self.problem)

    def config(self, n: int, seed: int | None = None) -> SolverConfig:
        bound = self.bound_G if self.bound_G is not None else self.named().bound_G
        return SolverConfig(
            r=self.r,
            rho=self.rho,
            setting=self.setting,
            s=self.level,
            k=self.k,
            n=n,
            delta=self.delta,
            mean_mode=self.mean_mode,
            bound_G=bound,
            perturbation=self.perturbation,
            seed=self.seed if seed is None else seed,
        )


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    error: float
    charged_queries: int
    actual_evaluations: int
    wall_ms: float
    error_std: float = 0.0


@dataclass(frozen=True)
class ErrorStat:
    value: float
    std: float
    errors: tuple[float, ...]


@dataclass
class StudyResult:
    rows: list
    slope: float | None
    target: float
    note: str = ""
    extra: dict = field(default_factory=dict)


def repetition_seeds(seed: int, reps: int) -> list[int]:
    """Seeds of independent runs, derived from one master seed."""
    if reps == 1:
        return [seed]
    ss = np.random.SeedSequence(seed & ((1 << 64) - 1))
    return [int(x) for x in ss.generate_state(reps, dtype=np.uint64)]


def sup_errors(spec: ExperimentSpec, n: int, reps: int | None = None):
    """Sup-norm errors of independent runs at basic parameter ``n``; also the first ledger."""
    named = spec.named()
    problem = named.problem
    errors, ledger = [], None
    for seed in repetition_seeds(spec.seed, reps or spec.repetitions):
        poly, led = solve_As(problem, spec.config(n, seed))
        errors.append(sup_norm_distance(poly, named.reference_solution, spec.samples_per_piece))
        ledger = ledger or led
    return errors, ledger


def randomized_error(spec: ExperimentSpec, n: int | None = None) -> ErrorStat:
    """Root-mean-square sup error over independent seeded runs."""
    n = spec.n_grid[0] if n is None else n
    errors, _ = sup_errors(spec, n)
    e = np.asarray(errors)
    std = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
    return ErrorStat(float(np.sqrt(np.mean(e**2))), std, tuple(errors))


def empirical_quantile(errors, delta: float) -> float:
    """Smallest observed ``alpha`` with ``#{e > alpha} <= delta * len(errors)``."""
    e = np.sort(np.asarray(errors, dtype=float))
    R = e.size
    allowed = math.floor(delta * R + 1e-9)
    return float(e[R - 1 - allowed]) if allowed < R else float(e[0])


def quantile_error(spec: ExperimentSpec, delta: float, n: int | None = None) -> float:
    n = spec.n_grid[0] if n is None else n
    errors, _ = sup_errors(spec, n)
    return empirical_quantile(errors, delta)


def fit_slope(ns, values) -> float | None:
    """Least-squares slope of ``log(value)`` against ``log(n)`` above the float floor."""
    pts = [(n, v) for n, v in zip(ns, values) if v > ERROR_FLOOR]
    if len(pts) < 2:
        return None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def convergence_study(spec: ExperimentSpec) -> StudyResult:
    if len(spec.n_grid) < 3:
        raise InvalidSpec("a convergence study needs at least 3 grid points")
    rows = []
    for n in spec.n_grid:
        t0 = time.perf_counter()
        errors, ledger = sup_errors(spec, n)
        wall = (time.perf_counter() - t0) * 1e3 if spec.timing else 0.0
        e = np.asarray(errors)
        value = float(np.sqrt(np.mean(e**2))) if e.size > 1 else float(e[0])
        std = float(np.std(e, ddof=1)) if e.size > 1 else 0.0
        rows.append(
            ExperimentRow(n, value, ledger.charged_queries, ledger.actual_evaluations, wall, std)
        )
    rows.sort(key=lambda row: row.n)
    slope = fit_slope([r.n for r in rows], [r.error for r in rows])
    target = alpha_exponent(spec.level, spec.r + spec.rho, spec.setting)
    if slope is None:
        return StudyResult(rows, None, target, "order undefined (errors below floor)")
    return StudyResult(rows, -slope, target, f"fitted order {-slope:.3f} vs alpha = {target:g}")


def expected_ledger(cfg: SolverConfig) -> dict[int, tuple[int, int, int]]:
    """Per-level ``(charged, actual, classical)`` counts computed from the schedule alone."""
    delta1 = delta1_of(cfg.delta, cfg.n, cfg.k, cfg.setting)
    out: dict[int, list[int]] = {}
    calls, n = 1, cfg.n
    for s in range(cfg.s, 1, -1):
        m, l, N, eps1 = params_for_level(n, s - 1, cfg.setting)
        pop = m * l * N
        classical = calls * n * m * l * (cfg.r + 1)
        charged = calls * n * charge_for(cfg.mean_mode, pop, eps1, delta1, cfg.bound_G)
        if cfg.mean_mode == "quantum_sim":
            actual = calls * n * pop
        else:
            actual = charged
        out[s] = [classical + charged, classical + actual, classical]
        calls, n = calls * n, m
    a1 = calls * n * (cfg.r + 2)
    out[1] = [a1, a1, a1]
    return {s: tuple(v) for s, v in out.items()}


def ledger_matches(ledger: CostLedger, cfg: SolverConfig) -> bool:
    got = {
        s: (lv.charged_queries, lv.actual_evaluations, lv.classical_derivative_evals)
        for s, lv in ledger.levels.items()
    }
    return got == expected_ledger(cfg)


def cost_study(spec: ExperimentSpec) -> StudyResult:
    if len(spec.n_grid) < 3:
        raise InvalidSpec("a cost study needs at least 3 grid points")
    named = spec.named()
    rows, ledgers = [], {}
    for n in spec.n_grid:
        cfg = spec.config(n)
        _, ledger = solve_As(named.problem, cfg)
        ledgers[n] = (ledger, cfg)
        formula = sum(v[0] for v in expected_ledger(cfg).values())
        rows.append(
            (n, ledger.charged_queries, ledger.actual_evaluations,
             ledger.classical_derivative_evals, formula)
        )
    rows.sort()
    slope = fit_slope([r[0] for r in rows], [r[1] for r in rows])
    smallest = rows[0][0]
    formula_ok = ledger_matches(*ledgers[smallest])
    target = beta_exponent(spec.level, spec.setting)
    note = f"fitted cost exponent {slope:.3f} vs beta = {target}; ledger formula " + (
        "matches" if formula_ok else "MISMATCH"
    )
    return StudyResult(rows, slope, target, note, {"formula_ok": formula_ok})


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(header, rows, path=None) -> str:
    """Render rows as CSV (UTF-8, LF); write to ``path`` if given and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def converge_rows(result: StudyResult):
    return [(r.n, r.error, r.charged_queries, r.actual_evaluations, r.wall_ms) for r in result.rows]
