"""Recursive randomized / quantum-model solvers for ``z' = f(z), z(a) = eta``.

``A_1`` is the Taylor method of degree ``r + 1``.  ``A_{s+1}`` runs ``A_s``
with basic parameter ``m`` on each macro step ``[x_i, x_{i+1}]`` to get a
local approximation ``l_i``, then advances

    y_{i+1} = y_i + sum_j int w_ij(l_i(t)) dt + hbar^(q+1) * m*l * AP_i

where ``w_ij`` is the degree-r Taylor polynomial of f about ``l_i(z_j)``
(integrated exactly), and ``AP_i`` estimates the mean of the normalized
residuals ``g_ij(u_k) = (f - w_ij)(l_i(z_j + u_k hbar)) / hbar^q`` over a
midpoint grid.  The returned approximation is the concatenation of the
``l_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatch, InvalidPlan, InvalidSpec, RandIVPError
from .jets import RhsProgram, ode_taylor_coeffs
from .mean_estimation import (
    MODES,
    PERTURBATIONS,
    MeanRequest,
    ceil_int,
    estimate_mean,
    midpoint_nodes,
)
from .piecewise import PiecewisePoly, composed_integrals, taylor_residual_terms

SETTINGS = ("RAND", "QUANT")


def _setting(setting: str) -> str:
    s = str(setting).upper()
    if s not in SETTINGS:
        raise InvalidSpec(f"setting must be RAND or QUANT, got {setting!r}")
    return s


@dataclass(frozen=True)
class IVProblem:
    rhs: RhsProgram
    eta: np.ndarray
    a: float
    b: float
    reference_solution: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if eta.shape != (self.rhs.dim,):
            raise InvalidSpec(f"eta has shape {eta.shape}, rhs dimension is {self.rhs.dim}")
        if not self.a < self.b:
            raise InvalidSpec("need a < b")
        object.__setattr__(self, "eta", eta)

    @property
    def dim(self) -> int:
        return self.rhs.dim


@dataclass(frozen=True)
class SolverConfig:
    r: int = 1
    rho: float = 1.0
    setting: str = "RAND"
    s: int = 1
    k: int | None = None  # top level used for delta_1; defaults to s
    n: int = 4
    delta: float = 0.1
    mean_mode: str = "exact"
    bound_G: float = 1.0
    perturbation: str = "none"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "setting", _setting(self.setting))
        if self.k is None:
            object.__setattr__(self, "k", self.s)
        if self.r < 0 or not 0 < self.rho <= 1:
            raise InvalidSpec("need r >= 0 and rho in (0, 1]")
        if self.q < 1:
            raise InvalidSpec(f"regularity q = r + rho must be >= 1, got {self.q}")
        if self.s < 1 or self.k < self.s:
            raise InvalidSpec("need 1 <= s <= k")
        if self.n < 1:
            raise InvalidSpec("basic parameter n must be >= 1")
        if not 0 < self.delta < 0.5:
            raise InvalidSpec("delta must lie in (0, 1/2)")
        if self.mean_mode not in MODES:
            raise InvalidSpec(f"mean_mode must be one of {MODES}")
        if self.perturbation not in PERTURBATIONS:
            raise InvalidSpec(f"perturbation must be one of {PERTURBATIONS}")
        if not self.bound_G > 0:
            raise InvalidSpec("bound_G must be positive")

    @property
    def q(self) -> float:
        return self.r + self.rho


@dataclass
class LevelCost:
    charged_queries: int = 0
    actual_evaluations: int = 0
    classical_derivative_evals: int = 0
    max_abs_g: float = 0.0


@dataclass
class CostLedger:
    """Query counts per recursion level (level 1 = Taylor steps)."""

    levels: dict[int, LevelCost] = field(default_factory=dict)

    def level(self, s: int) -> LevelCost:
        return self.levels.setdefault(s, LevelCost())

    def charge_classical(self, s: int, calls: int) -> None:
        lv = self.level(s)
        lv.classical_derivative_evals += calls
        lv.charged_queries += calls
        lv.actual_evaluations += calls

    def charge_estimator(self, s: int, charged: int, actual: int) -> None:
        lv = self.level(s)
        lv.charged_queries += charged
        lv.actual_evaluations += actual

    @property
    def charged_queries(self) -> int:
        return sum(lv.charged_queries for lv in self.levels.values())

    @property
    def actual_evaluations(self) -> int:
        return sum(lv.actual_evaluations for lv in self.levels.values())

    @property
    def classical_derivative_evals(self) -> int:
        return sum(lv.classical_derivative_evals for lv in self.levels.values())

    def as_dict(self) -> dict:
        return {
            "charged_queries": self.charged_queries,
            "actual_evaluations": self.actual_evaluations,
            "classical_derivative_evals": self.classical_derivative_evals,
            "levels": {
                s: (lv.charged_queries, lv.actual_evaluations, lv.classical_derivative_evals)
                for s, lv in sorted(self.levels.items())
            },
        }


# -- schedules and exponents ------------------------------------------------


def params_for_level(n: int, s: int, setting: str) -> tuple[int, int, int, float]:
    """``(m, l, N, eps1)`` used when building ``A_{s+1}`` from ``A_s``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if _setting(setting) == "RAND":
        m, l, N = n**2, n ** (2 ** (s + 1) - 4), n ** (2**s - 1)
    else:
        m, l, N = n, n ** (s - 1), n**s
    return m, l, N, 1.0 / N


def delta1_of(delta: float, n: int, k: int, setting: str) -> float:
    e = n ** (2**k - 1) if _setting(setting) == "RAND" else n**k
    if e == 1:
        return delta
    return -math.expm1(math.log1p(-delta) / e)


def alpha_exponent(s: int, q: float, setting: str) -> float:
    if _setting(setting) == "RAND":
        return q * (2**s - 1) + 2 ** (s - 1) - 1
    return q * s + s - 1


def beta_exponent(s: int, setting: str) -> int:
    return 2**s - 1 if _setting(setting) == "RAND" else s


def pieces_per_interval(n: int, s: int, setting: str) -> int:
    """Number of polynomial pieces of the output of ``A_s(n)``."""
    return n ** beta_exponent(s, setting)


def psi_count(n: int, s: int, setting: str) -> int:
    """Number of mean estimates whose joint success underwrites ``A_s``'s error bound."""
    if _setting(setting) == "RAND":
        return sum(n ** (2**i - 1) for i in range(1, s))
    return sum(n**i for i in range(1, s))


def choose_k(gamma: float, setting: str) -> int:
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if _setting(setting) == "RAND":
        return ceil_int(math.log2(1.0 / gamma + 1.0))
    return ceil_int(2.0 / gamma)


@dataclass(frozen=True)
class Plan:
    k: int
    n: int
    delta: float
    alpha: float
    beta: int


def plan_for_epsilon(
    epsilon: float,
    gamma: float,
    K: float = 1.0,
    Cbar: float = 1.0,
    q: float = 2.0,
    setting: str = "RAND",
    delta: float | None = None,
) -> Plan:
    """Level, basic parameter and failure probability reaching error ``epsilon``.

    RAND picks ``delta = 3 eps^2 / (4 K^2)`` so that the mean-square error
    is at most ``eps^2``; QUANT uses the caller's ``delta``.
    """
    if not (epsilon > 0 and K > 0 and Cbar > 0):
        raise InvalidPlan("epsilon, K and Cbar must be positive")
    setting = _setting(setting)
    k = choose_k(gamma, setting)
    alpha = alpha_exponent(k, q, setting)
    if setting == "RAND":
        delta = 3.0 * epsilon**2 / (4.0 * K**2)
    elif delta is None:
        raise InvalidPlan("QUANT planning needs the failure probability delta")
    if not 0 < delta < 0.5:
        raise InvalidPlan(f"delta = {delta} outside (0, 1/2); epsilon too large for K")
    n = max(1, ceil_int((2.0 * Cbar / epsilon) ** (1.0 / alpha)))
    return Plan(k=k, n=n, delta=delta, alpha=alpha, beta=beta_exponent(k, setting))


# -- the algorithms ---------------------------------------------------------


def taylor_step(f: RhsProgram, y, h: float, r: int):
    """One Taylor step of degree ``r + 1``; returns ``(y_next, coeffs)``.

    ``coeffs`` has shape ``(r + 2, d)`` in powers of ``t - x_i``.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    c = ode_taylor_coeffs(f, y, r + 1).coeffs
    y_next = c[-1]
    for k in range(r, -1, -1):
        y_next = y_next * h + c[k]
    return y_next, c


@dataclass
class _Context:
    rhs: RhsProgram
    cfg: SolverConfig
    delta1: float
    ledger: CostLedger


def _solve_a1(ctx: _Context, a: float, b: float, y0: np.ndarray, n: int) -> PiecewisePoly:
    r = ctx.cfg.r
    h = (b - a) / n
    coeffs = np.empty((n, r + 2, y0.shape[0]))
    y = y0
    for i in range(n):
        y, coeffs[i] = taylor_step(ctx.rhs, y, h, r)
    ctx.ledger.charge_classical(1, n * (r + 2))
    return PiecewisePoly(a, b, coeffs)


def _solve(ctx: _Context, a: float, b: float, y0: np.ndarray, n: int, s: int, path: tuple) -> PiecewisePoly:
    if s == 1:
        return _solve_a1(ctx, a, b, y0, n)
    cfg, rhs = ctx.cfg, ctx.rhs
    r, q = cfg.r, cfg.q
    m, l, N, eps1 = params_for_level(n, s - 1, cfg.setting)
    ml = m * l
    h = (b - a) / n
    hbar = h / ml
    tau = midpoint_nodes(N) * hbar
    level = ctx.ledger.level(s)

    y = y0
    parts = []
    for i in range(n):
        xi = a + i * h
        xi1 = b if i == n - 1 else a + (i + 1) * h
        try:
            li = _solve(ctx, xi, xi1, y, m, s - 1, path + (s, i))
            if li.pieces != ml:
                raise GridMismatch(
                    f"inner approximation has {li.pieces} pieces, expected m*l = {ml}"
                )
            C = li.coeffs
            integral = composed_integrals(rhs, r, C, hbar).sum(axis=0)
            ctx.ledger.charge_classical(s, ml * (r + 1))

            def oracle(idx, C=C):
                if idx.size == ml * N and np.array_equal(idx, np.arange(ml * N)):
                    fy, wy = taylor_residual_terms(rhs, r, C, np.broadcast_to(tau, (ml, N)))
                else:
                    j, k = np.divmod(idx, N)
                    fy, wy = taylor_residual_terms(rhs, r, C[j], tau[k][:, None])
                g = ((fy - wy) / hbar**q).reshape(idx.size, -1)
                if g.size:
                    level.max_abs_g = max(level.max_abs_g, float(np.max(np.abs(g))))
                return g

            res = estimate_mean(
                MeanRequest(
                    population_size=ml * N,
                    sample_oracle=oracle,
                    epsilon1=eps1,
                    delta1=ctx.delta1,
                    mode=cfg.mean_mode,
                    bound_G=cfg.bound_G,
                    perturbation=cfg.perturbation,
                    seed=cfg.seed,
                    stream=path + (s, i),
                )
            )
        except RandIVPError as exc:
            raise type(exc)(f"level {s}, macro step {i}: {exc}") from exc
        ctx.ledger.charge_estimator(s, res.charged_queries, res.actual_evaluations)
        y = y + integral + hbar ** (q + 1) * ml * res.estimate
        parts.append(li)
    return PiecewisePoly(a, b, PiecewisePoly.concatenate(parts).coeffs)


def solve_A1(problem: IVProblem, cfg: SolverConfig) -> tuple[PiecewisePoly, CostLedger]:
    if cfg.s != 1:
        raise InvalidSpec("solve_A1 needs s = 1")
    return solve_As(problem, cfg)


def solve_As(problem: IVProblem, cfg: SolverConfig) -> tuple[PiecewisePoly, CostLedger]:
    """Run ``A_s([a, b], n)``; returns the approximation and its cost ledger."""
    ctx = _Context(
        rhs=problem.rhs,
        cfg=cfg,
        delta1=delta1_of(cfg.delta, cfg.n, cfg.k, cfg.setting),
        ledger=CostLedger(),
    )
    poly = _solve(ctx, float(problem.a), float(problem.b), problem.eta, cfg.n, cfg.s, ())
    return poly, ctx.ledger
