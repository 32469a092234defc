"""Mean of a finite vector population under three cost models.

``exact``
    Averages the whole population; every element is one query.
``randomized``
    Median of ``R`` independent sample means, each over ``S`` uniform draws
    with replacement.  ``S = ceil(4 G^2 / eps^2)`` makes a single mean
    ``eps``-accurate with probability >= 3/4 by Chebyshev whenever
    ``|g| <= G``; ``R = 2 ceil(log2(1/delta)) + 1`` lifts this to
    ``1 - delta``.
``quantum_sim``
    Stands in for amplitude-estimation based mean estimation.  The true mean
    is computed and a bounded error (``<= eps`` per component) is injected
    into every non-constant component; queries are charged as
    ``min(pop, ceil(1/eps)) * R``.

Random draws come from ``SeedSequence(seed, spawn_key=stream + (rep,))`` so
each repetition has its own substream and results do not depend on
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidRequest, OracleFailure, RandIVPError

MODES = ("exact", "randomized", "quantum_sim")
PERTURBATIONS = ("none", "uniform_random", "adversarial_sign")

_SEED_MASK = (1 << 64) - 1


def ceil_int(x: float) -> int:
    """Ceiling that ignores float noise just above an integer."""
    n = round(x)
    if abs(x - n) <= 1e-9 * max(1.0, abs(x)):
        return int(n)
    return math.ceil(x)


def midpoint_nodes(N: int) -> np.ndarray:
    if N < 1:
        raise ValueError("N must be >= 1")
    return (2 * np.arange(N) + 1) / (2 * N)


def repetitions(delta1: float) -> int:
    return 2 * ceil_int(math.log2(1.0 / delta1)) + 1


def chebyshev_sample_size(bound_G: float, epsilon1: float) -> int:
    return ceil_int(4.0 * bound_G**2 / epsilon1**2)


def randomized_charge(population_size: int, epsilon1: float, delta1: float, bound_G: float) -> int:
    S = min(population_size, chebyshev_sample_size(bound_G, epsilon1))
    if S == population_size:
        return population_size
    return repetitions(delta1) * S


def quantum_charge(population_size: int, epsilon1: float, delta1: float) -> int:
    return min(population_size, ceil_int(1.0 / epsilon1)) * repetitions(delta1)


def charge_for(mode: str, population_size: int, epsilon1: float, delta1: float, bound_G: float) -> int:
    """Model queries charged by :func:`estimate_mean` for a request."""
    if mode == "exact":
        return population_size
    if mode == "randomized":
        return randomized_charge(population_size, epsilon1, delta1, bound_G)
    if mode == "quantum_sim":
        return quantum_charge(population_size, epsilon1, delta1)
    raise InvalidRequest(f"unknown mode {mode!r}")


@dataclass
class MeanRequest:
    population_size: int
    sample_oracle: Callable[[np.ndarray], np.ndarray]
    epsilon1: float
    delta1: float
    mode: str = "exact"
    bound_G: float = 1.0
    perturbation: str = "none"
    seed: int = 0
    stream: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidRequest(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.perturbation not in PERTURBATIONS:
            raise InvalidRequest(f"perturbation must be one of {PERTURBATIONS}")
        if not self.population_size >= 1:
            raise InvalidRequest("population_size must be >= 1")
        if not self.epsilon1 > 0:
            raise InvalidRequest("epsilon1 must be positive")
        if not 0 < self.delta1 < 0.5:
            raise InvalidRequest("delta1 must lie in (0, 1/2)")
        if not self.bound_G > 0:
            raise InvalidRequest("bound_G must be positive")


@dataclass(frozen=True)
class MeanResult:
    estimate: np.ndarray
    charged_queries: int
    actual_evaluations: int


def _rng(seed: int, stream: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK, spawn_key=stream))


def _query(req: MeanRequest, idx: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(req.sample_oracle(idx), dtype=float)
    except OracleFailure:
        raise
    except (RandIVPError, ArithmeticError, ValueError) as exc:
        raise OracleFailure(f"sample oracle failed: {exc}") from exc
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != idx.size:
        raise OracleFailure(f"oracle returned {vals.shape[0]} rows for {idx.size} indices")
    if not np.all(np.isfinite(vals)):
        raise OracleFailure("oracle returned non-finite values")
    return vals


def shifted_mean(x: np.ndarray) -> np.ndarray:
    """Mean along axis 0, computed about the first row (exact for constant data)."""
    return x[0] + np.mean(x - x[0], axis=0)


def estimate_mean(req: MeanRequest) -> MeanResult:
    pop = req.population_size
    if req.mode == "exact":
        vals = _query(req, np.arange(pop))
        return MeanResult(shifted_mean(vals), pop, pop)

    if req.mode == "randomized":
        S = min(pop, chebyshev_sample_size(req.bound_G, req.epsilon1))
        if S == pop:
            vals = _query(req, np.arange(pop))
            return MeanResult(shifted_mean(vals), pop, pop)
        R = repetitions(req.delta1)
        idx = np.concatenate(
            [_rng(req.seed, req.stream + (rep,)).integers(0, pop, S) for rep in range(R)]
        )
        vals = _query(req, idx).reshape(R, S, -1)
        means = np.stack([shifted_mean(v) for v in vals])
        return MeanResult(np.median(means, axis=0), R * S, R * S)

    vals = _query(req, np.arange(pop))
    estimate = shifted_mean(vals)
    d = estimate.shape[0]
    eps = req.epsilon1
    if req.perturbation == "uniform_random":
        estimate = estimate + _rng(req.seed, req.stream).uniform(-eps, eps, d)
    elif req.perturbation == "adversarial_sign":
        # one sign pattern per seed, shared by every request so errors add up
        sign = _rng(req.seed).choice([-1.0, 1.0], size=d)
        estimate = estimate + sign * eps
    if req.perturbation != "none":
        # a constant component has a one-point range; its mean is returned exactly
        constant = vals.min(axis=0) == vals.max(axis=0)
        estimate = np.where(constant, vals[0], estimate)
    return MeanResult(estimate, quantum_charge(pop, eps, req.delta1), pop)
