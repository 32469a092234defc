"""Test problems with closed-form solutions, and autonomization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnknownProblem
from .jets import RhsProgram
from .solver import IVProblem


@dataclass(frozen=True)
class NamedProblem:
    name: str
    problem: IVProblem
    reference_solution: Callable[[np.ndarray], np.ndarray]
    bound_G: float = 1.0
    note: str = ""


def autonomize(f_t: RhsProgram, a: float, eta, b: float) -> IVProblem:
    """Turn ``z' = f(t, z)`` into an autonomous system in ``(u, z)`` with ``u' = 1``.

    ``f_t`` takes ``d + 1`` scalars ``(t, z_1..z_d)`` and returns ``d``.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    d = eta.shape[0]

    def F(y):
        return [1.0, *f_t.func(list(y))]

    rhs = RhsProgram(d + 1, F, name=f"autonomized({f_t.name})")
    return IVProblem(rhs, np.concatenate([[a], eta]), a, b)


def _column(fn):
    def ref(t):
        t = np.asarray(t, dtype=float)
        return np.stack(np.broadcast_arrays(*fn(t)), axis=-1)

    return ref


def _const_zero():
    rhs = RhsProgram(1, lambda z: [0.0], "const_zero")
    return NamedProblem(
        "const_zero",
        IVProblem(rhs, [1.0], 0.0, 1.0),
        _column(lambda t: [np.ones_like(t)]),
    )


def _exp_growth():
    rhs = RhsProgram(1, lambda z: [z[0]], "exp_growth")
    return NamedProblem(
        "exp_growth",
        IVProblem(rhs, [1.0], 0.0, 1.0),
        _column(lambda t: [np.exp(t)]),
        note="linear: g vanishes identically for r >= 1",
    )


def _exp_decay():
    rhs = RhsProgram(1, lambda z: [-z[0]], "exp_decay")
    return NamedProblem(
        "exp_decay",
        IVProblem(rhs, [1.0], 0.0, 1.0),
        _column(lambda t: [np.exp(-t)]),
        note="linear: g vanishes identically for r >= 1",
    )


def _riccati():
    rhs = RhsProgram(1, lambda z: [z[0] * z[0]], "riccati")
    return NamedProblem(
        "riccati",
        IVProblem(rhs, [1.0], 0.0, 0.5),
        _column(lambda t: [1.0 / (1.0 - t)]),
        bound_G=1.0,
        note="blows up at t = 1; interval kept to [0, 0.5]",
    )


def _logistic():
    rhs = RhsProgram(1, lambda z: [z[0] * (1.0 - z[0])], "logistic")
    return NamedProblem(
        "logistic",
        IVProblem(rhs, [0.5], 0.0, 1.0),
        _column(lambda t: [1.0 / (1.0 + np.exp(-t))]),
        bound_G=0.1,
        note="|g| <= 1/16 for r = 1, rho = 1",
    )


def _harmonic_2d():
    rhs = RhsProgram(2, lambda z: [z[1], -z[0]], "harmonic_2d")
    return NamedProblem(
        "harmonic_2d",
        IVProblem(rhs, [0.0, 1.0], 0.0, 1.0),
        _column(lambda t: [np.sin(t), np.cos(t)]),
        note="linear: g vanishes identically for r >= 1",
    )


def _nonauto_poly():
    f_t = RhsProgram(2, lambda tz: [tz[0] * tz[0]], "t^2")
    problem = autonomize(f_t, 0.0, [0.0], 1.0)
    return NamedProblem(
        "nonauto_poly",
        problem,
        _column(lambda t: [t, t**3 / 3.0]),
        note="z' = t^2 autonomized; w is exact for r >= 2",
    )


_REGISTRY = {
    "const_zero": _const_zero,
    "exp_growth": _exp_growth,
    "exp_decay": _exp_decay,
    "riccati": _riccati,
    "logistic": _logistic,
    "harmonic_2d": _harmonic_2d,
    "nonauto_poly": _nonauto_poly,
}

NAMES = tuple(_REGISTRY)


def builtin(name: str) -> NamedProblem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; choose from {', '.join(NAMES)}") from None
    named = factory()
    p = named.problem
    problem = IVProblem(p.rhs, p.eta, p.a, p.b, named.reference_solution)
    return NamedProblem(named.name, problem, named.reference_solution, named.bound_G, named.note)
