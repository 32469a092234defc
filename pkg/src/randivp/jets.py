"""Truncated Taylor (jet) arithmetic.

A :class:`Jet` holds the coefficients ``c_0 .. c_R`` of a univariate power
series truncated at order ``R``.  Coefficients may carry trailing batch axes,
so one jet can stand for many independent series evaluated in lock-step; all
arithmetic acts along axis 0 and broadcasts over the rest.

Right-hand sides are written once as a :class:`RhsProgram` over "scalars" and
the module-level functions :func:`exp`, :func:`log`, :func:`sin`, :func:`cos`,
:func:`sqrt`, :func:`power` dispatch on their argument, so the same program
runs on floats, numpy arrays and jets::

    >>> from randivp import jets as J
    >>> riccati = J.RhsProgram(1, lambda z: [z[0] * z[0]])
    >>> J.ode_taylor_coeffs(riccati, [1.0], 3).coeffs[:, 0]
    array([1., 1., 1., 1.])
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral, Real
from typing import Callable, Sequence

import numpy as np

from .errors import DivisionByZeroJet, DomainError

__all__ = [
    "Jet",
    "VectorJet",
    "RhsProgram",
    "jet_arith",
    "ode_taylor_coeffs",
    "truncated_taylor_of_f",
    "exp",
    "log",
    "sin",
    "cos",
    "sqrt",
    "power",
]


class Jet:
    """Truncated power series ``sum_j c_j t^j``, ``j = 0..order``."""

    __slots__ = ("coeffs",)
    __array_priority__ = 1000  # make ndarray <op> Jet defer to Jet

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 0:
            c = c[None]
        self.coeffs = c

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order: int, direction=1.0) -> "Jet":
        """Jet of ``t -> value + direction * t``."""
        value = np.asarray(value, dtype=float)
        direction = np.asarray(direction, dtype=float)
        shape = np.broadcast_shapes(value.shape, direction.shape)
        c = np.zeros((order + 1,) + shape)
        c[0] = value
        if order >= 1:
            c[1] = direction
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return f"Jet({self.coeffs.tolist()!r})"

    def __call__(self, t):
        """Evaluate the truncated polynomial at ``t`` (Horner)."""
        out = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            out = out * t + c
        return out

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(
                    f"jet orders differ: {self.order} vs {other.order}"
                )
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet(-self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, float)
            shape = np.broadcast_shapes(self.coeffs.shape, (1,) + other.shape)
            c = np.array(np.broadcast_to(self.coeffs, shape))
            c[0] = c[0] + other
            return Jet(c)
        return Jet(self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return self + (-np.asarray(other, float))
        return Jet(self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, float)[None])
        b = self._coerce(other).coeffs
        return Jet(_cauchy(self.coeffs, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, float)
            if np.any(other == 0):
                raise DivisionByZeroJet("division of a jet by zero")
            return Jet(self.coeffs / other[None])
        return Jet(_divide(self.coeffs, self._coerce(other).coeffs))

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order) / self

    def __pow__(self, p):
        return power(self, p)

    def __rpow__(self, base):
        return exp(self * np.log(base))

    # -- elementary functions ----------------------------------------------

    def exp(self) -> "Jet":
        a = self.coeffs
        e = np.empty_like(a)
        e[0] = np.exp(a[0])
        for k in range(1, len(a)):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + j * a[j] * e[k - j]
            e[k] = acc / k
        return Jet(e)

    def log(self) -> "Jet":
        a = self.coeffs
        if np.any(a[0] <= 0):
            raise DomainError("log of a jet with non-positive constant term")
        out = np.empty_like(a)
        out[0] = np.log(a[0])
        for k in range(1, len(a)):
            acc = 0.0
            for j in range(1, k):
                acc = acc + j * out[j] * a[k - j]
            out[k] = (a[k] - acc / k) / a[0]
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        a = self.coeffs
        s = np.empty_like(a)
        c = np.empty_like(a)
        s[0] = np.sin(a[0])
        c[0] = np.cos(a[0])
        for k in range(1, len(a)):
            acc_s = 0.0
            acc_c = 0.0
            for j in range(1, k + 1):
                acc_s = acc_s + j * a[j] * c[k - j]
                acc_c = acc_c + j * a[j] * s[k - j]
            s[k] = acc_s / k
            c[k] = -acc_c / k
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self.sincos()[0]

    def cos(self) -> "Jet":
        return self.sincos()[1]

    def sqrt(self) -> "Jet":
        return power(self, 0.5)


def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    R = a.shape[0]
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((R,) + shape)
    for k in range(R):
        acc = a[0] * b[k]
        for i in range(1, k + 1):
            acc = acc + a[i] * b[k - i]
        out[k] = acc
    return out


def _divide(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.any(b[0] == 0):
        raise DivisionByZeroJet("jet divisor has zero constant term")
    R = a.shape[0]
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((R,) + shape)
    for k in range(R):
        acc = a[k]
        for i in range(k):
            acc = acc - out[i] * b[k - i]
        out[k] = acc / b[0]
    return out


def _int_power(x: Jet, p: int) -> Jet:
    if p == 0:
        return Jet.constant(np.ones(x.coeffs.shape[1:]), x.order)
    if p < 0:
        return 1.0 / _int_power(x, -p)
    result = None
    base = x
    while p:
        if p & 1:
            result = base if result is None else result * base
        p >>= 1
        if p:
            base = base * base
    return result


def power(x, p):
    """``x ** p`` for real ``p``; integer exponents use exact products."""
    if not isinstance(x, Jet):
        return np.power(x, p)
    if isinstance(p, Jet):
        return exp(p * log(x))
    if isinstance(p, Integral) or (isinstance(p, Real) and float(p).is_integer()):
        return _int_power(x, int(p))
    a = x.coeffs
    if np.any(a[0] <= 0):
        raise DomainError(f"non-integer power {p} of a jet with non-positive constant term")
    y = np.empty_like(a)
    y[0] = a[0] ** p
    for k in range(1, len(a)):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + (p * j - (k - j)) * a[j] * y[k - j]
        y[k] = acc / (k * a[0])
    return Jet(y)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else np.sqrt(x)


_ELEMENTARY = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt}


def jet_arith(a: Jet, b: Jet | None, op: str) -> Jet:
    """Apply ``op`` to jets; ``b`` is ignored for unary elementary ops."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return power(a, b)
    if op in _ELEMENTARY:
        return _ELEMENTARY[op](a)
    raise ValueError(f"unknown jet operation {op!r}")


@dataclass(frozen=True)
class VectorJet:
    """``d`` jets of a common order, one per component."""

    components: tuple[Jet, ...]

    def __post_init__(self):
        orders = {c.order for c in self.components}
        if len(orders) > 1:
            raise ValueError(f"components have different orders {orders}")

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def coeffs(self) -> np.ndarray:
        """Array ``(order + 1, dim, *batch)``."""
        return np.stack([c.coeffs for c in self.components], axis=1)

    def __call__(self, t) -> np.ndarray:
        return np.stack([c(t) for c in self.components], axis=-1)


@dataclass(frozen=True)
class RhsProgram:
    """Right-hand side ``f: R^d -> R^d`` as a program over abstract scalars.

    ``func`` receives a sequence of ``dim`` scalars (floats, arrays or jets)
    and returns a sequence of ``dim`` results built with ``+ - * /`` and the
    dispatching elementary functions of this module.
    """

    dim: int
    func: Callable[[Sequence], Sequence]
    name: str = ""

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dim:
            raise ValueError(f"expected trailing dimension {self.dim}, got {y.shape}")
        batch = y.shape[:-1]
        out = self.func([y[..., i] for i in range(self.dim)])
        return np.stack(
            [np.broadcast_to(np.asarray(o, dtype=float), batch) for o in out], axis=-1
        )

    def on_jets(self, z: Sequence[Jet]) -> list[Jet]:
        order = z[0].order
        batch = np.broadcast_shapes(*(c.coeffs.shape[1:] for c in z))
        out = []
        for o in self.func(list(z)):
            if not isinstance(o, Jet):
                o = Jet.constant(np.broadcast_to(np.asarray(o, dtype=float), batch), order)
            out.append(o)
        if len(out) != self.dim:
            raise ValueError(f"rhs returned {len(out)} components, expected {self.dim}")
        return out


def ode_taylor_coeffs(f: RhsProgram, y, degree: int) -> VectorJet:
    """Normalized Taylor coefficients ``z^(j)(0)/j!`` of ``z' = f(z), z(0) = y``.

    Coefficient ``j+1`` follows from ``(j+1) Z_{j+1} = (f o Z)_j``, which only
    needs ``Z`` up to order ``j``; f is therefore evaluated on jets of
    growing order ``0 .. degree-1``.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    y = np.asarray(y, dtype=float)
    Z = np.zeros((degree + 1,) + y.shape)
    Z[0] = y
    for j in range(degree):
        jets = [Jet(Z[: j + 1, i]) for i in range(f.dim)]
        fz = f.on_jets(jets)
        for i in range(f.dim):
            Z[j + 1, i] = fz[i].coeffs[j] / (j + 1)
    return VectorJet(tuple(Jet(Z[:, i]) for i in range(f.dim)))


def truncated_taylor_of_f(f: RhsProgram, x, v, r: int) -> np.ndarray:
    """Homogeneous parts ``h_k = f^(k)(x)(v)^k / k!``, ``k = 0..r``.

    ``x`` and ``v`` are arrays ``(..., d)`` (broadcast together); the result
    has shape ``(r + 1, ..., d)`` and ``h.sum(0)`` is the degree-r Taylor
    polynomial of f about ``x`` evaluated at ``x + v``.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    x, v = np.broadcast_arrays(x, v)
    jets = [Jet.variable(x[..., i], r, v[..., i]) for i in range(f.dim)]
    out = f.on_jets(jets)
    return np.stack([o.coeffs for o in out], axis=-1)
