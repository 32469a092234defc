"""Piecewise polynomials on uniform grids.

Piece ``j`` of a :class:`PiecewisePoly` covers ``[a + j*delta, a + (j+1)*delta)``
(the last piece is closed at ``b``) and is stored by its coefficients in the
local variable ``tau = t - (a + j*delta)``.  Evaluating a piece at
``tau = delta`` therefore gives the left limit at the next breakpoint.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import GridMismatch, OutOfDomain
from .jets import RhsProgram, truncated_taylor_of_f

_BREAKPOINT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PiecewisePoly:
    a: float
    b: float
    coeffs: np.ndarray  # (pieces, degree + 1, dim), local variable tau

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 3 or c.shape[0] < 1 or c.shape[1] < 1 or c.shape[2] < 1:
            raise ValueError(f"coefficient table must be (P, deg+1, d), got {c.shape}")
        if not self.b > self.a:
            raise ValueError("need a < b")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def pieces(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]

    @property
    def delta(self) -> float:
        return (self.b - self.a) / self.pieces

    def breakpoints(self) -> np.ndarray:
        return self.a + self.delta * np.arange(self.pieces + 1)

    @classmethod
    def concatenate(cls, parts: Sequence["PiecewisePoly"]) -> "PiecewisePoly":
        """Join polys on adjacent intervals of equal length and piece count."""
        first = parts[0]
        for p in parts[1:]:
            if p.pieces != first.pieces or p.coeffs.shape[1:] != first.coeffs.shape[1:]:
                raise GridMismatch("parts have different piece layouts")
        return cls(first.a, parts[-1].b, np.concatenate([p.coeffs for p in parts]))

    def piece_eval(self, j, tau) -> np.ndarray:
        """Horner evaluation of piece(s) ``j`` at local offsets ``tau``."""
        c = self.coeffs[j]  # (..., deg+1, d)
        tau = np.asarray(tau, dtype=float)[..., None]
        out = c[..., -1, :]
        for k in range(self.degree - 1, -1, -1):
            out = out * tau + c[..., k, :]
        return out

    def locate(self, t, side: str = "right"):
        """Piece index and local offset for times ``t``."""
        if side not in ("right", "left_limit"):
            raise ValueError(f"side must be 'right' or 'left_limit', got {side!r}")
        t = np.asarray(t, dtype=float)
        span = self.b - self.a
        slack = _BREAKPOINT_TOL * max(1.0, abs(self.a), abs(self.b))
        if np.any(t < self.a - slack) or np.any(t > self.b + slack):
            raise OutOfDomain(f"t outside [{self.a}, {self.b}]")
        x = (t - self.a) / span * self.pieces
        near = np.rint(x)
        on_break = np.abs(x - near) < _BREAKPOINT_TOL * np.maximum(1.0, near)
        j = np.where(on_break, near, np.floor(x)).astype(int)
        if side == "left_limit":
            j = np.where(on_break & (j > 0), j - 1, j)
        j = np.clip(j, 0, self.pieces - 1)
        tau = np.where(
            on_break,
            (near - j) * self.delta,
            t - (self.a + j * self.delta),
        )
        return j, tau

    def eval(self, t, side: str = "right") -> np.ndarray:
        """Value at ``t``; ``side='left_limit'`` uses the preceding piece at breakpoints."""
        j, tau = self.locate(t, side)
        return self.piece_eval(j, tau)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["piece_index", "coeff_index", "component", "value"])
            P, K, d = self.coeffs.shape
            for j in range(P):
                for k in range(K):
                    for i in range(d):
                        w.writerow([j, k, i, repr(float(self.coeffs[j, k, i]))])


def gauss_node_count(r: int, path_degree: int | None = None) -> int:
    """Nodes making Gauss-Legendre exact for ``w(path(t))``: degree ``r * path_degree``."""
    if path_degree is None:
        path_degree = r + 1
    return max(1, math.ceil((r * path_degree + 1) / 2))


@lru_cache(maxsize=None)
def _gauss_unit(g: int):
    x, w = np.polynomial.legendre.leggauss(g)
    return (x + 1.0) / 2.0, w / 2.0


def _local_displacement(coeffs: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """``path(tau) - path(0)`` for coefficient rows ``(..., deg+1, d)``."""
    deg = coeffs.shape[-2] - 1
    tau = tau[..., None]
    out = np.zeros(np.broadcast_shapes(coeffs[..., 0, :].shape, tau.shape))
    for k in range(deg, 0, -1):
        out = (out + coeffs[..., k, :]) * tau
    return out


def taylor_residual_terms(rhs: RhsProgram, r: int, coeffs: np.ndarray, tau: np.ndarray):
    """Evaluate ``f(y)`` and ``w(y)`` at ``y = path(tau)`` for a batch of pieces.

    ``coeffs`` is ``(B, deg+1, d)`` and ``tau`` is ``(B, K)``; ``w`` is the
    degree-r Taylor polynomial of f about the piece's left value ``path(0)``.
    The point is formed as ``path(0) + displacement`` so that, for f with
    vanishing higher derivatives, ``f(y)`` and ``w(y)`` follow the same
    floating-point path.  Returns ``(fy, wy)`` of shape ``(B, K, d)``.
    """
    center = coeffs[:, None, 0, :]
    v = _local_displacement(coeffs[:, None, :, :], tau)
    y = center + v
    h = truncated_taylor_of_f(rhs, center, v, r)
    return rhs(y), h.sum(axis=0)


def composed_integrals(rhs: RhsProgram, r: int, coeffs: np.ndarray, length: float) -> np.ndarray:
    """``int_0^length w_j(path_j(tau)) dtau`` for each piece row, shape ``(B, d)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    g = gauss_node_count(r, coeffs.shape[1] - 1)
    x, w = _gauss_unit(g)
    tau = np.broadcast_to(x * length, (coeffs.shape[0], g))
    _, wy = taylor_residual_terms(rhs, r, coeffs, tau)
    return length * np.einsum("g,bgd->bd", w, wy)


def integrate_composed(
    rhs: RhsProgram,
    r: int,
    path: PiecewisePoly,
    start: float,
    stop: float,
    center=None,
) -> np.ndarray:
    """Exact integral over ``[start, stop]`` of ``w(path(t))``.

    ``w`` is the degree-r Taylor polynomial of ``rhs`` about ``center``
    (default: the path value at ``start``).  The interval must lie inside a
    single piece of ``path``; the Gauss rule is then exact because the
    integrand is a polynomial in ``t``.
    """
    if not stop > start:
        raise ValueError("need start < stop")
    j0, tau0 = path.locate(start, "right")
    j1, tau1 = path.locate(stop, "left_limit")
    j0, j1 = int(j0), int(j1)
    if j0 != j1:
        raise GridMismatch(f"[{start}, {stop}] spans pieces {j0}..{j1}")
    length = stop - start
    # re-expand the piece about start so that tau runs over [0, length]
    local = _shift_poly(path.coeffs[j0], float(tau0))
    if center is not None:
        g = gauss_node_count(r, path.degree)
        x, w = _gauss_unit(g)
        disp = _local_displacement(local[None], (x * length)[None])[0]
        v = local[0] - np.asarray(center, dtype=float) + disp
        h = truncated_taylor_of_f(rhs, center, v, r)
        return length * np.einsum("g,gd->d", w, h.sum(axis=0))
    return composed_integrals(rhs, r, local[None], length)[0]


def _shift_poly(c: np.ndarray, s: float) -> np.ndarray:
    """Coefficients of ``tau -> p(tau + s)`` for rows ``(deg+1, d)``."""
    deg = c.shape[0] - 1
    out = np.zeros_like(c)
    for k in range(deg + 1):
        for i in range(k, deg + 1):
            out[k] += math.comb(i, k) * c[i] * s ** (i - k)
    return out


@lru_cache(maxsize=None)
def nested_fractions(samples_per_piece: int) -> np.ndarray:
    """Sample offsets in ``[0, 1]``: union of uniform grids with 2..k points.

    The grid for ``k`` contains the grid for every smaller ``k``, so maxima
    taken over it never decrease as ``k`` grows.
    """
    if samples_per_piece < 2:
        raise ValueError("samples_per_piece must be at least 2")
    fr = {Fraction(p, q) for q in range(1, samples_per_piece) for p in range(q + 1)}
    return np.array(sorted(float(f) for f in fr))


def sample_grid(p: PiecewisePoly, samples_per_piece: int = 8):
    """Times, piece indices and local offsets of the sup-norm sample grid."""
    frac = nested_fractions(samples_per_piece)
    j = np.repeat(np.arange(p.pieces), frac.size)
    tau = np.tile(frac * p.delta, p.pieces)
    t = p.a + j * p.delta + tau
    return t, j, tau


def sup_norm_distance(
    p: PiecewisePoly,
    ref: Callable[[np.ndarray], np.ndarray],
    samples_per_piece: int = 8,
) -> float:
    """Max over the sample grid of ``||ref(t) - p(t)||_inf``.

    Right endpoints of pieces are evaluated as left limits (from their own
    piece), left endpoints from the right.
    """
    t, j, tau = sample_grid(p, samples_per_piece)
    approx = p.piece_eval(j, tau)
    exact = np.asarray(ref(t), dtype=float).reshape(approx.shape)
    return float(np.max(np.abs(exact - approx)))
