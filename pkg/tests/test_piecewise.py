import csv
import math

import numpy as np
from numpy.polynomial import Polynomial
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from randivp import jets as J
from randivp.errors import GridMismatch, OutOfDomain
from randivp.jets import RhsProgram
from randivp.piecewise import (
    PiecewisePoly,
    gauss_node_count,
    integrate_composed,
    nested_fractions,
    sup_norm_distance,
)


def two_piece():
    # [0, 0.5): t ; [0.5, 1]: 1
    c = np.zeros((2, 2, 1))
    c[0, 1, 0] = 1.0
    c[1, 0, 0] = 1.0
    return PiecewisePoly(0.0, 1.0, c)


def test_eval_sides_at_breakpoint():
    p = two_piece()
    assert p.eval(0.5, "right")[0] == 1.0
    assert p.eval(0.5, "left_limit")[0] == 0.5
    assert p.eval(0.25)[0] == 0.25
    assert p.eval(1.0)[0] == 1.0
    assert p.eval(0.0, "left_limit")[0] == 0.0


def test_constant_piece():
    p = PiecewisePoly(0.0, 2.0, np.full((1, 1, 2), 3.0))
    for t in (0.0, 0.7, 2.0):
        np.testing.assert_array_equal(p.eval(t), [3.0, 3.0])
        np.testing.assert_array_equal(p.eval(t, "left_limit"), [3.0, 3.0])


def test_out_of_domain():
    p = two_piece()
    with pytest.raises(OutOfDomain):
        p.eval(1.5)
    with pytest.raises(OutOfDomain):
        p.eval(-0.1)


def test_coefficients_read_only():
    p = two_piece()
    with pytest.raises(ValueError):
        p.coeffs[0, 0, 0] = 5.0


def test_csv_layout(tmp_path):
    path = tmp_path / "poly.csv"
    two_piece().to_csv(path)
    rows = list(csv.reader(open(path, newline="")))
    assert rows[0] == ["piece_index", "coeff_index", "component", "value"]
    assert len(rows) == 1 + 2 * 2 * 1
    assert rows[2] == ["0", "1", "0", "1.0"]


def line(a=0.0, b=1.0, d=1, slope=1.0, start=0.0):
    c = np.zeros((1, 2, d))
    c[0, 0] = start
    c[0, 1] = slope
    return PiecewisePoly(a, b, c)


def test_integrate_constant_w():
    f = RhsProgram(2, lambda z: [1.5, -2.0])
    got = integrate_composed(f, 2, line(d=2), 0.2, 0.45)
    np.testing.assert_allclose(got, [1.5 * 0.25, -2.0 * 0.25], rtol=1e-15)


def test_integrate_square_about_zero():
    sq = RhsProgram(1, lambda z: [z[0] * z[0]])
    got = integrate_composed(sq, 2, line(), 0.0, 1.0, center=[0.0])
    assert got[0] == pytest.approx(1 / 3, abs=1e-15)


def test_integrate_affine_any_path():
    f = RhsProgram(1, lambda z: [3 * z[0] - 1])
    c = np.array([[[0.5], [2.0], [-1.0], [0.25]]])  # cubic path
    p = PiecewisePoly(0.0, 1.0, c)
    t = sp.symbols("t")
    path = 0.5 + 2 * t - t**2 + sp.Rational(1, 4) * t**3
    exact = float(sp.integrate(3 * path - 1, (t, 0.1, 0.9)))
    assert integrate_composed(f, 1, p, 0.1, 0.9)[0] == pytest.approx(exact, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 4),
    st.lists(st.integers(-3, 3), min_size=15, max_size=15),
    st.lists(st.integers(-4, 4), min_size=6, max_size=6),
)
def test_gauss_rule_exact_for_polynomial_f(r, fc, pc):
    # f of total degree <= r in two variables, so w = f and the integral is analytic
    exps = [(i, j) for i in range(r + 1) for j in range(r + 1 - i)]
    terms = list(zip(fc, exps))

    def poly(x, y):
        return sum(c * x**i * y**j for c, (i, j) in terms) + 0 * x

    f = RhsProgram(2, lambda z: [poly(z[0], z[1]), -poly(z[1], z[0])])
    coeffs = np.array(pc, dtype=float).reshape(1, 3, 2) / 4
    p = PiecewisePoly(0.0, 1.0, coeffs)
    px = Polynomial(coeffs[0, :, 0])
    py = Polynomial(coeffs[0, :, 1])

    def integral(q):
        q = q.integ()
        return q(1.0) - q(0.0)

    e1 = integral(poly(px, py))
    e2 = -integral(poly(py, px))
    got = integrate_composed(f, r, p, 0.0, 1.0)
    scale = max(1.0, abs(e1), abs(e2))
    np.testing.assert_allclose(got, [e1, e2], atol=1e-12 * scale)


def test_spanning_interval_rejected():
    with pytest.raises(GridMismatch):
        integrate_composed(RhsProgram(1, lambda z: [z[0]]), 1, two_piece(), 0.25, 0.75)


def test_gauss_node_count():
    assert gauss_node_count(1, 2) == 2
    assert gauss_node_count(2, 3) == 4
    assert gauss_node_count(0, 5) == 1


def test_sup_norm_examples():
    eta = np.full((1, 1, 1), 2.0)
    p = PiecewisePoly(0.0, 1.0, eta)
    assert sup_norm_distance(p, lambda t: np.full_like(t, 2.0)) == 0.0
    zero = PiecewisePoly(0.0, 1.0, np.zeros((3, 2, 1)))
    assert sup_norm_distance(zero, lambda t: np.ones_like(t)) == 1.0
    taylor = PiecewisePoly(0.0, 1.0, np.array([[[1.0], [1.0], [0.5], [1 / 6]]]))
    assert sup_norm_distance(taylor, np.exp) == pytest.approx(0.0516151618, abs=1e-10)
    assert sup_norm_distance(taylor, np.exp) == pytest.approx(math.e - 8 / 3, rel=1e-12)


def test_nested_fractions_are_nested():
    for k in range(2, 12):
        assert set(nested_fractions(k)) <= set(nested_fractions(k + 1))


@settings(max_examples=30, deadline=None)
@given(
    st.integers(2, 10),
    st.integers(1, 6),
    st.lists(st.floats(-1, 1), min_size=8, max_size=8),
)
def test_sup_norm_monotone_in_samples(k, pieces, c):
    coeffs = np.tile(np.array(c).reshape(1, 4, 2), (pieces, 1, 1))
    p = PiecewisePoly(0.0, 1.0, coeffs)
    ref = lambda t: np.stack([np.sin(3 * t), np.cos(5 * t)], axis=-1)  # noqa: E731
    assert sup_norm_distance(p, ref, k) <= sup_norm_distance(p, ref, k + 1)


def test_jet_functions_inside_integrand():
    f = RhsProgram(1, lambda z: [J.exp(z[0])])
    # r = 3 Taylor polynomial about 0 along t on [0, 1]: 1 + 1/2 + 1/6 + 1/24
    got = integrate_composed(f, 3, line(), 0.0, 1.0)
    assert got[0] == pytest.approx(1 + 1 / 2 + 1 / 6 + 1 / 24, rel=1e-14)
