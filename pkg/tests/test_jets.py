import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from randivp import jets as J
from randivp.errors import DivisionByZeroJet, DomainError
from randivp.jets import Jet, RhsProgram, jet_arith, ode_taylor_coeffs, truncated_taylor_of_f


def sympy_series(expr, t, order):
    poly = sp.series(expr, t, 0, order + 1).removeO()
    return np.array([float(poly.coeff(t, k)) for k in range(order + 1)])


def test_mul_div_exp_examples():
    np.testing.assert_array_equal(jet_arith(Jet([1, 1, 0]), Jet([1, 1, 0]), "mul").coeffs, [1, 2, 1])
    np.testing.assert_array_equal(jet_arith(Jet([1, 0, 0]), Jet([1, 1, 0]), "div").coeffs, [1, -1, 1])
    np.testing.assert_allclose(jet_arith(Jet([0, 1, 0, 0]), None, "exp").coeffs, [1, 1, 0.5, 1 / 6])


@pytest.mark.parametrize(
    "build, expr",
    [
        (lambda x: J.log(1 + x + x * x), lambda t: sp.log(1 + t + t**2)),
        (lambda x: J.sin(2 * x) + J.cos(x * x), lambda t: sp.sin(2 * t) + sp.cos(t**2)),
        (lambda x: J.sqrt(4 + x), lambda t: sp.sqrt(4 + t)),
        (lambda x: J.power(1 + x, 0.5) * J.exp(-x), lambda t: sp.sqrt(1 + t) * sp.exp(-t)),
        (lambda x: J.power(1 + 3 * x, 5), lambda t: (1 + 3 * t) ** 5),
        (lambda x: 1 / (2 - x) ** 2, lambda t: 1 / (2 - t) ** 2),
    ],
)
def test_elementary_functions_match_symbolic_series(build, expr):
    t = sp.symbols("t")
    got = build(Jet.variable(0.0, 7)).coeffs
    np.testing.assert_allclose(got, sympy_series(expr(t), t, 7), rtol=1e-12, atol=1e-13)


def test_integer_power_is_exact():
    got = J.power(Jet([1.0, 1.0, 0, 0, 0, 0]), 5).coeffs
    np.testing.assert_array_equal(got, [1, 5, 10, 10, 5, 1])


def test_dispatch_on_plain_numbers():
    assert J.exp(0.0) == 1.0
    np.testing.assert_allclose(J.sin(np.array([0.0, np.pi / 2])), [0, 1], atol=1e-15)


def test_division_by_zero_and_domain_errors():
    with pytest.raises(DivisionByZeroJet):
        Jet([1.0, 1.0]) / Jet([0.0, 1.0])
    with pytest.raises(DomainError):
        J.log(Jet([-1.0, 1.0]))
    with pytest.raises(DomainError):
        J.sqrt(Jet([0.0, 1.0]))


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        Jet([1.0, 2.0]) + Jet([1.0, 2.0, 3.0])


small = st.integers(-8, 8).map(float)
jets3 = st.lists(small, min_size=4, max_size=4).map(Jet)


@given(jets3, jets3, jets3)
def test_ring_laws(a, b, c):
    # small integers keep every product exact
    np.testing.assert_array_equal((a * b).coeffs, (b * a).coeffs)
    np.testing.assert_array_equal(((a * b) * c).coeffs, (a * (b * c)).coeffs)
    np.testing.assert_array_equal((a * (b + c)).coeffs, (a * b + a * c).coeffs)
    np.testing.assert_array_equal((a - a).coeffs, np.zeros(4))


@given(jets3, st.lists(st.floats(0.5, 4), min_size=4, max_size=4))
def test_division_inverts_multiplication(a, bc):
    b = Jet(bc)
    np.testing.assert_allclose(((a * b) / b).coeffs, a.coeffs, rtol=1e-9, atol=1e-9)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_exp_log_roundtrip(c0, c1):
    x = Jet([c0, c1, 0.3, -0.1, 0.0])
    np.testing.assert_allclose(J.log(J.exp(x)).coeffs, x.coeffs, atol=1e-12)


def test_batched_jets_act_componentwise():
    x = Jet.variable(np.array([0.0, 1.0, 2.0]), 3)
    got = J.exp(x).coeffs
    for i, x0 in enumerate([0.0, 1.0, 2.0]):
        np.testing.assert_allclose(got[:, i], np.exp(x0) * np.array([1, 1, 0.5, 1 / 6]))


def test_ode_taylor_coeffs_examples():
    ident = RhsProgram(1, lambda z: [z[0]])
    np.testing.assert_allclose(ode_taylor_coeffs(ident, [1.0], 3).coeffs[:, 0], [1, 1, 0.5, 1 / 6])
    const = RhsProgram(1, lambda z: [2.5])
    np.testing.assert_array_equal(ode_taylor_coeffs(const, [0.7], 3).coeffs[:, 0], [0.7, 2.5, 0, 0])
    riccati = RhsProgram(1, lambda z: [z[0] * z[0]])
    np.testing.assert_allclose(ode_taylor_coeffs(riccati, [1.0], 3).coeffs[:, 0], [1, 1, 1, 1])


def test_second_coefficient_against_finite_difference():
    # z'' = Df(z) f(z); a central difference along f gives 2 * c_2
    f = RhsProgram(2, lambda z: [J.sin(z[1]) + z[0] * z[0], z[0] * z[1] - 1.0])
    y = np.array([0.3, -0.7])
    c = ode_taylor_coeffs(f, y, 2).coeffs
    fy = f(y)
    e = 1e-6
    fd = (f(y + e * fy) - f(y - e * fy)) / (2 * e)
    np.testing.assert_allclose(2 * c[2], fd, rtol=1e-7, atol=1e-9)


def test_truncated_taylor_examples():
    sq = RhsProgram(1, lambda z: [z[0] * z[0]])
    h = truncated_taylor_of_f(sq, [1.0], [1.0], 1)
    np.testing.assert_array_equal(h[:, 0], [1, 2])
    assert h.sum() == 3 and sq([2.0])[0] == 4

    f = RhsProgram(2, lambda z: [J.exp(z[0]) * z[1], J.cos(z[1])])
    x = np.array([0.2, 0.4])
    h = truncated_taylor_of_f(f, x, np.zeros(2), 4)
    np.testing.assert_array_equal(h[0], f(x))
    np.testing.assert_array_equal(h[1:], 0)


def test_truncated_taylor_affine():
    f = RhsProgram(2, lambda z: [2 * z[0] - z[1] + 1, 3 * z[1]])
    x, v = np.array([1.0, 2.0]), np.array([0.5, -0.25])
    for r in (1, 2, 4):
        h = truncated_taylor_of_f(f, x, v, r)
        np.testing.assert_array_equal(h[2:], 0)
        np.testing.assert_array_equal(h.sum(0), f(x + v))


@settings(max_examples=50)
@given(
    st.lists(st.floats(-2, 2), min_size=3, max_size=3),
    st.floats(-1, 1),
    st.floats(-1, 1),
)
def test_truncated_taylor_reproduces_cubics(coef, x, v):
    # degree 3 polynomial: r = 3 gives the exact value at x + v
    c0, c1, c2 = coef
    f = RhsProgram(1, lambda z: [c0 + c1 * z[0] + c2 * z[0] * z[0] * z[0]])
    h = truncated_taylor_of_f(f, [x], [v], 3)
    np.testing.assert_allclose(h.sum(0), f([x + v]), rtol=1e-12, atol=1e-12)


def test_batched_truncated_taylor_shape():
    f = RhsProgram(2, lambda z: [z[1], -z[0]])
    h = truncated_taylor_of_f(f, np.zeros((5, 3, 2)), np.ones((5, 3, 2)), 2)
    assert h.shape == (3, 5, 3, 2)
