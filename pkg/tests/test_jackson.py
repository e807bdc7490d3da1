import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polar
from qsummation.errors import DomainError, NonConvergent
from qsummation.jackson import Spiral, jackson_bilateral, jackson_finite
from qsummation.qcore import QParam, q_bracket, qpoch_inf


def test_finite_monomial():
    q, x = 0.5, 0.7 + 0.2j
    r = jackson_finite(lambda t: t, x, q)
    assert abs(r.value - x * x / (1 + q)) < 1e-15


def test_finite_constant():
    assert abs(jackson_finite(lambda t: 3.0 + 0 * t, 0.4, 0.3).value - 1.2) < 1e-15


@given(polar(0.05, 1.5), st.sampled_from([0.3, 0.5, 0.8]))
def test_finite_is_q_antiderivative(x, q):
    f = lambda t: np.cos(t) + t ** 3
    F = lambda z: jackson_finite(f, z, q).value
    dq = (F(q * x) - F(x)) / ((q - 1) * x)
    assert abs(dq - f(x)) < 1e-9


@given(polar(0.05, 0.8), st.sampled_from([0.3, 0.5, 0.8]))
def test_finite_termwise_taylor(x, q):
    # f(t) = 1/(1-t): x^n -> x^{n+1}/[n+1]_q
    r = jackson_finite(lambda t: 1 / (1 - t), x, q).value
    series = sum(x ** (n + 1) / q_bracket(n + 1, q) for n in range(400))
    assert abs(r - series) < 1e-10


def test_finite_nonconvergent():
    with pytest.raises(NonConvergent):
        jackson_finite(lambda t: 1 / t ** 2, 1.0, 0.5, budget=200)


def test_bilateral_single_point():
    qp, lam = QParam(2.0), 0.7 + 0.1j
    f = lambda xi: np.where(np.abs(xi - lam) < 1e-12, 5.0, 0.0)
    r = jackson_bilateral(f, Spiral(lam, qp), recenter=False)
    assert abs(r.value - (1 - 2.0) * lam * 5.0) < 1e-14


def test_bilateral_two_forms_of_q_euler():
    # the n < 0 tail vanishes because (q^-k; q)_inf = 0
    q, x = 0.5, 0.3 + 0.1j
    f = lambda xi: qpoch_inf((1 - q) * q * xi / x, q) / (1 + xi)
    fin = jackson_finite(f, x / (1 - q), q).value
    bil = jackson_bilateral(f, Spiral(x / (1 - q), QParam(q)), recenter=False).value
    assert abs(fin - bil) < 1e-10


def _gauss(xi):
    return np.exp(-np.log(xi) ** 2) / (1 + xi)


@given(polar(0.3, 3.0, -2.5, 2.5), st.integers(-4, 4), st.sampled_from([1.5, 2.0, 3.0]))
def test_bilateral_reanchor_invariance(lam, k, q):
    s = Spiral(lam, QParam(q))
    a = jackson_bilateral(_gauss, s).value
    b = jackson_bilateral(_gauss, s.reanchor(k), recenter=False).value
    assert abs(a - b) <= 1e-12 * abs(a)


@given(polar(0.3, 3.0, -2.5, 2.5), polar(0.1, 3.0))
def test_bilateral_linear(lam, c):
    s = Spiral(lam, QParam(2.0))
    g = lambda xi: np.exp(-np.log(xi) ** 2 / 2) * xi
    lhs = jackson_bilateral(lambda xi: c * _gauss(xi) + g(xi), s).value
    rhs = c * jackson_bilateral(_gauss, s).value + jackson_bilateral(g, s).value
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs))


def test_bilateral_nonconvergent():
    with pytest.raises(NonConvergent):
        jackson_bilateral(lambda xi: 1.0 + 0 * xi, Spiral(1.0, QParam(2.0)), budget=100)


def test_spiral_equality():
    qp = QParam(2.0)
    assert Spiral(1.0, qp) == Spiral(8.0, qp)
    assert Spiral(1.0, qp) != Spiral(1.5, qp)
    assert Spiral(1j, qp).index_of(0.25j) == -2
    with pytest.raises(DomainError):
        Spiral(0, qp)
