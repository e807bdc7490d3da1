import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import polar
from qsummation import qsum_gt1 as g1
from qsummation.errors import DomainError, PoleAt
from qsummation.euler_qlt1 import euler_classical
from qsummation.qcore import QParam, SurfacePoint, q_factorial
from qsummation.special import eq_exp
from qsummation.transforms import BorelFunction

Q2 = QParam(2.0)
K = g1.Kernel
MODES = [g1.RayMode(0.0), g1.RayMode(1.2), g1.RayMode(-2.0),
         g1.SpiralMode(1.0), g1.SpiralMode(1j), g1.SpiralMode(0.7 * cmath.exp(-2j))]


@pytest.mark.parametrize("kernel", list(K))
@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_q_factorial_representations(kernel, mode, q):
    spec = g1.QSumSpec(kernel, mode, QParam(q))
    for n in range(6):
        assert g1.q_factorial_check(spec, n).residual < 1e-8


def test_q_factorial_check_values():
    spec = g1.QSumSpec(K.EqKernel, g1.RayMode(0.0), Q2)
    assert abs(g1.q_factorial_check(spec, 2).lhs - 3) < 1e-10
    spec = g1.QSumSpec(K.ThetaKernel, g1.SpiralMode(1.0), Q2)
    assert abs(g1.q_factorial_check(spec, 3).lhs - 8) < 1e-10


def test_q_laplace_of_zero():
    for mode in MODES[:2] + MODES[3:5]:
        spec = g1.QSumSpec(K.EqKernel, mode, Q2)
        assert g1.q_laplace(spec, lambda xi: 0 * xi, 0.5).value == 0


def test_qsumspec_validation():
    with pytest.raises(DomainError):
        g1.QSumSpec(K.EqKernel, g1.RayMode(0.0), QParam(0.5))
    with pytest.raises(DomainError):
        g1.QSumSpec(K.EqKernel, "ray", Q2)
    with pytest.raises(DomainError):
        g1.SpiralMode(0)


def test_euler_sums_oracle():
    # mpmath: (q-1)/ln q int_0^inf dxi/((1+xi) e_q(q xi/x)) and the bilateral sum
    assert abs(g1.euler_sum_ray(Q2, 0.3, 0.0).value - 0.244603059874280413) < 1e-14
    assert abs(g1.euler_sum_spiral(Q2, 0.3, 1.0).value - 0.244603059954607929) < 1e-14


def test_identity_theorem_example():
    v = g1.euler_four_sums(Q2, 0.3, 0.0, 1.0)
    assert abs(v["ray_eq"].value - v["ray_theta"].value) < 1e-8
    assert abs(v["spiral_eq"].value - v["spiral_theta"].value) < 1e-8


def test_verify_identity_theorem():
    samples = [(0.5 * cmath.exp(0.3j), 0.3, 1j), (1.5, 0.0, 0.8), (2.0j, 1.4, -0.5 + 0.5j)]
    assert g1.verify_identity_theorem(Q2, samples) < 1e-8


def test_pole_of_discrete_sums():
    lam = 1.0
    x0 = -(1 - Q2.p) * lam * (1 + 1e-6)
    eq = g1.euler_sum_spiral(Q2, x0, lam).value
    th = g1.euler_sum_spiral(Q2, x0, lam, kernel=K.ThetaKernel).value
    assert abs(eq) > 1e3 and abs(eq / th - 1) < 1e-4
    with pytest.raises(PoleAt):
        g1.euler_sum_spiral(Q2, -(1 - Q2.p) * lam, lam)


@pytest.mark.parametrize("N", [4, 5])
def test_gevrey_asymptotics(N):
    partial = lambda x: sum((-1) ** n * q_factorial(n, Q2) * x ** (n + 1) for n in range(N))
    for arg in (0.0, 0.5, -1.0):
        x = 1e-2 * cmath.exp(1j * arg)
        v = g1.euler_four_sums(Q2, x, arg, 1j)
        for r in v.values():
            assert abs(r.value - partial(x)) <= 2 * q_factorial(N, Q2) * abs(x) ** (N + 1)


@given(polar(0.3, 3.0, -2.5, 2.5), st.integers(-3, 3))
@settings(max_examples=15)
def test_spiral_sum_periodic_in_lambda(lam, k):
    x = 0.8 * cmath.exp(0.2j)
    a = g1.euler_sum_spiral(Q2, x, lam).value
    b = g1.euler_sum_spiral(Q2, x, lam * 2.0 ** k).value
    assert abs(a - b) < 1e-12


@given(st.floats(-2.0, 2.0), st.floats(-0.7, 0.7))
@settings(max_examples=15)
def test_ray_sums_continue_each_other(d, dd):
    x = cmath.exp(1j * (d + dd / 2))
    a = g1.euler_sum_ray(Q2, x, d).value
    b = g1.euler_sum_ray(Q2, x, d + dd).value
    assert abs(a - b) < 1e-8


@given(polar(0.3, 3.0, -2.5, 2.5))
@settings(max_examples=15)
def test_sums_solve_euler_equation(x):
    fr = lambda z: g1.euler_q_continued(Q2, z).value
    fs = lambda z: g1.euler_sum_spiral(Q2, z, 0.9j).value
    ft = lambda z: g1.euler_sum_spiral(Q2, z, 0.9j, kernel=K.ThetaKernel).value
    for f in (fr, fs, ft):
        assert g1.euler_equation_residual(Q2, f, x) < 1e-8


def test_stokes_jump():
    x = SurfacePoint(0.4, -math.pi / 2)
    eq = g1.stokes_jump(Q2, x)
    th = g1.stokes_jump(Q2, x, kernel=K.ThetaKernel)
    assert eq.residual < 1e-8 and th.residual < 1e-8
    assert abs(eq.lhs) > 1e-3
    assert abs(eq.lhs - th.lhs) < 1e-8


def test_stokes_window():
    with pytest.raises(DomainError):
        g1.stokes_jump(Q2, SurfacePoint(0.4, 0.5))


def test_disc_cont():
    assert g1.disc_cont_difference(Q2, 1.0, 0.5).residual < 1e-7
    assert g1.disc_cont_difference(Q2, 1j, 0.8 - 0.3j).residual < 1e-7
    assert g1.disc_cont_difference(QParam(1.5), 0.6 + 0.6j, 1.2j).residual < 1e-7


def test_difference_is_homogeneous():
    for x in (0.7 + 0.2j, -0.4 + 1j, 2.0):
        assert g1.homogeneous_residual(Q2, 1.0, x) < 1e-8


def test_average_over_spiral():
    assert g1.average_over_spiral(Q2, 0.7).residual < 1e-6
    assert g1.average_over_spiral(Q2, 0.7, a=cmath.exp(1j * math.pi / 6)).residual < 1e-6
    with pytest.raises(DomainError):
        g1.average_over_spiral(Q2, -0.7)


def test_average_integrand_periodic():
    a = g1.euler_sum_spiral(Q2, 0.7, 1.0).value
    b = g1.euler_sum_spiral(Q2, 0.7, 2.0).value
    assert abs(a - b) < 1e-10


def test_spiral_compare():
    xs = [cmath.rect(0.4 + 0.3 * j, 0.4 * j - 0.9) for j in range(6)]
    r1 = g1.spiral_compare(Q2, 1.0, cmath.exp(1j * math.pi / 4), xs)
    r2 = g1.spiral_compare(Q2, 0.5j, 1.7 * cmath.exp(-0.3j), xs)
    assert r1.dispersion < 1e-7 and r2.dispersion < 1e-7
    assert abs(r1.constant - r2.constant) < 1e-6 * abs(r2.constant)
    c0 = g1.spiral_constant(Q2)
    assert abs(r2.constant - c0) < 1e-6 * abs(c0)


def test_spiral_compare_degenerate():
    with pytest.raises(DomainError):
        g1.spiral_compare(Q2, 1j, 4j, [0.5])


TSCH_SPIRAL = complex(0.430346429217247292, 0.0797241077900774798)
TSCH_RAY = complex(0.430346533284959117, 0.0797240119143749328)


def test_tschakaloff_oracle():
    # mpmath: bilateral closed form and theta-kernel ray quadrature at d = 1
    r = g1.tschakaloff_sums(Q2, 1j, 1.0, 0.3)
    assert abs(r.spiral_theta - TSCH_SPIRAL) < 1e-13
    assert abs(r.closed_theta - TSCH_SPIRAL) < 1e-13
    assert abs(r.ray_theta - TSCH_RAY) < 1e-13
    assert abs(r.ray_eq - TSCH_RAY) < 1e-13
    assert r.residual < 1e-8


def test_tschakaloff_functional_equation():
    rep = lambda z: g1.tschakaloff_sums(Q2, 1j, 1.0, z)
    for key in ("spiral_theta", "spiral_eq", "ray_eq", "ray_theta"):
        f = lambda z: getattr(rep(z), key)
        assert g1.tschakaloff_functional_residual(Q2, f, 0.3 + 0.1j) < 1e-8


def test_tschakaloff_domain():
    with pytest.raises(DomainError):
        g1.tschakaloff_sums(Q2, 1j, 0.0, 0.3)
    with pytest.raises(DomainError):
        g1.tschakaloff_sums(Q2, 4.0, 1.0, 0.3)


def test_tschakaloff_series_partial():
    assert g1.tschakaloff_series(Q2, 0.1, 3) == pytest.approx(0.1 + 0.01 + 2e-3)


def test_modified_tschakaloff_n1_is_tschakaloff():
    # B_q f = 1/(1+xi) for the theta scale means f(x) = -T_q(-x); xi -> -xi maps the paths
    x, lam, d = 0.3 + 0.1j, 1j, 0.5
    rep = g1.modified_tschakaloff_suite(Q2, 1, lam, d, x)
    ref = g1.tschakaloff_sums(Q2, -lam, d - math.pi, -x)
    assert abs(rep.ray_theta + ref.ray_theta) < 1e-10
    assert abs(rep.spiral_theta + ref.spiral_theta) < 1e-10
    assert max(rep.spiral_residual, rep.ray_residual, rep.average_residual) < 1e-6


def test_modified_tschakaloff_n2():
    rep = g1.modified_tschakaloff_suite(Q2, 2, 1j, math.pi / 2, 0.3)
    assert max(rep.spiral_residual, rep.ray_residual, rep.average_residual) < 1e-6


def test_modified_tschakaloff_domain():
    with pytest.raises(DomainError):
        g1.modified_tschakaloff_suite(Q2, 4, 1j, 0.5, 0.3)


def test_q_laplace_is_linear():
    spec = g1.QSumSpec(K.EqKernel, g1.RayMode(0.2), Q2)
    f, h = (lambda xi: 1 / (1 + xi)), (lambda xi: 1 / (2 + xi) ** 2)
    x = 0.6 + 0.1j
    lhs = g1.q_laplace(spec, lambda xi: 3 * f(xi) - 2j * h(xi), x).value
    rhs = 3 * g1.q_laplace(spec, f, x).value - 2j * g1.q_laplace(spec, h, x).value
    assert abs(lhs - rhs) < 1e-13


def test_q_laplace_pole_on_path():
    spec = g1.QSumSpec(K.EqKernel, g1.RayMode(math.pi), Q2)
    phi = BorelFunction(lambda xi: 1 / (1 + xi), poles=(-1.0,))
    with pytest.raises(Exception) as err:
        g1.q_laplace(spec, phi, -0.5 + 0.1j)
    assert err.type.__name__ == "PoleOnPath"


def test_confluence_gt1():
    rows = g1.confluence_sweep_gt1(1.0, [1.1, 1.01, 1.001])
    for key in ("ray_error", "spiral_error"):
        e = [r[key] for r in rows]
        assert e[0] > e[1] > e[2]
    with pytest.raises(DomainError):
        g1.confluence_sweep_gt1(-1.0, [1.1])


@pytest.mark.parametrize("q", [1.001, 1.1, 2.0])
def test_eq_below_exponential(q):
    t = np.linspace(0.0, 30.0, 61)
    vals = np.array([eq_exp(QParam(q), s).value.real for s in t])
    assert np.all(vals <= np.exp(t) * (1 + 1e-12))


def test_confluence_reference_is_classical():
    rows = g1.confluence_sweep_gt1(1.0, [1.1])
    assert rows[0]["reference"] == euler_classical(1.0).value
