"""
Summation of divergent q-series for ``q > 1``.

Four q-Laplace operators act on a Borel-plane function ``phi``:

* ray, e_q kernel:      ``(q-1)/ln q  int_0^{e^{id} inf} phi(xi) / e_q(q xi/x) d xi``
* ray, theta kernel:    ``q/ln q      int_0^{e^{id} inf} phi(xi) / theta_p(q xi/x) d xi``
* spiral, e_q kernel:   ``q/(1-p) int_{lambda p^Z} phi(xi/(1-p)) / e_q(q xi/((1-p) x)) d_p xi``
* spiral, theta kernel: ``q/(1-p) int_{lambda p^Z} phi(xi) / theta_p(q xi/x) d_p xi``

with ``p = 1/q``. Applied to the two q-Borel transforms of the q-Euler
series ``sum (-1)^n [n]_q^! x^{n+1}`` they give its four sums; applied to
the Tschakaloff series ``sum q^{n(n-1)/2} x^{n+1}`` they give the sums
used to compare the procedures for generic q-Gevrey series.

Spiral sums of the q-Euler series are indexed by ``lambda`` such that
their poles lie on ``-(1-p) lambda q^Z``; the Jackson sum is then
anchored at ``(1-p) lambda``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleAt, PoleOnPath
from .euler_qlt1 import _euler_q_vec, euler_classical
from .jackson import Spiral, jackson_bilateral
from .qcore import (EPS, NumericResult, QParam, Regime, SurfacePoint, log_qpoch_inf,
                    q_factorial)
from .special import _log_eq, _q_log, log_theta
from .transforms import BorelFunction, ray_integral

__all__ = [
    "Kernel", "RayMode", "SpiralMode", "QSumSpec", "IdentityCheck", "q_laplace",
    "q_factorial_check",
    "euler_borel_eq", "euler_borel_theta", "euler_sum_ray", "euler_sum_spiral",
    "euler_q_continued", "euler_four_sums", "verify_identity_theorem",
    "euler_equation_residual", "stokes_jump", "disc_cont_difference",
    "homogeneous_residual", "average_over_spiral", "spiral_compare",
    "spiral_constant", "SpiralComparison", "tschakaloff_series",
    "tschakaloff_sums", "TschakaloffReport", "tschakaloff_functional_residual",
    "modified_tschakaloff_suite", "ModifiedTschakaloffReport",
    "confluence_sweep_gt1",
]

_TOL = 1e-13
_GL32 = np.polynomial.legendre.leggauss(32)


class Kernel(enum.Enum):
    """Laplace kernel: ``1/e_q`` or ``1/theta_p``."""

    EqKernel = "EqKernel"
    ThetaKernel = "ThetaKernel"


@dataclass(frozen=True)
class RayMode:
    """Continuous summation along the direction ``d``."""

    d: float


@dataclass(frozen=True)
class SpiralMode:
    """Discrete summation over the spiral ``anchor p^Z``."""

    anchor: complex

    def __post_init__(self):
        a = complex(self.anchor)
        if a == 0:
            raise DomainError("a spiral needs a nonzero anchor")
        object.__setattr__(self, "anchor", a)


@dataclass(frozen=True)
class QSumSpec:
    """Kernel, path and base of a q-Laplace transform (``q > 1``)."""

    kernel: Kernel
    mode: object
    qp: QParam
    tol: float = _TOL

    def __post_init__(self):
        qp = QParam.of(self.qp).require(Regime.GreaterThanOne)
        object.__setattr__(self, "qp", qp)
        if not isinstance(self.kernel, Kernel):
            raise DomainError("kernel must be a Kernel", kernel=self.kernel)
        if isinstance(self.mode, RayMode):
            if not math.isfinite(float(self.mode.d)):
                raise DomainError("ray direction must be finite")
        elif not isinstance(self.mode, SpiralMode):
            raise DomainError("mode must be RayMode or SpiralMode", mode=self.mode)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of a numerical identity and their distance."""

    lhs: complex
    rhs: complex
    residual: float

    def __float__(self):
        return float(self.residual)


def _check(lhs, rhs):
    lhs, rhs = complex(lhs), complex(rhs)
    return IdentityCheck(lhs, rhs, float(abs(lhs - rhs)))


def _inv_kernel(kernel, q, z):
    """``1/e_q(z)`` or ``1/theta_p(z)``; overflow of the kernel gives 0."""
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        if kernel is Kernel.EqKernel:
            return np.exp(-_log_eq(q, z))
        return np.exp(-log_theta(1.0 / q, z))


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def _ray_x(x, d):
    """Projected ``x`` after checking ``arg x in (d - pi, d + pi)``."""
    if isinstance(x, SurfacePoint):
        off = x.argument - d
    else:
        x = complex(x)
        if x == 0:
            raise DomainError("x must be nonzero")
        off = _wrap(cmath.phase(x) - d)
    if not abs(off) < math.pi:
        raise DomainError("ray sums need arg x in (d - pi, d + pi)", d=d)
    return complex(x)


def q_laplace(spec, phi, x):
    """Apply one of the four q-Laplace transforms to ``phi`` at ``x``.

    Parameters
    ----------
    spec : QSumSpec
    phi : callable or BorelFunction
        Vectorized Borel-plane function. Declared poles are checked
        against the integration path.
    x : complex or SurfacePoint
        Ray mode needs ``arg x in (d - pi, d + pi)``; spiral mode needs
        ``x`` off ``-anchor q^Z`` where the kernel vanishes on the spiral.

    Returns
    -------
    NumericResult

    Raises
    ------
    PoleOnPath
        A pole of ``phi`` lies on the ray or the spiral.
    DomainError
        ``x`` outside the domain of the chosen transform.

    Examples
    --------
    >>> spec = QSumSpec(Kernel.ThetaKernel, SpiralMode(1.0), QParam(2.0))
    >>> r = q_laplace(spec, lambda t: t ** 2, 1.0)
    >>> round(r.value.real, 10)
    2.0
    """
    q, p = spec.qp.q, spec.qp.p
    kern = spec.kernel
    mode = spec.mode
    if isinstance(mode, RayMode):
        d = float(mode.d)
        xv = _ray_x(x, d)
        if isinstance(phi, BorelFunction):
            z = phi.pole_on_ray(d)
            if z is not None:
                raise PoleOnPath("declared pole of phi on the ray", pole=z, d=d)
        pref = (q - 1) / spec.qp.lnq if kern is Kernel.EqKernel else q / spec.qp.lnq
        g = lambda xi: phi(xi) * _inv_kernel(kern, q, q * xi / xv)
        r = ray_integral(g, d, spec.tol)
        return NumericResult(pref * r.value, abs(pref) * r.abs_err, r.terms_used, True)
    xv = complex(x)
    if xv == 0:
        raise DomainError("x must be nonzero")
    pspiral = Spiral(mode.anchor, QParam(p))
    if pspiral.contains(-xv):
        raise DomainError("x lies on the pole spiral -anchor q^Z of the discrete sum",
                          x=xv, anchor=mode.anchor)
    if kern is Kernel.EqKernel:
        c = 1.0 - p
        if isinstance(phi, BorelFunction):
            z = phi.pole_on_spiral(Spiral(mode.anchor / c, QParam(p)))
            if z is not None:
                raise PoleOnPath("declared pole of phi on the spiral", pole=z)
        f = lambda xi: phi(xi / c) * _inv_kernel(kern, q, q * xi / (c * xv))
    else:
        if isinstance(phi, BorelFunction):
            z = phi.pole_on_spiral(pspiral)
            if z is not None:
                raise PoleOnPath("declared pole of phi on the spiral", pole=z)
        f = lambda xi: phi(xi) * _inv_kernel(kern, q, q * xi / xv)
    pref = q / (1 - p)
    r = jackson_bilateral(f, pspiral, tol=spec.tol * 1e-2)
    return NumericResult(pref * r.value, pref * r.abs_err, r.terms_used, True)


def q_factorial_check(spec, n, x=1.0):
    """Reproduce ``[n]_q^! x^{n+1}`` or ``q^{n(n-1)/2} x^{n+1}`` from ``xi^n``.

    The e_q kernels invert the ``[n]_q^!`` Borel transform and the theta
    kernels the ``q^{n(n-1)/2}`` one.

    Parameters
    ----------
    spec : QSumSpec
    n : int
        Nonnegative power.
    x : complex or SurfacePoint, optional

    Returns
    -------
    IdentityCheck
        ``residual`` is relative to the exact value.

    Examples
    --------
    >>> spec = QSumSpec(Kernel.EqKernel, RayMode(0.5), QParam(2.0))
    >>> q_factorial_check(spec, 2).residual < 1e-12
    True
    """
    n = int(n)
    if n < 0:
        raise DomainError("n must be nonnegative", n=n)
    q = spec.qp.q
    xv = complex(x)
    scale = q_factorial(n, spec.qp)
    if spec.kernel is Kernel.ThetaKernel:
        scale = q ** (n * (n - 1) / 2)
    exact = scale * xv ** (n + 1)
    lhs = q_laplace(spec, lambda xi: xi ** n, x).value
    return IdentityCheck(complex(lhs), exact, float(abs(lhs - exact) / abs(exact)))


# q-Euler series --------------------------------------------------------

def euler_borel_eq():
    """``B_q`` transform of the q-Euler series with the ``[n]_q^!`` scale: ``1/(1+xi)``."""
    return BorelFunction(lambda xi: 1.0 / (1.0 + np.asarray(xi, dtype=complex)),
                         poles=(-1.0,))


def euler_borel_theta(qp):
    """Transform with the ``q^{n(n-1)/2}`` scale: ``sum (-1)^n [n]_p^! xi^n``.

    This is ``E_p(xi)/xi`` with ``E_p`` the q-Euler function of base
    ``p = 1/q``; its poles lie on ``(p-1) q^N``.
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    p = qp.p

    def ev(xi):
        xi = np.asarray(xi, dtype=complex)
        return _euler_q_vec(p, xi) / xi

    return BorelFunction(ev, pole_spirals=(Spiral(p - 1.0, qp),))


def _euler_phi(kernel, qp):
    return euler_borel_eq() if kernel is Kernel.EqKernel else euler_borel_theta(qp)


def euler_sum_ray(qp, x, d, kernel=Kernel.EqKernel, tol=_TOL):
    """Continuous sum of the q-Euler series in the direction ``d``.

    ``EqKernel`` gives the sum built on ``1/(1+xi)``, ``ThetaKernel``
    the one built on ``E_p(xi)/xi``; both are equal.
    """
    spec = QSumSpec(kernel, RayMode(d), qp, tol)
    return q_laplace(spec, _euler_phi(kernel, spec.qp), x)


def _euler_pole_check(qp, lam, x):
    c = 1.0 - qp.p
    if Spiral(-1.0, qp).contains(lam):
        raise DomainError("lambda must lie off -q^Z", lam=lam)
    if Spiral(-c * lam, qp).contains(complex(x), atol=1e-9):
        raise PoleAt("x is a pole -(1-p) lambda q^n of the discrete sum",
                     pole=complex(x), lam=lam)


def euler_sum_spiral(qp, x, lam, kernel=Kernel.EqKernel, tol=_TOL):
    """Discrete sum of the q-Euler series along ``[lambda; q]``.

    The result is meromorphic in ``x`` with simple poles on
    ``-(1-p) lambda q^Z`` and unchanged under ``lambda -> q lambda``.
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    lam = complex(lam)
    _euler_pole_check(qp, lam, x)
    spec = QSumSpec(kernel, SpiralMode((1 - qp.p) * lam), qp, tol)
    return q_laplace(spec, _euler_phi(kernel, qp), complex(x))


def _direction_for(arg):
    lo, hi = max(arg - math.pi, -math.pi), min(arg + math.pi, math.pi)
    if not lo < hi:
        raise DomainError("continuation is defined for |arg x| < 2 pi", argument=arg)
    return 0.5 * (lo + hi)


def euler_q_continued(qp, x, kernel=Kernel.EqKernel, tol=_TOL):
    """q-Euler sum continued to ``|arg x| < 2 pi`` on the surface of the log.

    The direction is the midpoint of the admissible window
    ``(arg x - pi, arg x + pi)`` intersected with ``(-pi, pi)``.
    """
    x = SurfacePoint.of(x)
    if not abs(x.argument) < 2 * math.pi:
        raise DomainError("continuation is defined for |arg x| < 2 pi", argument=x.argument)
    return euler_sum_ray(qp, x, _direction_for(x.argument), kernel, tol)


def euler_four_sums(qp, x, d, lam, tol=_TOL):
    """The four sums of the q-Euler series at ``x``.

    Returns
    -------
    dict
        Keys ``"ray_eq"``, ``"ray_theta"``, ``"spiral_eq"``,
        ``"spiral_theta"`` mapping to NumericResult.
    """
    return {
        "ray_eq": euler_sum_ray(qp, x, d, Kernel.EqKernel, tol),
        "ray_theta": euler_sum_ray(qp, x, d, Kernel.ThetaKernel, tol),
        "spiral_eq": euler_sum_spiral(qp, x, lam, Kernel.EqKernel, tol),
        "spiral_theta": euler_sum_spiral(qp, x, lam, Kernel.ThetaKernel, tol),
    }


def verify_identity_theorem(qp, samples, tol=_TOL):
    """Largest distance between the e_q-kernel and theta-kernel sums.

    Parameters
    ----------
    samples : iterable of (x, d, lambda)

    Returns
    -------
    float
    """
    worst = 0.0
    for x, d, lam in samples:
        s = euler_four_sums(qp, x, d, lam, tol)
        worst = max(worst, abs(s["ray_eq"].value - s["ray_theta"].value),
                    abs(s["spiral_eq"].value - s["spiral_theta"].value))
    return worst


def euler_equation_residual(qp, fn, x):
    """``|x^2 d_q y + y - x|`` for ``y = fn``, with ``d_q y = (y(qx)-y(x))/((q-1)x)``.

    ``fn`` is called on ``x`` and on ``q x`` (a SurfacePoint keeps its
    argument).
    """
    qp = QParam.of(qp)
    q = qp.q
    if isinstance(x, SurfacePoint):
        xq, xv = x.scale(q), x.value
    else:
        xv = complex(x)
        xq = q * xv
    y, yq = complex(fn(x)), complex(fn(xq))
    return float(abs(xv * (yq - y) / (q - 1) + y - xv))


# Stokes phenomenon and comparisons -------------------------------------------

def _stokes_constant(qp, x):
    """``2 pi i (q-1)/ln q / e_q(-q/x)``."""
    with np.errstate(over="ignore"):
        inv = complex(np.exp(-_log_eq(qp.q, -qp.q / complex(x))))
    return 2j * math.pi * (qp.q - 1) / qp.lnq * inv


def stokes_jump(qp, x, kernel=Kernel.EqKernel, tol=_TOL):
    """Residual of the Stokes relation of the q-Euler sum.

    For ``arg x in (-2 pi, 0)`` the continued sum satisfies
    ``E_q(x e^{2 pi i}) - E_q(x) = 2 pi i (q-1)/ln q / e_q(-q/x)``.
    The left value is evaluated along the direction ``d - 2 pi``, the
    same ray as ``d``.

    Returns
    -------
    IdentityCheck
        ``lhs`` is the computed jump, ``rhs`` the closed form.
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    x = SurfacePoint.of(x)
    if not -2 * math.pi < x.argument < 0:
        raise DomainError("the Stokes relation is stated for arg x in (-2 pi, 0)",
                          argument=x.argument)
    d0 = _direction_for(x.argument)
    d1 = _direction_for(x.argument + 2 * math.pi) - 2 * math.pi
    # both values use the projected x; only the direction differs
    up = _ray_value(qp, x.value, d1, kernel, tol)
    base = _ray_value(qp, x.value, d0, kernel, tol)
    return _check(up - base, _stokes_constant(qp, x.value))


def _ray_value(qp, xv, d, kernel, tol):
    spec = QSumSpec(kernel, RayMode(d), qp, tol)
    return q_laplace(spec, _euler_phi(kernel, spec.qp), complex(xv)).value


def _modular(logz, lnq):
    return np.exp(-2j * math.pi * logz / lnq)


def _disc_cont_rhs(qp, lam, x):
    lnq = qp.lnq
    lnps = -4 * math.pi ** 2 / lnq
    ps = math.exp(lnps)
    lc = cmath.log(-1.0 / lam)
    logx = x.log()
    t1 = _modular(logx + lc - math.log(1 - qp.p), lnq)
    t0 = _modular(lc, lnq)
    ell = complex(_q_log(ps, t1, lnbase=lnps)) - complex(_q_log(ps, t0, lnbase=lnps))
    with np.errstate(over="ignore"):
        inv = complex(np.exp(-_log_eq(qp.q, -qp.q / x.value)))
    return -2j * math.pi * (qp.q - 1) / lnq * ell * inv


def disc_cont_difference(qp, lam, x, tol=_TOL):
    """Compare the continuous and discrete q-Euler sums through the modular map.

    Checks ``E_q(x) - E_q^[lambda](x) = -2 pi i (q-1)/ln q
    [ell_{p*}((-x/(lambda(1-p)))^*) - ell_{p*}((-1/lambda)^*)] / e_q(-q/x)``
    with ``p* = exp(-4 pi^2/ln q)`` and ``z^* = exp(-2 pi i log z/ln q)``.
    The logarithm of ``x`` is taken on the surface, so the identity holds
    on the whole sector ``|arg x| < 2 pi``. Near the zeros ``(1-p) q^{-N}``
    of ``e_q(-q/x)`` the right side has a removable singularity and is
    evaluated as a mean over a small circle.

    Returns
    -------
    IdentityCheck
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    lam = complex(lam)
    x = SurfacePoint.of(x)
    _euler_pole_check(qp, lam, x.value)
    lhs = (euler_q_continued(qp, x, tol=tol).value
           - euler_sum_spiral(qp, x.value, lam, tol=tol).value)
    c = 1 - qp.p
    k = math.log(x.modulus / c) / qp.lnq
    near_zero = abs(_wrap(x.argument)) < 1e-3 and k < 0.5 and abs(k - round(k)) < 1e-3
    if near_zero:
        r = 1e-2
        th = 2 * math.pi * np.arange(32) / 32
        vals = [_disc_cont_rhs(qp, lam, SurfacePoint(x.modulus * math.exp(r * math.cos(t)),
                                                     x.argument + r * math.sin(t)))
                for t in th]
        # mean value property in log x around the removable singularity
        rhs = complex(np.mean(vals))
    else:
        rhs = _disc_cont_rhs(qp, lam, x)
    return _check(lhs, rhs)


def homogeneous_residual(qp, lam, x, tol=_TOL):
    """``|x^2 d_q D + D|`` for ``D = E_q - E_q^[lambda]``."""
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    x = SurfacePoint.of(x)

    def D(z):
        return (euler_q_continued(qp, z, tol=tol).value
                - euler_sum_spiral(qp, z.value, lam, tol=tol).value)

    q = qp.q
    y, yq = D(x), D(x.scale(q))
    return float(abs(x.value * (yq - y) / (q - 1) + y))


def _average(fn, a, lnq, nodes=32):
    """``(1/ln q) int_a^{qa} fn(lambda) d lambda/lambda`` by Gauss-Legendre in log."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (xg + 1.0) * lnq
    la = cmath.log(a)
    tot = 0j
    for ui, wi in zip(u, wg):
        lam = cmath.exp(la + ui)
        try:
            v = fn(lam)
        except (PoleAt, PoleOnPath, DomainError):
            v = fn(lam * cmath.exp(1e-6j))
        tot += 0.5 * wi * v
    return tot


def average_over_spiral(qp, x, a=1.0, nodes=32, tol=_TOL):
    """Compare ``E_q(x)`` with the mean of ``E_q^[lambda](x)`` over ``lambda in [a, qa]``.

    Parameters
    ----------
    x : complex
        Off the closed negative real axis.
    a : complex, optional
        Start of the path; off ``(-inf, 0]``.

    Returns
    -------
    IdentityCheck
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    x = complex(x)
    if x == 0 or (x.imag == 0 and x.real < 0):
        raise DomainError("the averaging identity needs x off (-inf, 0]", x=x)
    a = complex(a)
    if a == 0 or (a.imag == 0 and a.real < 0):
        raise DomainError("the path start must lie off (-inf, 0]", a=a)
    avg = _average(lambda lam: euler_sum_spiral(qp, x, lam, tol=tol).value, a, qp.lnq, nodes)
    return _check(euler_q_continued(qp, x, tol=tol).value, avg)


@dataclass(frozen=True)
class SpiralComparison:
    """Fitted constant of the discrete Stokes relation."""

    constant: complex
    dispersion: float
    values: tuple = field(default=())


def _theta_p(qp, z):
    return complex(np.exp(log_theta(qp.p, complex(z))))


def spiral_constant(qp):
    """Closed form ``-(q-1) (p; p)_inf^3`` of the spiral-comparison constant."""
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    return -(qp.q - 1) * math.exp(3 * float(log_qpoch_inf(qp.p, qp.p).real))


def spiral_compare(qp, lam, mu, xs, tol=_TOL):
    """Fit the constant relating two discrete sums of the q-Euler series.

    The difference satisfies ::

        (E^[lam] - E^[mu])(x) e_q(-q/x) = C mu theta(-lam/mu)/(theta(lam) theta(mu))
            theta(-(1-p)/x) theta(-(1-p) lam mu/x)
            / (theta((1-p) lam/x) theta((1-p) mu/x))

    with ``theta = theta_p`` and ``C`` depending only on ``q``. The ratio
    is computed at each sample.

    Returns
    -------
    SpiralComparison
        Mean ratio, largest relative deviation from it, and the ratios.

    Raises
    ------
    DomainError
        If ``lam/mu`` is in ``q^Z`` (the two sums coincide).
    PoleAt
        If a sample hits a zero of a theta factor.
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    lam, mu = complex(lam), complex(mu)
    if Spiral(mu, qp).contains(lam):
        raise DomainError("degenerate input: lambda and mu lie on the same spiral",
                          lam=lam, mu=mu)
    c = 1 - qp.p
    pref = mu * _theta_p(qp, -lam / mu) / (_theta_p(qp, lam) * _theta_p(qp, mu))
    vals = []
    for x in xs:
        x = complex(x)
        den = pref * _theta_p(qp, -c / x) * _theta_p(qp, -c * lam * mu / x)
        num_t = _theta_p(qp, c * lam / x) * _theta_p(qp, c * mu / x)
        if abs(den) < 1e-300 or not np.isfinite(den):
            raise PoleAt("sample is a zero of the theta quotient", pole=x)
        diff = (euler_sum_spiral(qp, x, lam, tol=tol).value
                - euler_sum_spiral(qp, x, mu, tol=tol).value)
        with np.errstate(over="ignore"):
            eqv = complex(np.exp(_log_eq(qp.q, -qp.q / x)))
        vals.append(diff * eqv * num_t / den)
    vals = np.array(vals)
    C = complex(vals.mean())
    disp = float(np.max(np.abs(vals - C)) / abs(C)) if C != 0 else float("inf")
    return SpiralComparison(C, disp, tuple(complex(v) for v in vals))


# Tschakaloff series ----------------------------------------------------

def tschakaloff_series(qp, x, nterms):
    """Partial sum ``sum_{n<N} q^{n(n-1)/2} x^{n+1}``."""
    qp = QParam.of(qp)
    n = np.arange(nterms)
    return complex(np.sum(np.exp(n * (n - 1) / 2.0 * qp.lnq) * complex(x) ** (n + 1)))


def _ep(p, z):
    """``e_p(z) = 1/((1-p) z; p)_inf`` for ``p < 1``."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(-log_qpoch_inf((1 - p) * np.asarray(z, dtype=complex), p))


def _family(qp, a):
    """Borel transforms of ``-T_q(-x/a)``: ``1/(a+xi)`` and ``e_p(-xi/a)/a``."""
    p = qp.p
    phi = BorelFunction(lambda xi: 1.0 / (a + np.asarray(xi, dtype=complex)), poles=(-a,))
    psi = BorelFunction(lambda xi: _ep(p, -np.asarray(xi, dtype=complex) / a) / a,
                        pole_spirals=(Spiral(-a / (1 - p), qp),))
    return phi, psi


def _closed_spiral_theta(qp, x, lam, nmax=400):
    p = qp.p
    n = np.arange(-nmax, nmax + 1).astype(float)
    logt = (n * (n + 1) / 2.0 * math.log(p) + n * cmath.log(lam / x)
            - np.log(1 - p ** (n + 1) * lam))
    with np.errstate(under="ignore", over="ignore"):
        s = np.sum(np.exp(logt))
    return lam / _theta_p(qp, lam / x) * s


def _closed_spiral_eq(qp, x, lam, nmax=400):
    p = qp.p
    n = np.arange(-nmax, nmax + 1).astype(float)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        logt = (log_qpoch_inf(-p ** (1 - n) * x / lam, p) - log_qpoch_inf(p ** (n + 1) * lam, p)
                + n * (n + 1) / 2.0 * math.log(p) + n * cmath.log(lam / x))
        s = np.sum(np.exp(logt))
    pp = math.exp(float(log_qpoch_inf(p, p).real))
    return lam * pp / _theta_p(qp, lam / x) * s


@dataclass(frozen=True)
class TschakaloffReport:
    """Four sums of the Tschakaloff series and two closed forms."""

    spiral_theta: complex
    spiral_eq: complex
    ray_theta: complex
    ray_eq: complex
    closed_theta: complex
    closed_eq: complex

    @property
    def residual(self):
        vals = [self.spiral_eq, self.closed_theta, self.closed_eq]
        sp = max(abs(v - self.spiral_theta) for v in vals)
        return float(max(sp, abs(self.ray_eq - self.ray_theta)))


def _tschakaloff_values(qp, x, lam=None, d=None, a=-1.0, tol=_TOL):
    """Sums of ``-T_q(-x/a)``; ``a = -1`` gives ``-T_q``."""
    phi, psi = _family(qp, a)
    out = {}
    if lam is not None:
        out["spiral_theta"] = q_laplace(QSumSpec(Kernel.ThetaKernel, SpiralMode(lam), qp, tol),
                                        phi, x).value
        out["spiral_eq"] = q_laplace(QSumSpec(Kernel.EqKernel, SpiralMode(lam), qp, tol),
                                     psi, x).value
    if d is not None:
        out["ray_theta"] = q_laplace(QSumSpec(Kernel.ThetaKernel, RayMode(d), qp, tol),
                                     phi, x).value
        out["ray_eq"] = q_laplace(QSumSpec(Kernel.EqKernel, RayMode(d), qp, tol), psi, x).value
    return out


def tschakaloff_sums(qp, lam, d, x, tol=_TOL):
    """Sums of ``T_q(x) = sum q^{n(n-1)/2} x^{n+1}`` by all four procedures.

    Its Borel transforms are ``1/(1-xi)`` (theta kernel) and ``e_p(xi)``
    (e_q kernel), both singular on ``q^N``.

    Parameters
    ----------
    lam : complex
        Off ``q^Z``, which contains the pole ``xi = 1``.
    d : float
        Direction off the positive real axis.
    x : complex
        ``arg x in (d - pi, d + pi)`` and ``x`` off ``-lam q^Z``.

    Returns
    -------
    TschakaloffReport
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    lam = complex(lam)
    if abs(_wrap(float(d))) < 1e-12:
        raise DomainError("direction 0 meets the pole xi = 1 of the Borel transform", d=d)
    if Spiral(1.0, qp).contains(lam):
        raise DomainError("lambda must lie off q^Z", lam=lam)
    # the family member a = -1 is -T_q
    v = {k: -w for k, w in _tschakaloff_values(qp, complex(x), lam, d, -1.0, tol).items()}
    return TschakaloffReport(v["spiral_theta"], v["spiral_eq"], v["ray_theta"], v["ray_eq"],
                             complex(_closed_spiral_theta(qp, complex(x), lam)),
                             complex(_closed_spiral_eq(qp, complex(x), lam)))


def tschakaloff_functional_residual(qp, fn, x):
    """``|x T(qx) - q T(x) + q x|`` for ``T = fn``."""
    qp = QParam.of(qp)
    x = complex(x)
    return float(abs(x * complex(fn(qp.q * x)) - qp.q * complex(fn(x)) + qp.q * x))


def _cauchy_derivative(fn, a0, order, radius=0.25, nodes=24):
    """``d^k fn/da^k`` at ``a0`` from the trapezoidal rule on a circle."""
    if order == 0:
        return complex(fn(a0))
    t = 2 * math.pi * np.arange(nodes) / nodes
    z = radius * np.exp(1j * t)
    vals = np.array([complex(fn(a0 + zi)) for zi in z])
    return complex(math.factorial(order) * np.mean(vals * z ** (-order)))


@dataclass(frozen=True)
class ModifiedTschakaloffReport:
    """Sums of the series with Borel transform ``1/(1+xi)^n``."""

    n: int
    spiral_theta: complex
    spiral_eq: complex
    ray_theta: complex
    ray_eq: complex
    spiral_average: complex

    @property
    def spiral_residual(self):
        return float(abs(self.spiral_theta - self.spiral_eq))

    @property
    def ray_residual(self):
        return float(abs(self.ray_theta - self.ray_eq))

    @property
    def average_residual(self):
        return float(abs(self.ray_eq - self.spiral_average))


def modified_tschakaloff_suite(qp, n, lam, d, x, nodes=32, tol=_TOL):
    """Check the sum identities for the series with ``B_q f = 1/(1+xi)^n``.

    The sums are obtained from the family ``1/(a+xi)``, the transform of
    ``-T_q(-x/a)``, by ``(-1)^{n-1}/(n-1)! d^{n-1}/da^{n-1}`` at ``a = 1``;
    every q-Laplace operator commutes with this derivative. The
    derivative is taken by the Cauchy formula on a circle of radius 1/4.

    Returns
    -------
    ModifiedTschakaloffReport
        The four sums and the mean of the spiral e_q sum over
        ``lambda in [e^{id}, q e^{id}]``.
    """
    qp = QParam.of(qp).require(Regime.GreaterThanOne)
    n = int(n)
    if not 1 <= n <= 3:
        raise DomainError("modified Tschakaloff checks are provided for 1 <= n <= 3", n=n)
    x, lam = complex(x), complex(lam)
    scale = (-1) ** (n - 1) / math.factorial(n - 1)
    keys = ("spiral_theta", "spiral_eq", "ray_theta", "ray_eq")
    cache = {}

    def at(a):
        if a not in cache:
            cache[a] = _tschakaloff_values(qp, x, lam, d, a, tol)
        return cache[a]

    vals = {k: scale * _cauchy_derivative(lambda a, k=k: at(a)[k], 1.0, n - 1) for k in keys}

    def spiral_eq_at(lm):
        return scale * _cauchy_derivative(
            lambda a: _tschakaloff_values(qp, x, lm, None, a, tol)["spiral_eq"], 1.0, n - 1)

    avg = _average(spiral_eq_at, cmath.exp(1j * d), qp.lnq, nodes)
    return ModifiedTschakaloffReport(n, vals["spiral_theta"], vals["spiral_eq"],
                                     vals["ray_theta"], vals["ray_eq"], avg)


# Confluence ------------------------------------------------------------

def confluence_sweep_gt1(x, q_grid, lam=1.0, tol=_TOL):
    """Distance of the continuous and discrete q-Euler sums to the Euler function.

    Parameters
    ----------
    x : complex
        ``arg x in (-pi, pi)``.
    q_grid : iterable of float
        Bases decreasing to 1.
    lam : complex, optional
        Spiral of the discrete sum.

    Returns
    -------
    list of dict
        Rows ``{"q", "ray", "spiral", "reference", "ray_error", "spiral_error"}``.
    """
    x = complex(x)
    if x == 0 or not abs(cmath.phase(x)) < math.pi:
        raise DomainError("confluence is stated for arg x in (-pi, pi)", x=x)
    ref = euler_classical(x).value
    d = cmath.phase(x)
    rows = []
    for q in q_grid:
        qp = QParam(float(q)).require(Regime.GreaterThanOne)
        r = euler_sum_ray(qp, x, d, tol=tol).value
        s = euler_sum_spiral(qp, x, lam, tol=tol).value
        rows.append({"q": float(q), "ray": r, "spiral": s, "reference": ref,
                     "ray_error": abs(r - ref), "spiral_error": abs(s - ref)})
    return rows
