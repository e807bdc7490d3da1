"""
Borel and Laplace transforms.

Formal transforms act on series ``f = sum f_n x^{n+1}`` in ``x C[[x]]``:

* ``borel_q``:     ``f_n -> f_n / [n]_q^!``
* ``borel_theta``: ``f_n -> f_n / q^{n(n-1)/2}``

with inverses ``laplace_q_series`` and ``laplace_theta_series``.
Analytic transforms are the classical Laplace integral along a ray, the
convergent q-Laplace transform as a Jackson integral, and circle-contour
representations of both directions. ``ray_integral`` is the shared
adaptive quadrature on ``xi = e^{id} e^u``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergent, PoleOnPath
from .jackson import Spiral, jackson_finite
from .qcore import (EPS, NumericResult, QParam, Regime, TruncSeries, q_factorial,
                    qpoch_inf)

__all__ = [
    "Ray", "GrowthKind", "Growth", "BorelFunction", "ray_integral",
    "borel_q", "borel_theta", "laplace_q_series", "laplace_theta_series",
    "hadamard_qfactor", "laplace_ray", "q_laplace_convergent",
    "contour_borel", "contour_inverse", "q_convolution",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class Ray:
    """Half line ``e^{id} R^+``."""

    direction: float

    def __post_init__(self):
        d = float(self.direction)
        if not math.isfinite(d):
            raise DomainError("ray direction must be finite")
        object.__setattr__(self, "direction", d)

    @classmethod
    def of(cls, d):
        return d if isinstance(d, Ray) else cls(d)

    @property
    def unit(self):
        return complex(math.cos(self.direction), math.sin(self.direction))


class GrowthKind(enum.Enum):
    Polynomial = "Polynomial"
    Exponential = "Exponential"
    QExponentialOrder1 = "QExponentialOrder1"


@dataclass(frozen=True)
class Growth:
    """Growth bound ``|phi(xi)| <= K * g(|xi|)`` along rays.

    ``Exponential`` means ``g = e^{mu |xi|}``; ``QExponentialOrder1``
    means ``g = e^{ln^2|xi| / (2 ln q)}``-type growth with ``mu = ln q``.
    """

    kind: GrowthKind = GrowthKind.Polynomial
    K: float = 1.0
    mu: float = 0.0


@dataclass(frozen=True)
class BorelFunction:
    """Borel-plane function with its declared singularities.

    Parameters
    ----------
    eval : callable
        Vectorized evaluator.
    poles : tuple of complex
        Isolated poles.
    pole_spirals : tuple of Spiral
        Poles filling whole q-orbits.
    growth : Growth
    """

    eval: object
    poles: tuple = ()
    pole_spirals: tuple = ()
    growth: Growth = field(default_factory=Growth)

    def __call__(self, xi):
        return self.eval(xi)

    def _all_points(self):
        return [complex(z) for z in self.poles] + [s.anchor for s in self.pole_spirals]

    def pole_on_ray(self, d, atol=1e-10):
        """Whether some declared pole lies on ``e^{id} R^+``."""
        for z in self._all_points():
            ang = (math.atan2(z.imag, z.real) - d + math.pi) % (2 * math.pi) - math.pi
            if abs(ang) < atol:
                return z
        return None

    def pole_on_spiral(self, s, atol=1e-10):
        """Whether some declared pole lies on the spiral ``s``."""
        for z in self.poles:
            if s.contains(z, atol):
                return complex(z)
        for sp in self.pole_spirals:
            if s.contains(sp.anchor, atol):
                return sp.anchor
        return None


def _as_callable(phi):
    if isinstance(phi, (BorelFunction, TruncSeries)):
        return phi
    if callable(phi):
        return phi
    raise DomainError("expected a callable, BorelFunction or TruncSeries")


def _panels(h, a, b, npan):
    edges = np.linspace(a, b, npan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    return np.sum((half[:, None] * _GL_W[None, :]).ravel() * h(u))


def ray_integral(g, d, tol=1e-13, u_bounds=None, max_doublings=9):
    """Integral of ``g`` from 0 to infinity along direction ``d``.

    Parameters
    ----------
    g : callable
        Vectorized integrand in the Borel variable.
    d : float
        Direction of the ray.
    tol : float, optional
        Target accuracy, absolute below magnitude 1 and relative above.
    u_bounds : (float, float), optional
        Range of ``u = log|xi|`` to integrate over; found automatically
        from the integrand magnitude when omitted.

    Returns
    -------
    NumericResult

    Notes
    -----
    The substitution ``xi = e^{id} e^u`` clusters nodes near the origin.
    The integrand peak is located on a coarse grid in ``u`` and the range
    is extended from it until the integrand drops below ``1e-3 tol`` times
    the peak. Composite 16-point Gauss-Legendre panels cover the range and the panel
    count is doubled until two successive values agree.
    """
    w = complex(math.cos(d), math.sin(d))

    def h(u):
        xi = w * np.exp(u)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            v = np.asarray(g(xi), dtype=complex) * xi
        return v

    def mag(u):
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            v = np.abs(h(np.atleast_1d(float(u))))[0]
        return v

    if u_bounds is None:
        grid = np.arange(-50.0, 50.0 + 1e-9, 0.1)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            mags = np.abs(h(grid))
        mags = np.where(np.isfinite(mags), mags, 0.0)
        peak = float(mags.max())
        if peak == 0.0:
            return NumericResult(0j, 0.0, grid.size, True)
        u0 = float(grid[int(mags.argmax())])
        thr = tol * 1e-3 * peak
        lo = u0
        while True:
            vals = [mag(lo - t) for t in (0.0, 0.5, 1.0)]
            if all(np.isfinite(v) and v < thr for v in vals):
                break
            lo -= 1.0
            if lo < -750:
                raise NonConvergent("integrand does not decay at the origin", direction=d)
        hi = u0
        run = 0
        while True:
            v = mag(hi)
            if np.isfinite(v) and v < thr:
                run += 1
                if run == 4:
                    break
            elif not np.isfinite(v) and hi > u0 + 5 and run > 0:
                break
            else:
                run = 0
            hi += 0.5
            if hi > 700:
                raise NonConvergent("integrand does not decay along the ray", direction=d)
    else:
        lo, hi = u_bounds
    npan = max(4, int(math.ceil(hi - lo)))
    prev = _panels(h, lo, hi, npan)
    if not np.isfinite(prev):
        raise PoleOnPath("integrand is not finite on the ray", direction=d)
    for _ in range(max_doublings):
        npan *= 2
        cur = _panels(h, lo, hi, npan)
        if not np.isfinite(cur):
            raise PoleOnPath("integrand is not finite on the ray", direction=d)
        diff = abs(cur - prev)
        if diff <= tol * max(1.0, abs(cur)):
            return NumericResult(complex(cur), float(diff + 16 * EPS * abs(cur)),
                                 npan * 16, True)
        prev = cur
    raise NonConvergent("ray quadrature did not stabilize", partial=complex(cur),
                        direction=d)


def borel_q(f, qp):
    """Borel transform ``sum f_n x^{n+1} -> sum f_n xi^n / [n]_q^!``.

    Examples
    --------
    >>> from qsummation.qcore import TruncSeries
    >>> e = TruncSeries([(-1) ** n * q_factorial(n, 2.0) for n in range(5)], 1)
    >>> borel_q(e, QParam(2.0)).coeffs.real
    array([ 1., -1.,  1., -1.,  1.])
    """
    qp = QParam.of(qp)
    _need_offset(f)
    fac = np.array([q_factorial(n, qp) for n in range(f.order + 1)])
    return TruncSeries(f.coeffs / fac, 0)


def borel_theta(f, qp):
    """Borel transform ``sum f_n x^{n+1} -> sum f_n xi^n / q^{n(n-1)/2}``."""
    qp = QParam.of(qp)
    _need_offset(f)
    n = np.arange(f.order + 1)
    return TruncSeries(f.coeffs * np.exp(-(n * (n - 1) / 2.0) * qp.lnq), 0)


def laplace_q_series(phi, qp):
    """Inverse of ``borel_q``."""
    qp = QParam.of(qp)
    fac = np.array([q_factorial(n, qp) for n in range(phi.order + 1)])
    return TruncSeries(phi.shift(0).coeffs * fac, 1)


def laplace_theta_series(phi, qp):
    """Inverse of ``borel_theta``."""
    qp = QParam.of(qp)
    n = np.arange(phi.order + 1)
    return TruncSeries(phi.shift(0).coeffs * np.exp((n * (n - 1) / 2.0) * qp.lnq), 1)


def hadamard_qfactor(phi, qp):
    """Diagonal map ``c_n -> c_n q^{n(n-1)/2} / [n]_q^!`` sending ``borel_theta`` to ``borel_q``."""
    qp = QParam.of(qp)
    n = np.arange(phi.order + 1)
    fac = np.array([q_factorial(int(k), qp) for k in n])
    return TruncSeries(phi.coeffs * np.exp((n * (n - 1) / 2.0) * qp.lnq) / fac, 0)


def _need_offset(f):
    if f.valuation_offset != 1:
        raise DomainError("Borel transforms act on series in x C[[x]] (valuation offset 1)")


def laplace_ray(phi, d, x, tol=1e-13):
    """Classical Laplace transform ``int_0^{e^{id} inf} phi(xi) e^{-xi/x} d xi``.

    Parameters
    ----------
    phi : callable or BorelFunction
    d : Ray or float
    x : complex
        Requires ``Re(e^{id}/x) > 0``.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> round(laplace_ray(lambda t: 1 + 0 * t, 0.0, 0.5).value.real, 12)
    0.5
    """
    ray = Ray.of(d)
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    rate = (ray.unit / x).real
    if rate <= 0:
        raise DomainError("Laplace kernel does not decay along the ray",
                          direction=ray.direction, x=x)
    phi = _as_callable(phi)
    if isinstance(phi, BorelFunction):
        z = phi.pole_on_ray(ray.direction)
        if z is not None:
            raise PoleOnPath("declared pole on the integration ray", pole=z)
        g = phi.growth
        if g.kind is GrowthKind.Exponential and g.mu >= rate:
            raise NonConvergent("exponential growth beats the Laplace kernel",
                                rate=rate, mu=g.mu)
    return ray_integral(lambda xi: phi(xi) * np.exp(-xi / x), ray.direction, tol)


def q_laplace_convergent(phi, x, qp, tol=1e-15):
    """Convergent q-Laplace transform as a Jackson integral (``q < 1``).

    Computes ``int_0^{x/(1-q)} ((1-q) q xi / x; q)_inf phi(xi) d_q xi``,
    the inverse of ``borel_q`` on germs of analytic functions.

    Examples
    --------
    >>> r = q_laplace_convergent(lambda t: 1 + 0 * t, 0.3, QParam(0.5))
    >>> round(r.value.real, 14)
    0.3
    """
    qp = QParam.of(qp).require(Regime.LessThanOne)
    q = qp.q
    x = complex(x)
    phi = _as_callable(phi)

    def integrand(xi):
        return qpoch_inf((1 - q) * q * xi / x, q) * phi(xi)

    return jackson_finite(integrand, x / (1 - q), qp, tol)


def contour_borel(f, R, qp, n_nodes=64, order=None, tol=1e-13, max_nodes=1 << 14):
    """Borel transform of an analytic germ from its values on ``|x| = R``.

    The Taylor coefficients ``f_{n+1}`` are read off by the trapezoid rule
    (an FFT) and divided by ``[n]_q^!``.

    Parameters
    ----------
    f : callable
        Vectorized, analytic on ``|x| <= R`` with ``f(0) = 0``.
    R : float
    qp : QParam, ``q < 1``
    n_nodes : int, optional
        Initial node count, doubled until the coefficients settle.
    order : int, optional
        Truncation order of the result (default ``n_nodes // 4``).

    Returns
    -------
    TruncSeries
        Coefficients of ``phi(xi) = sum phi_n xi^n``.
    """
    qp = QParam.of(qp).require(Regime.LessThanOne)
    order = n_nodes // 4 if order is None else int(order)
    N = max(int(n_nodes), 2 * order + 8)
    fac = np.array([q_factorial(n, qp) for n in range(order + 1)])

    def coeffs(N):
        t = R * np.exp(2j * math.pi * np.arange(N) / N)
        c = np.fft.fft(np.asarray(f(t), dtype=complex)) / N
        k = np.arange(1, order + 2)
        return c[k] / R ** k / fac

    prev = coeffs(N)
    while N < max_nodes:
        N *= 2
        cur = coeffs(N)
        scale = np.abs(cur) * R ** np.arange(1, order + 2) * fac
        if np.all(np.abs(cur - prev) * R ** np.arange(1, order + 2) * fac
                  <= tol * np.maximum(1.0, scale.max())):
            return TruncSeries(cur, 0)
        prev = cur
    raise NonConvergent("contour coefficients did not stabilize", partial=prev)


def contour_inverse(phi, rho, qp, x, n_nodes=64, tol=1e-13, max_nodes=1 << 14):
    """Inverse of ``contour_borel``: ``-1/(2 pi i) oint phi(xi) E_q(-x/xi) d xi``.

    Parameters
    ----------
    phi : callable
        Analytic on ``|xi| <= rho``.
    rho : float
    qp : QParam, ``q < 1``
    x : complex
        Requires ``|x| < (1-q) rho`` so the Euler kernel is expanded
        in the convergent series on the circle.

    Returns
    -------
    NumericResult
    """
    from .euler_qlt1 import _euler_q_vec

    qp = QParam.of(qp).require(Regime.LessThanOne)
    x = complex(x)
    if not abs(x) < (1 - qp.q) * rho:
        raise DomainError("contour_inverse needs |x| < (1-q) rho", x=x, rho=rho)

    def trap(N):
        xi = rho * np.exp(2j * math.pi * np.arange(N) / N)
        return -np.mean(np.asarray(phi(xi), dtype=complex)
                        * _euler_q_vec(qp.q, -x / xi) * xi)

    N = int(n_nodes)
    prev = trap(N)
    while N < max_nodes:
        N *= 2
        cur = trap(N)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return NumericResult(complex(cur), float(abs(cur - prev)), N, True)
        prev = cur
    raise NonConvergent("contour integral did not stabilize", partial=complex(prev))


def q_convolution(f, g, qp, polynomial=False):
    """q-convolution from ``xi^n *_q xi^m = q^{-(nm+n+m+1)} xi^{n+m+1}``.

    Parameters
    ----------
    f, g : TruncSeries
        Series in ``C[[xi]]`` (valuation offset 0).
    polynomial : bool, optional
        Treat the inputs as exact polynomials and return every product
        coefficient. Otherwise the result is truncated at order
        ``min(f.order, g.order) + 1``, the last exactly known one.

    Returns
    -------
    TruncSeries

    Examples
    --------
    >>> from qsummation.qcore import TruncSeries
    >>> r = q_convolution(TruncSeries([0, 0, 1]), TruncSeries([0, 0, 0, 1]),
    ...                   QParam(2.0), polynomial=True)
    >>> r.order, float(r.coeffs[6].real) == 2.0 ** -12
    (6, True)
    """
    qp = QParam.of(qp)
    a, b = f.shift(0).coeffs, g.shift(0).coeffs
    na, nb = a.size - 1, b.size - 1
    out = np.zeros(na + nb + 2, dtype=complex)
    m = np.arange(nb + 1)
    for n in range(na + 1):
        out[n + m + 1] += a[n] * b * np.power(qp.q, -(n * m + n + m + 1.0))
    top = na + nb + 1 if polynomial else min(na, nb) + 1
    return TruncSeries(out[: top + 1], 0)
