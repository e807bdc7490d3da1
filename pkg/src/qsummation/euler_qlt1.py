"""
The convergent q-Euler function for ``0 < q < 1``.

The series ``sum (-1)^n [n]_q^! x^{n+1}`` converges for ``|x| < 1-q``
and solves ``x^2 d_q y + y = x``. Its meromorphic continuation has simple
poles on ``{(q-1) q^k : k <= 0}``. Three independent evaluators are
provided: the functional equation unrolled down to the disc of
convergence, the partial-fraction (Heine) expansion, and the expansion at
infinity built from the q-logarithm. The classical Euler function
``int_0^inf e^{-t/x}/(1+t) dt`` and the confluence experiments live here
too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleAt, PoleOnPath
from .qcore import EPS, NumericResult, QParam, Regime, log_qpoch_inf, qpoch_inf
from .special import _q_exp, _q_log, coeff_a, const_A
from .transforms import laplace_ray, ray_integral

__all__ = [
    "EulerQltContext", "euler_q", "euler_q_heine", "euler_q_residue",
    "euler_q_infinity", "euler_q_series", "euler_classical",
    "euler_classical_infinity", "confluence_sweep_lt1",
    "confluent_hypergeom_sweep", "PochhammerConvention",
]

_POLE_GUARD = 1e-8


@dataclass(frozen=True)
class EulerQltContext:
    """Base ``q < 1`` with the pole spiral of the q-Euler function."""

    qp: QParam
    series_radius: float = field(init=False)

    def __post_init__(self):
        qp = QParam.of(self.qp).require(Regime.LessThanOne)
        object.__setattr__(self, "qp", qp)
        object.__setattr__(self, "series_radius", 1.0 - qp.q)

    @classmethod
    def of(cls, q):
        return q if isinstance(q, cls) else cls(QParam.of(q))

    def pole(self, k):
        """Pole ``(q-1) q^k`` for ``k <= 0``."""
        if k > 0:
            raise DomainError("poles are indexed by k <= 0", k=k)
        return (self.qp.q - 1.0) * self.qp.q ** k

    def nearest_pole(self, x):
        q = self.qp.q
        k = -max(0, round(math.log(max(abs(x), 1e-300) / (1 - q)) / -math.log(q)))
        return k, self.pole(k)

    def check(self, x):
        x = complex(x)
        k, z = self.nearest_pole(x)
        if abs(x - z) < _POLE_GUARD * abs(z):
            raise PoleAt("q-Euler function has a pole here", pole=z, k=k)
        return x


def euler_q_series(q, x, nmax=None):
    """Vectorized partial sum of ``sum (-1)^n [n]_q^! x^{n+1}`` (``|x| < 1-q``)."""
    x = np.asarray(x, dtype=complex)
    if nmax is None:
        r = float(np.max(np.abs(x))) / (1 - q) if x.size else 0.0
        nmax = 8 if r == 0 else int(min(4000, math.ceil(40.0 / -math.log(max(r, 1e-300)) + 4)))
    term = x.copy()
    out = x.copy()
    br = 1.0
    for n in range(1, nmax):
        br = 1.0 + q * br if n > 1 else 1.0
        # [n]_q = 1 + q + ... + q^{n-1}
        term = term * (-br * x)
        out = out + term
    return out


def _euler_q_vec(q, x):
    """Vectorized q-Euler function via the functional equation.

    ``y(x) = x (y(qx) + 1 - q)/(x + 1 - q)``, iterated down to
    ``|q^k x| < (1-q)/2`` where the series is summed.
    """
    x = np.asarray(x, dtype=complex)
    r = np.abs(x)
    lim = (1 - q) / 2
    k = 0
    if x.size and r.max() >= lim:
        k = int(math.ceil(math.log(r.max() / lim) / -math.log(q))) + 1
    z = x * q ** k
    y = euler_q_series(q, z)
    for j in range(k - 1, -1, -1):
        z = x * q ** j
        y = z * (y + 1 - q) / (z + 1 - q)
    return y


def euler_q(ctx, x, tol=1e-15):
    """q-Euler function ``E_q(x)`` continued to the plane minus its poles.

    Parameters
    ----------
    ctx : EulerQltContext or float
        Base ``q`` in ``(0, 1)``.
    x : complex

    Returns
    -------
    NumericResult

    Raises
    ------
    PoleAt
        Within ``1e-8 |pole|`` of a pole ``(q-1) q^k``, ``k <= 0``.

    Examples
    --------
    >>> round(euler_q(0.5, 0.2).value.real, 6)
    0.168937
    """
    ctx = EulerQltContext.of(ctx)
    q = ctx.qp.q
    x = ctx.check(x)
    val = complex(_euler_q_vec(q, x))
    depth = max(0, int(math.ceil(math.log(max(abs(x), 1e-300) / ((1 - q) / 2)) / -math.log(q))) + 1)
    k, z = ctx.nearest_pole(x)
    amp = 1.0 + abs(z) / abs(x - z)
    err = 8 * EPS * (depth + 60) * amp * (abs(val) + abs(x))
    return NumericResult(val, float(err), depth, True)


def _euler_q_heine_vec(q, x, tol=1e-17):
    x = np.asarray(x, dtype=complex)
    r = float(np.max(np.abs(x))) if x.size else 0.0
    N = max(8, int(math.ceil(math.log(tol / (r / (1 - q) + 1.0)) / math.log(q))) + 2)
    k = np.arange(1, N + 1)
    # log (q^{n+1}; q)_inf = log (q;q)_inf - log (q;q)_n
    l_inf = float(log_qpoch_inf(q, q).real)
    l_n = np.concatenate([[0.0], np.cumsum(np.log1p(-q ** k))])[:N]
    c = np.exp(l_inf - l_n)
    qn = q ** np.arange(N)
    z = np.multiply.outer(x, qn)
    return (1 - q) * (c * z / (z + 1 - q)).sum(axis=-1), N


def euler_q_heine(ctx, x, tol=1e-15):
    """Partial-fraction expansion ``(1-q) sum_n (q^{n+1};q)_inf / (1 + (1-q)/(q^n x))``.

    Examples
    --------
    >>> abs(euler_q_heine(0.5, 1 + 1j).value - euler_q(0.5, 1 + 1j).value) < 1e-12
    True
    """
    ctx = EulerQltContext.of(ctx)
    x = ctx.check(x)
    val, N = _euler_q_heine_vec(ctx.qp.q, x)
    return NumericResult(complex(val), float(8 * EPS * N * (abs(val) + abs(x))), N, True)


def euler_q_residue(ctx, k):
    """Residue ``-(1-q)^2 q^k (q^{1-k}; q)_inf`` at the pole ``(q-1) q^k``, ``k <= 0``."""
    ctx = EulerQltContext.of(ctx)
    if k > 0:
        raise DomainError("poles are indexed by k <= 0", k=k)
    q = ctx.qp.q
    return complex(-(1 - q) ** 2 * q ** k * qpoch_inf(q ** (1 - k), q))


def _euler_q_infinity_vec(q, x, a_terms=True):
    """Expansion of the q-Euler function at infinity (vectorized).

    ``(q-1) [ell(qx/(q-1)) - 1 - A(q)] e_p(q/x)
    + sum_{n>=1} (q-1) a_n q^{n(n-1)/2} (q/x)^n / [n]_q^!``
    with ``e_p(z) = (-(1-q) z; q)_inf`` and ``ell`` the q-logarithm.
    """
    x = np.asarray(x, dtype=complex)
    A = const_A(q)
    ell = _q_log(q, q * x / (q - 1))
    ep = qpoch_inf(-(1 - q) * q / x, q)
    head = (q - 1) * (ell - 1 - A) * ep
    if not a_terms:
        return head
    # u_n = q^{n(n-1)/2} (q(1-q)/x)^n / (q;q)_n, T_n = (q-1) a_n u_n
    w = q * (1 - q) / x
    u = np.ones(x.shape, dtype=complex)
    s = np.zeros(x.shape, dtype=complex)
    a = 0.0
    small = 0
    n = 0
    while True:
        n += 1
        u = u * q ** (n - 1) * w / (1 - q ** n)
        a += 1.0 / (q ** n - 1)
        t = (q - 1) * a * u
        s = s + t
        if np.all(np.abs(t) <= 1e-18 * (np.abs(s) + np.abs(head) + 1e-300)):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        if n > 100000:
            break
    return head + s


def euler_q_infinity(ctx, x, tol=1e-15):
    """q-Euler function through its expansion at infinity.

    Parameters
    ----------
    ctx : EulerQltContext or float
    x : complex
        Off the spiral ``(q-1) q^Z`` where the q-logarithm term is singular.

    Returns
    -------
    NumericResult
    """
    ctx = EulerQltContext.of(ctx)
    q = ctx.qp.q
    x = complex(x)
    if x == 0:
        raise DomainError("the expansion at infinity needs x != 0")
    t = q * x / (q - 1)
    m = round(math.log(abs(t)) / math.log(q))
    z = q ** m
    if abs(t - z) < _POLE_GUARD * z:
        raise PoleAt("expansion at infinity is singular on (q-1) q^Z", pole=(q - 1) * z / q)
    val = complex(_euler_q_infinity_vec(q, x))
    return NumericResult(val, float(64 * EPS * (abs(val) + 1) * (1 + abs(m))), 0, True)


def euler_classical(x, d=None, tol=1e-13):
    """Classical Euler function ``int_0^{e^{id} inf} e^{-t/x}/(1+t) dt``.

    Parameters
    ----------
    x : complex
    d : Ray or float, optional
        Direction of integration; defaults to ``arg x``. Must satisfy
        ``Re(e^{id}/x) > 0``.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> round(euler_classical(0.2).value.real, 6)
    0.170422
    """
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    if d is None:
        d = math.atan2(x.imag, x.real)
    d = float(getattr(d, "direction", d))
    if abs(abs((d + math.pi) % (2 * math.pi) - math.pi) - math.pi) < 1e-12:
        raise PoleOnPath("the ray d = pi passes through t = -1")
    return laplace_ray(lambda t: 1.0 / (1.0 + t), d, x, tol)


def euler_classical_infinity(x, N=None):
    """Convergent expansion ``(log x - gamma) e^{1/x} + sum H_n x^{-n}/n!``.

    Examples
    --------
    >>> abs(euler_classical_infinity(2.0).value - euler_classical(2.0).value) < 1e-12
    True
    """
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    z = 1 / x
    s = 0j
    term = 1.0 + 0j
    H = 0.0
    n = 0
    while True:
        n += 1
        term = term * z / n
        H += 1.0 / n
        t = H * term
        s += t
        if N is not None and n >= N:
            break
        if N is None and abs(t) < 1e-18 * max(abs(s), 1e-300) and n > abs(z):
            break
    val = (np.log(x) - np.euler_gamma) * np.exp(z) + s
    return NumericResult(complex(val), float(16 * EPS * (abs(val) + abs(np.exp(z)))), n,
                         N is not None)


def _check_sector(x):
    x = complex(x)
    if x.imag == 0 and x.real <= 0:
        raise DomainError("x must lie off the half line (-inf, 0]", x=x)
    return x


def confluence_sweep_lt1(x, q_grid):
    """Distance between the q-Euler and Euler functions as ``q -> 1^-``.

    Returns
    -------
    list of dict
        Rows ``{"q", "value", "reference", "error"}``.
    """
    x = _check_sector(x)
    ref = euler_classical(x).value
    rows = []
    for q in q_grid:
        v = euler_q(q, x).value
        rows.append({"q": float(q), "value": v, "reference": ref, "error": abs(v - ref)})
    return rows


class PochhammerConvention:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``, the limit of ``(q^a;q)_n/(1-q)^n``."""

    @staticmethod
    def rising(a, n):
        out = 1.0 + 0j
        for k in range(n):
            out *= a + k
        return out


def _phi_conf(a, b, q, x):
    """``Phi(a, b; q, x) = 2phi1(q^a, q^b; 0; q, x/(1-q))`` continued."""
    from .hypergeom import phi21_c0

    lnq = math.log(q)
    return phi21_c0(np.exp(a * lnq), np.exp(b * lnq), q, x / (1 - q))


def _hyp2f1_unit(a, b, xi):
    import mpmath

    xi = np.atleast_1d(xi)
    return np.array([complex(mpmath.hyp2f1(a, b, 1, complex(z))) for z in xi])


def borel_sum_2f0(a, b, x, d, tol=1e-12):
    """Borel sum of ``2F0(a, b;; x)`` in direction ``d``.

    ``x 2F0`` has Borel transform ``2F1(a, b; 1; xi)``, so the sum is
    ``(1/x) int_0^{e^{id} inf} 2F1(a, b; 1; xi) e^{-xi/x} d xi``.
    """
    x = complex(x)
    if (complex(math.cos(d), math.sin(d)) / x).real <= 0:
        raise DomainError("Laplace kernel does not decay along the ray", x=x, d=d)
    if abs((d + math.pi) % (2 * math.pi) - math.pi) < 1e-12:
        raise PoleOnPath("the ray d = 0 meets the singular point xi = 1")
    g = lambda xi: _hyp2f1_unit(a, b, xi) * np.exp(-xi / x)
    return ray_integral(g, d, tol).value / x


def confluent_hypergeom_sweep(a, b, x, d, q_grid):
    """Distance between ``Phi(a, b; q, x)`` and the Borel sum of ``2F0(a, b;; x)``.

    Parameters
    ----------
    a, b : complex
        Generic parameters, ``a - b`` not an integer.
    x : complex
    d : float
        Direction of the Borel sum, off the singular direction 0.
    q_grid : iterable of float
        Bases increasing to 1.

    Returns
    -------
    list of dict
        Rows ``{"q", "value", "reference", "error"}``.
    """
    a, b, x = complex(a), complex(b), complex(x)
    if a == 0 or b == 0:
        rows = []
        for q in q_grid:
            rows.append({"q": float(q), "value": 1 + 0j, "reference": 1 + 0j, "error": 0.0})
        return rows
    diff = a - b
    if abs(diff.imag) < 1e-14 and abs(diff.real - round(diff.real)) < 1e-12:
        raise DomainError("a - b must not be an integer", a=a, b=b)
    ref = borel_sum_2f0(a, b, x, d)
    rows = []
    for q in q_grid:
        v = complex(_phi_conf(a, b, float(q), x))
        rows.append({"q": float(q), "value": v, "reference": ref, "error": abs(v - ref)})
    return rows
