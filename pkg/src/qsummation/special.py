"""
Transcendental kernels: the theta function, q-exponentials, Jackson's
q-Gamma function and its logarithmic derivative, the sums Omega_m, the
q-logarithm and the modular map.

Every ``_``-prefixed helper is vectorized over its array argument and is
what the summation modules call in their inner loops; the public
functions wrap them with argument checks and error estimates.

Theta is always taken with a base in ``(0, 1)``:
``theta(b, x) = sum_{n in Z} b^{n(n-1)/2} x^n``. Very small bases (the
modular dual of a base close to 1) are passed through ``lnbase``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleAt, ZeroArgument
from .qcore import (EPS, NumericResult, QParam, Regime, SurfacePoint,
                    log_qpoch_inf, qpoch_inf)

__all__ = [
    "ThetaEval", "ModularPair", "theta", "theta_product", "theta_bilateral", "log_theta",
    "theta_logderiv", "eq_exp", "ep_exp", "gamma_q", "psi_q", "omega",
    "const_A", "coeff_a", "q_log", "modular_map", "verify_modular",
    "qlog_sector_bound", "qlog_sector_residual",
]

# Pole guard: denominators below this multiple of eps times their scale.
_GUARD = 1e3 * EPS


def _lnbase(base, lnbase=None):
    if lnbase is not None:
        lnb = float(lnbase)
    else:
        base = float(base)
        if not 0.0 < base < 1.0:
            raise DomainError("theta needs a base in (0, 1)", base=base)
        lnb = math.log(base)
    if not lnb < 0:
        raise DomainError("theta needs a base in (0, 1)", lnbase=lnb)
    return lnb


def _theta_terms(lnb, tol=1e-16):
    # Reduced argument satisfies |log|y|| <= |lnb|/2, so the n-th term is
    # at most b^((n^2 - 2|n|)/2); keep |n| <= N.
    target = math.log(tol * 1e-3)
    return int(math.ceil(1.0 + math.sqrt(1.0 + 2.0 * target / lnb)))


def _wrap(z):
    """Bring the imaginary part of a logarithm into (-pi, pi]."""
    return z.real + 1j * (np.pi - np.mod(np.pi - z.imag, 2 * np.pi))


def _theta_direct(lnb, logx, tol=1e-16):
    """Reduced bilateral sum from ``log x``.

    Returns ``m, log y, log S, y S'(y)/S(y), cond`` with ``x = b^m y``,
    ``S = theta(y)`` and ``cond`` the ratio of the summed term moduli to
    ``|S|``. Near ``|y| = 1`` terms ``n`` and ``1-n`` are paired as
    ``b^{n(n-1)/2} y^{1-n} (1 + y^{2n-1})`` with ``1 + y^{2n-1}`` formed by
    ``expm1`` of ``log(-y)``, so the zero at ``y = -1`` keeps full relative
    accuracy. Elsewhere (only reachable for tiny nomes) the plain sum is
    scaled by its largest term.
    """
    shape = np.shape(logx)
    logx = np.atleast_1d(logx).ravel()
    m = np.rint(logx.real / lnb)
    logy = _wrap(logx - m * lnb)
    n = np.arange(1, _theta_terms(lnb, tol) + 1)
    c = (n * (n - 1) / 2.0) * lnb
    near = np.abs(logy.real) < 1.0
    ly = np.where(near, logy, 0.0)
    logmy = ly - 1j * np.pi * np.where(ly.imag > 0, 1.0, -1.0)
    low = np.exp(c + np.multiply.outer(ly, 1 - n))
    high = np.exp(c + np.multiply.outer(ly, n))
    S = -(low * np.expm1(np.multiply.outer(logmy, 2 * n - 1))).sum(axis=-1)
    dS = (high * n + low * (1 - n)).sum(axis=-1)
    scale = (np.abs(low) + np.abs(high)).sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logS = np.log(S)
        D = dS / S
        cond = scale / np.abs(S)
    if not np.all(near):
        far = ~near
        k = np.arange(1 - n[-1], n[-1] + 1)
        ex = (k * (k - 1) / 2.0) * lnb + np.multiply.outer(logy[far], k)
        M = ex.real.max(axis=-1, keepdims=True)
        t = np.exp(ex - M)
        St = t.sum(axis=-1)
        logS[far] = M[:, 0] + np.log(St)
        D[far] = (t * k).sum(axis=-1) / St
        cond[far] = np.abs(t).sum(axis=-1) / np.abs(St)
    return tuple(a.reshape(shape) for a in (m, logy, logS, D, cond))


# Direct sums losing more than this factor to cancellation are redone
# through the modular transformation.
_COND_SWITCH = 1e3


def _theta_eval(lnb, logx, tol=1e-16):
    """Return ``m, log y, log theta(y), y theta'(y)/theta(y), cond``.

    For nomes close to 1 the bilateral sum cancels badly away from the
    positive axis. Such points are re-evaluated with the modular relation
    ``theta_b(sqrt(b) u) = sqrt(2 pi/|ln b|) exp(-log^2 u/(2 ln b))
    theta_{b*}(sqrt(b*) u*)`` whose dual nome ``b* = exp(4 pi^2/ln b)``
    is tiny, so the dual sum has no cancellation.
    """
    logx = np.asarray(logx, dtype=complex)
    shape = logx.shape
    m, logy, logS, D, cond = _theta_direct(lnb, logx.ravel(), tol)
    bad = cond > _COND_SWITCH
    if np.any(bad) and -lnb < 2 * math.pi:
        lnbs = 4 * math.pi ** 2 / lnb
        logu = logy[bad] - 0.5 * lnb
        logz = 0.5 * lnbs - 2j * math.pi * logu / lnb
        ms, logys, logSs, Ds, conds = _theta_direct(lnbs, logz, tol)
        logth = logSs - ms * logys - 0.5 * ms * (ms - 1) * lnbs
        logS[bad] = (0.5 * math.log(2 * math.pi / -lnb)
                     - logu ** 2 / (2 * lnb) + logth)
        with np.errstate(invalid="ignore"):
            D[bad] = -logu / lnb - (2j * math.pi / lnb) * (Ds - ms)
        cond[bad] = conds
    return tuple(a.reshape(shape) for a in (m, logy, logS, D, cond))


def _logx(x):
    x = np.asarray(x, dtype=complex)
    if np.any(x == 0):
        raise ZeroArgument("theta is not defined at 0")
    return np.log(x)


def log_theta(base, x, lnbase=None, tol=1e-16):
    """Vectorized complex logarithm of theta (branch unspecified)."""
    lnb = _lnbase(base, lnbase)
    m, logy, logS, _, _ = _theta_eval(lnb, _logx(x), tol)
    return logS - m * logy - 0.5 * m * (m - 1) * lnb


def theta_logderiv(base, x, lnbase=None, tol=1e-16):
    """Vectorized ``x theta'(x)/theta(x)``."""
    lnb = _lnbase(base, lnbase)
    m, _, _, D, _ = _theta_eval(lnb, _logx(x), tol)
    return D - m


def _theta_value(base, x, lnbase=None):
    with np.errstate(over="ignore"):
        return np.exp(log_theta(base, x, lnbase))


def theta_bilateral(base, x, tol=1e-16):
    """Plain reduced bilateral sum without the modular fallback (vectorized).

    Used to cross-check ``theta`` where the direct sum is well conditioned.
    """
    lnb = _lnbase(base)
    m, logy, logS, _, _ = _theta_direct(lnb, _logx(x), tol)
    with np.errstate(over="ignore"):
        return np.exp(logS - m * logy - 0.5 * m * (m - 1) * lnb)


def theta_product(base, x):
    """Vectorized Jacobi triple product ``(b;b)(-x;b)(-b/x;b)``."""
    base = float(base)
    x = np.asarray(x, dtype=complex)
    lg = (log_qpoch_inf(base, base) + log_qpoch_inf(-x, base)
          + log_qpoch_inf(-base / x, base))
    with np.errstate(over="ignore"):
        return np.exp(lg)


@dataclass(frozen=True)
class ThetaEval:
    """Theta value with its derivative and the reduction count."""

    base: float
    value: complex
    dvalue: complex
    reduction_steps: int
    abs_err: float = 0.0


def theta(base, x, tol=1e-16, lnbase=None):
    """Jacobi theta function ``sum_n base^{n(n-1)/2} x^n``.

    Parameters
    ----------
    base : float
        Nome in ``(0, 1)``. Ignored when ``lnbase`` is given.
    x : complex
        Nonzero argument.
    tol : float, optional
        Relative truncation level of the bilateral sum.
    lnbase : float, optional
        Logarithm of the base, for bases below the double range.

    Returns
    -------
    ThetaEval

    Notes
    -----
    The argument is first reduced to ``y = x b^{-m}`` with ``|y|`` in
    ``[b^{1/2}, b^{-1/2}]`` and ``theta(x) = y^{-m} b^{-m(m-1)/2} theta(y)``
    is assembled in log space.

    Examples
    --------
    >>> round(theta(0.5, 1.0).value.real, 9)
    3.283265121
    >>> abs(theta(0.5, -1.0).value) < 1e-15
    True
    """
    lnb = _lnbase(base, lnbase)
    x = complex(x)
    if x == 0:
        raise ZeroArgument("theta is not defined at 0")
    m, logy, logS, D, cond = _theta_eval(lnb, np.log(x), tol)
    m = float(m)
    logpref = -m * logy - 0.5 * m * (m - 1) * lnb
    val = complex(np.exp(logS + logpref))
    if val == 0 or not np.isfinite(D):
        # exact zero of theta: differentiate the reduced sum termwise
        k = np.arange(-_theta_terms(lnb, tol), _theta_terms(lnb, tol) + 2)
        dy = np.sum(k * np.exp((k * (k - 1) / 2.0) * lnb + (k - 1) * logy))
        dval = complex(np.exp(logpref - m * lnb) * dy)
        return ThetaEval(math.exp(lnb), 0j, dval, int(abs(m)), 0.0)
    dval = val * complex(D - m) / x
    err = float(abs(val) * cond * 8 * EPS)
    return ThetaEval(math.exp(lnb), val, dval, int(abs(m)), err)


def _q_exp(Q, z):
    """Vectorized q-exponential ``e_Q(z) = sum z^n/[n]_Q!`` continued."""
    z = np.asarray(z, dtype=complex)
    if Q > 1:
        p = 1.0 / Q
        return qpoch_inf(-(1.0 - p) * z, p)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(-log_qpoch_inf((1.0 - Q) * z, Q))


def _log_eq(Q, z):
    """Vectorized ``log e_Q(z)`` for ``Q > 1`` (branch unspecified)."""
    p = 1.0 / Q
    return log_qpoch_inf(-(1.0 - p) * np.asarray(z, dtype=complex), p)


def eq_exp(qp, x, tol=1e-16):
    """q-exponential ``e_q(x) = sum x^n/[n]_q^!`` as an infinite product.

    For ``q > 1`` this is the entire function ``(-(1-p)x; p)_inf``; for
    ``q < 1`` it is the meromorphic ``1/((1-q)x; q)_inf``.

    Examples
    --------
    >>> eq_exp(QParam(2), 0).value
    (1+0j)
    >>> abs(eq_exp(QParam(2), -4).value) < 1e-15
    True
    """
    qp = QParam.of(qp)
    val = complex(_q_exp(qp.q, x))
    return NumericResult(val, 16 * EPS * abs(val), 0, False)


def ep_exp(base, x, tol=1e-16):
    """q-exponential with base ``p < 1``: ``e_p(x) = 1/((1-p)x; p)_inf``.

    It satisfies ``e_q(x) e_p(-x) = 1`` with ``q = 1/p``.
    """
    base = float(base)
    if not 0.0 < base < 1.0:
        raise DomainError("ep_exp needs a base in (0, 1)", base=base)
    val = complex(_q_exp(base, x))
    return NumericResult(val, 16 * EPS * abs(val), 0, False)


def _omega(x, base, m=None):
    """Vectorized ``Omega_m(x) = sum_{k<m} q^k x/(q^k x - 1)``; ``m=None`` is infinite."""
    x = np.asarray(x, dtype=complex)
    lnb = math.log(base)
    out = np.zeros(x.shape, dtype=complex)
    if m is not None:
        for k in range(int(m)):
            w = x * base ** k
            out += w / (w - 1.0)
        return out
    absx = np.abs(x)
    with np.errstate(divide="ignore"):
        K = np.where(absx > 0.25, np.ceil(np.log(absx / 0.25) / -lnb), 0.0)
    K = K.astype(np.int64)
    kmax = int(K.max()) if K.size else 0
    for k in range(kmax):
        w = x * base ** k
        with np.errstate(divide="ignore", invalid="ignore"):
            out += np.where(k < K, w / (w - 1.0), 0.0)
    # sum_{k>=K} q^k x/(q^k x - 1) = -sum_j w^j/(1 - q^j), w = q^K x
    w = x * np.power(base, K)
    j = np.arange(1, 49)
    coef = 1.0 / -np.expm1(j * lnb)
    acc = np.zeros(x.shape, dtype=complex)
    for c in coef[::-1]:
        acc = (acc + c) * w
    return out - acc


def _omega_pole_check(x, base, m):
    kmax = 2000 if m is None else int(m)
    x = complex(x)
    if abs(x) < 1.0:
        # q^k x - 1 cannot vanish for |x| < 1 when base < 1
        return
    k = round(math.log(abs(x)) / -math.log(base))
    if 0 <= k < kmax:
        w = x * base ** k
        if abs(w - 1.0) < _GUARD * 10 * max(1, k):
            raise PoleAt("Omega has a pole at base^-k", pole=base ** -k, x=x)


def omega(m, x, base, tol=1e-16):
    """Sum ``Omega_m(x) = sum_{k=0}^{m-1} q^k x/(q^k x - 1)``.

    Parameters
    ----------
    m : int or math.inf
        Number of terms; ``math.inf`` gives ``Omega(x)``.
    x : complex
    base : float
        ``q`` in ``(0, 1)``.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> omega(0, 0.3, 0.5).value
    0j
    """
    base = float(base)
    if not 0.0 < base < 1.0:
        raise DomainError("omega needs a base in (0, 1)", base=base)
    mm = None if m == math.inf else int(m)
    if mm is not None and mm < 0:
        raise DomainError("m must be non-negative", m=m)
    _omega_pole_check(x, base, mm)
    val = complex(_omega(x, base, mm))
    return NumericResult(val, 64 * EPS * (1 + abs(val)), 0 if mm is None else mm,
                         mm is None)


def const_A(base):
    """The constant ``A(q) = Omega(q) = sum_{n>=0} q^{n+1}/(q^{n+1} - 1)``."""
    return complex(_omega(base, float(base))).real


def coeff_a(n, base):
    """``a_n = sum_{k=0}^{n-1} 1/(q^{k+1} - 1)``; vectorized over ``n``.

    Examples
    --------
    >>> coeff_a(1, 0.5)
    -2.0
    """
    base = float(base)
    n = np.asarray(n)
    nmax = int(n.max()) if n.size else 0
    cum = np.concatenate([[0.0], np.cumsum(1.0 / (base ** np.arange(1, nmax + 1) - 1.0))])
    out = cum[n]
    return float(out) if out.ndim == 0 else out


def gamma_q(base, x, tol=1e-16):
    """Jackson's q-Gamma ``(q;q)_inf/(q^x;q)_inf (1-q)^{1-x}``.

    Examples
    --------
    >>> abs(gamma_q(0.5, 1).value - 1) < 1e-15
    True
    """
    base = float(base)
    if not 0.0 < base < 1.0:
        raise DomainError("gamma_q needs a base in (0, 1)", base=base)
    x = complex(x)
    n = round(x.real)
    if n <= 0 and abs(x - n) < 1e-12:
        raise PoleAt("q-Gamma has poles at non-positive integers", pole=n)
    lnb = math.log(base)
    lg = (log_qpoch_inf(base, base) - log_qpoch_inf(np.exp(x * lnb), base)
          + (1 - x) * math.log1p(-base))
    val = complex(np.exp(lg))
    return NumericResult(val, 64 * EPS * abs(val) * (1 + abs(lg)), 0, True)


def _psi_q(base, x):
    lnb = math.log(base)
    return -lnb * _omega(np.exp(np.asarray(x, dtype=complex) * lnb), base) - math.log1p(-base)


def psi_q(base, x, tol=1e-16):
    """Logarithmic derivative of ``gamma_q``: ``-ln q Omega(q^x) - ln(1-q)``."""
    base = float(base)
    x = complex(x)
    n = round(x.real)
    if n <= 0 and abs(x - n) < 1e-12:
        raise PoleAt("Psi_q has poles at non-positive integers", pole=n)
    val = complex(_psi_q(base, x))
    return NumericResult(val, 64 * EPS * (1 + abs(val)), 0, True)


def _q_log(base, x, lnbase=None):
    """Vectorized ``ell(x) = x theta'(-x)/theta(-x)``."""
    return -theta_logderiv(base, -np.asarray(x, dtype=complex), lnbase)


def q_log(base, x, tol=1e-16, lnbase=None):
    """q-logarithm ``ell(x) = x theta'(-x)/theta(-x)``.

    Normalized so that ``ell(qx) = ell(x) + 1``; it has simple poles on
    the spiral ``base^Z``.

    Examples
    --------
    >>> q = 0.5
    >>> abs(q_log(q, q * (0.3+1j)).value - q_log(q, 0.3+1j).value - 1) < 1e-12
    True
    """
    lnb = _lnbase(base, lnbase)
    x = complex(x)
    if x == 0:
        raise ZeroArgument("q_log is not defined at 0")
    m, _, _, D, cond = _theta_eval(lnb, np.log(-x), tol)
    D = complex(D)
    if not np.isfinite(D) or abs(D) * _GUARD > 1.0:
        raise PoleAt("q_log has a pole on the spiral base^Z", pole=x)
    val = -(D - float(m))
    err = float(8 * EPS * float(cond) * (abs(D) + 1))
    return NumericResult(val, err, int(abs(m)), True)


@dataclass(frozen=True)
class ModularPair:
    """Image ``(q*, x*)`` of ``(q, x)`` under the modular map.

    ``q_star`` may under- or overflow; ``lnq_star`` is always exact.
    """

    q_star: float
    x_star: complex
    branch_arg: float
    lnq_star: float


def modular_map(qp, x):
    """Modular transform ``q* = e^{4 pi^2/ln q}``, ``x* = e^{-2 pi i log x/ln q}``.

    The logarithm uses the argument carried by the surface point.

    Examples
    --------
    >>> mp = modular_map(QParam(math.exp(2 * math.pi)), SurfacePoint(1.0, 0.0))
    >>> abs(mp.lnq_star - 2 * math.pi) < 1e-12, mp.x_star
    (True, (1+0j))
    """
    qp = QParam.of(qp)
    x = SurfacePoint.of(x)
    lnqs = 4 * math.pi ** 2 / qp.lnq
    with np.errstate(over="ignore"):
        qs = float(np.exp(lnqs))
    xs = complex(np.exp(-2j * math.pi * x.log() / qp.lnq))
    return ModularPair(qs, xs, x.argument, lnqs)


def verify_modular(qp, x):
    """Residual of the modular relation for theta.

    Returns ``|theta(sqrt(q) x) - sqrt(2 pi/ln(1/q)) exp(-log^2 x/(2 ln q))
    theta_{q*}(sqrt(q*) x*)|`` for ``0 < q < 1``.
    """
    qp = QParam.of(qp).require(Regime.LessThanOne)
    x = SurfacePoint.of(x)
    mp = modular_map(qp, x)
    # plain bilateral sum on the left so the relation is not used to check itself
    lhs = complex(theta_bilateral(qp.q, math.sqrt(qp.q) * x.value))
    lx = x.log()
    pref = math.sqrt(2 * math.pi / -qp.lnq) * np.exp(-lx ** 2 / (2 * qp.lnq))
    rhs = pref * theta(None, math.exp(mp.lnq_star / 2) * mp.x_star,
                       lnbase=mp.lnq_star).value
    return float(abs(lhs - rhs))


def qlog_sector_bound(base, eps):
    """Uniform bound for ``|ln q ell(-sqrt(q) x) - log x|`` on ``|arg x| <= pi - eps``."""
    lnq = math.log(base)
    r = math.exp(2 * math.pi * eps / lnq)
    s = math.exp(4 * math.pi ** 2 / lnq)
    return 4 * math.pi * r / ((1 - s) * (1 - r))


def qlog_sector_residual(base, x):
    """Return ``|ln q ell(-sqrt(q) x) - log x|`` with a rounding-error estimate.

    Returns
    -------
    residual, rounding : float
    """
    lnq = math.log(base)
    x = complex(x)
    res = q_log(base, -math.sqrt(base) * x)
    lhs = lnq * res.value
    lx = complex(np.log(x))
    rounding = abs(lnq) * res.abs_err + 8 * EPS * (abs(lhs) + abs(lx))
    return float(abs(lhs - lx)), float(rounding)
