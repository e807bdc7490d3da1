"""
Basic hypergeometric series and their connection formulas.

``r phi s`` follows the usual convention

    sum (a_1..a_r; q)_n / (q, b_1..b_s; q)_n
        [(-1)^n q^{n(n-1)/2}]^{1+s-r} z^n .

The ``verify_*`` functions return the absolute residual of an identity
with both sides computed from convergent series (``|x| < 1``). The
degenerate connection formulas are assembled from finite Omega sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergent
from .qcore import EPS, NumericResult, qpoch, qpoch_inf
from .special import _omega, _q_log, log_theta

__all__ = [
    "BasicHG", "phi_rs", "phi21_c0", "verify_heine", "verify_watson",
    "verify_watson_degenerate", "verify_watson_ca_qk", "watson_rhs",
    "watson_degenerate_rhs", "watson_ca_qk_rhs", "verify_ramanujan",
]

_NMAX = 200_000


def _in_neg_spiral(z, base, kmax=2000):
    """Whether ``z`` is (numerically) in ``base^{-N}``."""
    z = complex(z)
    if z == 0 or abs(z.imag) > 1e-12 * abs(z) or z.real <= 0:
        return False
    k = math.log(z.real) / -math.log(base)
    return abs(k - round(k)) < 1e-10 and 0 <= round(k) <= kmax


@dataclass(frozen=True)
class BasicHG:
    """Parameters of ``r phi s(upper; lower; base, .)``."""

    upper: tuple
    lower: tuple
    base: float

    def __post_init__(self):
        up = tuple(complex(a) for a in self.upper)
        lo = tuple(complex(b) for b in self.lower)
        base = float(self.base)
        if not 0.0 < base < 1.0:
            raise DomainError("basic hypergeometric series need a base in (0, 1)", base=base)
        for b in lo:
            if _in_neg_spiral(b, base):
                raise DomainError("lower parameter in base^{-N}", b=b)
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "base", base)

    @property
    def r(self):
        return len(self.upper)

    @property
    def s(self):
        return len(self.lower)


def _phi_vec(upper, lower, q, z, tol=1e-17, nmax=_NMAX):
    """Vectorized series sum; returns (value, terms, max term modulus)."""
    z = np.asarray(z, dtype=complex)
    r, s = len(upper), len(lower)
    e = 1 + s - r
    t = np.ones(z.shape, dtype=complex)
    out = t.copy()
    big = np.abs(t)
    qn = 1.0
    small = 0
    n = 0
    while n < nmax:
        num = np.prod([1 - a * qn for a in upper]) if upper else 1.0
        den = (1 - q * qn) * (np.prod([1 - b * qn for b in lower]) if lower else 1.0)
        t = t * (num / den) * ((-qn) ** e) * z
        out = out + t
        big = np.maximum(big, np.abs(t))
        n += 1
        qn *= q
        if np.all(np.abs(t) <= tol * np.maximum(np.abs(out), 1e-300)) or np.all(t == 0):
            small += 1
            if small >= 3:
                return out, n, big
        else:
            small = 0
    raise NonConvergent("basic hypergeometric series did not converge", partial=out)


def phi_rs(spec, x, tol=1e-17):
    """Sum the basic hypergeometric series ``spec`` at ``x``.

    Parameters
    ----------
    spec : BasicHG
    x : complex
        ``|x| < 1`` when ``r = s + 1``; any ``x`` when ``r <= s``.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> phi_rs(BasicHG((0.3, 0.5), (0.7,), 0.5), 0).value
    (1+0j)
    """
    x = complex(x)
    if spec.r > spec.s + 1 and x != 0:
        raise NonConvergent("series with r > s + 1 diverge")
    if spec.r == spec.s + 1 and abs(x) >= 1:
        raise NonConvergent("series with r = s + 1 need |x| < 1", x=x)
    val, n, big = _phi_vec(spec.upper, spec.lower, spec.base, x, tol)
    val = complex(val)
    return NumericResult(val, float(8 * EPS * n * float(big)), n, True)


def _theta_ratio(q, u, v):
    """``theta(u)/theta(v)`` with base ``q`` through log-theta."""
    return np.exp(log_theta(q, u) - log_theta(q, v))


def _qinf(a, q):
    return complex(qpoch_inf(a, q))


def phi21_c0(a, b, q, x):
    """``2phi1(a, b; 0; q, x)`` continued to the whole plane (vectorized in ``x``).

    The series is summed for ``|x| <= 0.9``; elsewhere the ``c -> 0``
    limit of the connection formula is used::

        (b;q)_inf/(b/a;q)_inf theta(-ax)/theta(-x) 1phi1(a; aq/b; q, q^2/(bx))
        + (a <-> b)

    which needs ``a/b`` off ``q^Z``.
    """
    a, b = complex(a), complex(b)
    x = np.asarray(x, dtype=complex)
    out = np.empty(x.shape, dtype=complex)
    near = np.abs(x) <= 0.9
    if np.any(near):
        out[near] = _phi_vec((a, b), (0,), q, x[near])[0]
    far = ~near
    if np.any(far):
        xf = x[far]
        tot = 0
        for u, v in ((a, b), (b, a)):
            pref = _qinf(v, q) / _qinf(v / u, q)
            ser = _phi_vec((u,), (u * q / v,), q, q * q / (v * xf))[0]
            tot = tot + pref * _theta_ratio(q, -u * xf, -xf) * ser
        out[far] = tot
    return out if out.ndim else complex(out)


def _check_x(x):
    x = complex(x)
    if abs(x) >= 1:
        raise DomainError("identity checks sample |x| < 1 so both sides converge", x=x)
    return x


def verify_heine(a, b, c, base, x):
    """Residual of Heine's transformation.

    ``2phi1(a,b;c;q,x) = (b, ax; q)_inf/(c, x; q)_inf 2phi1(c/b, x; ax; q, b)``
    in the symmetric form; the printed variant with ``(a, bx)`` is obtained
    by swapping ``a`` and ``b``. Requires ``|a| < 1``, ``|x| < 1``.

    Examples
    --------
    >>> verify_heine(0.3, 0.5, 0.7, 0.5, 0.2) < 1e-14
    True
    """
    q = float(base)
    x = _check_x(x)
    a, b, c = complex(a), complex(b), complex(c)
    if abs(a) >= 1:
        raise DomainError("Heine's transformation needs |a| < 1", a=a)
    lhs = complex(_phi_vec((a, b), (c,), q, x)[0])
    pref = _qinf(a, q) * _qinf(b * x, q) / (_qinf(c, q) * _qinf(x, q))
    rhs = pref * complex(_phi_vec((c / a, x), (b * x,), q, a)[0])
    return float(abs(lhs - rhs))


def watson_rhs(a, b, c, base, x):
    """Right side of Watson's connection formula for ``2phi1(a, b; c; q, x)``.

    Each term converges for ``|cq/(ab x)| < 1``.
    """
    q = float(base)
    a, b, c, x = complex(a), complex(b), complex(c), complex(x)
    tot = 0j
    for u, v in ((a, b), (b, a)):
        pref = _qinf(v, q) * _qinf(c / u, q) / (_qinf(c, q) * _qinf(v / u, q))
        z = c * q / (u * v * x)
        ser = complex(_phi_vec((u, u * q / c), (u * q / v,), q, z)[0])
        tot += pref * complex(_theta_ratio(q, -u * x, -x)) * ser
    return tot


def _check_abc(a, b, c, q, x):
    if a * b * c * x == 0:
        raise DomainError("Watson's formula needs abcx != 0")
    r = np.log(complex(a / b)) / math.log(q)
    if abs(r.imag) < 1e-10 and abs(r.real - round(r.real)) < 1e-10:
        raise DomainError("a/b must lie off q^Z", a=a, b=b)
    if _in_neg_spiral(x, q):
        raise DomainError("x must lie off q^{-N}", x=x)


def verify_watson(a, b, c, base, x):
    """Residual of Watson's connection formula.

    Both sides converge only on ``|cq/(ab)| < |x| < 1``, so admissible
    samples need a small ``c``.

    Examples
    --------
    >>> verify_watson(0.6, 0.7, 0.05, 0.5, 0.5 + 0.1j) < 1e-12
    True
    """
    q = float(base)
    x = _check_x(x)
    a, b, c = complex(a), complex(b), complex(c)
    _check_abc(a, b, c, q, x)
    if abs(c * q / (a * b * x)) >= 1:
        raise DomainError("the connection series need |cq/(abx)| < 1", x=x)
    lhs = complex(_phi_vec((a, b), (c,), q, x)[0])
    return float(abs(lhs - watson_rhs(a, b, c, q, x)))


def watson_degenerate_rhs(m, a, c, base, x):
    """Connection formula for ``2phi1(a, a q^m; c; q, x)``, ``c`` possibly 0.

    With ``z = c q^{1-m}/(a^2 x)`` (``c != 0``) the right side is ::

        R (a, aq/c; q)_n/(q, q^{1-m}; q)_n z^n summed over n < m
        + B {[C_m + m - ell(a q^m x)] Phi_m + sum_{n>=1} C_{m,n} phi_{m,n}}

    where ``R = (aq^m, c/a;q)_inf/(c, q^m;q)_inf theta(-ax)/theta(-x)``,
    ``B = (a, cq^{-m}/a;q)_inf/((c,q;q)_inf (q^{-m};q)_m)
    theta(-aq^m x)/theta(-x)``, ``Phi_m = sum_n phi_{m,n}`` with
    ``phi_{m,n} = (aq^m, aq^{1+m}/c;q)_n/(q, q^{1+m};q)_n z^n`` and
    ``C_{m,n} = Omega_n(aq^m) + Omega_n(aq^{1+m}/c) - Omega_n(q^{1+m})
    - Omega_n(q)``. For ``c = 0`` the factors involving ``c`` are replaced
    by their limits: ``(aq/c;q)_n z^n`` becomes
    ``q^{n(n-1)/2} (-q^{2-m}/(ax))^n`` and similarly in ``phi_{m,n}``.
    """
    q = float(base)
    m = int(m)
    if m < 0:
        raise DomainError("m must be non-negative", m=m)
    a, c, x = complex(a), complex(c), complex(x)
    qm = q ** m
    lth = lambda u: complex(log_theta(q, u))
    Om = lambda u, n=None: complex(_omega(u, q, n))
    if c != 0:
        z = c * q ** (1 - m) / (a * a * x)
        if abs(z) >= 1:
            raise DomainError("connection series need |c q^{1-m}/(a^2 x)| < 1", x=x)
    else:
        w = -q ** 2 / (a * x)
    # sum over n < m
    P = 0j
    if m > 0:
        t = 1.0 + 0j
        for n in range(m):
            P += t
            if n == m - 1:
                break
            num = (1 - a * q ** n) * ((1 - a * q ** (n + 1) / c) * z if c != 0
                                      else q ** n * (-q ** (2 - m) / (a * x)))
            t = t * num / ((1 - q ** (n + 1)) * (1 - q ** (1 - m + n)))
        R = (_qinf(a * qm, q) * (_qinf(c / a, q) if c != 0 else 1.0)
             / ((_qinf(c, q) if c != 0 else 1.0) * _qinf(qm, q)))
        R *= np.exp(lth(-a * x) - lth(-x))
        P *= R
    B = (_qinf(a, q) * (_qinf(c / (qm * a), q) if c != 0 else 1.0)
         / ((_qinf(c, q) if c != 0 else 1.0) * _qinf(q, q) * complex(qpoch(1 / qm, q, m))))
    B *= np.exp(lth(-a * qm * x) - lth(-x))
    Cm = Om(q) + Om(q * qm) - Om(a * qm) + 1
    if c != 0:
        Cm -= Om(c / (qm * a))
    # Phi_m and the weighted tail, summed together
    phi = 1.0 + 0j
    Phi = phi
    S = 0j
    omA = omB = omQm = omQ = 0j
    n = 0
    small = 0
    while n < _NMAX:
        u1 = a * qm * q ** n
        fac = (1 - u1) / ((1 - q ** (n + 1)) * (1 - q ** (1 + m + n)))
        if c != 0:
            fac *= (1 - a * q * qm * q ** n / c) * z
        else:
            fac *= q ** n * w
        # Omega_{n+1} = Omega_n + q^n u/(q^n u - 1)
        omA += u1 / (u1 - 1)
        if c != 0:
            u2 = a * q * qm * q ** n / c
            omB += u2 / (u2 - 1)
        u3 = q * qm * q ** n
        omQm += u3 / (u3 - 1)
        u4 = q * q ** n
        omQ += u4 / (u4 - 1)
        phi = phi * fac
        n += 1
        Cmn = omA + omB - omQm - omQ if c != 0 else omA + n - omQm - omQ
        Phi += phi
        S += Cmn * phi
        if abs(phi) * (1 + abs(Cmn)) <= 1e-18 * max(abs(Phi), abs(S), 1e-300):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    ell = complex(_q_log(q, a * qm * x))
    return P + B * ((Cm + m - ell) * Phi + S)


def verify_watson_degenerate(m, a, c, x, base=0.5):
    """Residual of the connection formula for ``b = a q^m`` (``c`` may be 0)."""
    q = float(base)
    x = _check_x(x)
    a, c = complex(a), complex(c)
    for z in (a, c / a if c != 0 else 0.5):
        if _in_neg_spiral(z, q):
            raise DomainError("parameters must avoid q^{-N}", value=z)
    lhs = complex(_phi_vec((a, a * q ** int(m)), (c,), q, x)[0])
    return float(abs(lhs - watson_degenerate_rhs(m, a, c, q, x)))


def watson_ca_qk_rhs(k, m, a, base, x):
    """Right side for ``2phi1(a, a q^m; a q^{-k}; q, x)``::

        (q^{-k-m};q)_k/(aq^{-k};q)_k theta(-aq^m x)/theta(-x)
        2phi1(aq^m, q^{1+m+k}; q^{1+m}; q, q^{1-k-m}/(ax))
    """
    q = float(base)
    k, m = int(k), int(m)
    a, x = complex(a), complex(x)
    pref = complex(qpoch(q ** (-k - m), q, k)) / complex(qpoch(a * q ** -k, q, k))
    pref *= np.exp(complex(log_theta(q, -a * q ** m * x)) - complex(log_theta(q, -x)))
    z = q ** (1 - k - m) / (a * x)
    if abs(z) >= 1:
        raise DomainError("connection series needs |q^{1-k-m}/(ax)| < 1", x=x)
    ser = complex(_phi_vec((a * q ** m, q ** (1 + m + k)), (q ** (1 + m),), q, z)[0])
    return pref * ser


def verify_watson_ca_qk(k, m, a, x, base=0.5):
    """Residual of the connection formula for ``c = a q^{-k}``, ``b = a q^m``."""
    q = float(base)
    x = _check_x(x)
    a = complex(a)
    lhs = complex(_phi_vec((a, a * q ** int(m)), (a * q ** -int(k),), q, x)[0])
    return float(abs(lhs - watson_ca_qk_rhs(k, m, a, q, x)))


def verify_ramanujan(x, base):
    """Residual of ``(x; p)_inf 0phi1(-; x; p, x) = 1``."""
    p = float(base)
    x = complex(x)
    val = complex(_phi_vec((), (x,), p, x)[0]) * _qinf(x, p)
    return float(abs(val - 1))
