"""
Base q-arithmetic: the deformation parameter, q-integers, q-Pochhammer
symbols and truncated formal power series.

The vectorized helpers ``log_qpoch_inf`` and ``qpoch_inf`` are the
work horses of every other module; the scalar ``pochhammer`` follows the
documented truncation rule and reports an error estimate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "Regime", "QParam", "NumericResult", "TruncSeries",
    "q_bracket", "q_factorial", "pochhammer", "series_mul", "series_dq",
    "log_qpoch_inf", "qpoch_inf", "qpoch", "EPS", "SurfacePoint",
]

EPS = np.finfo(float).eps

# Tail series of log (w; b)_inf is used once |w b^K| <= _TAIL_RADIUS.
_TAIL_RADIUS = 0.25
_TAIL_TERMS = 48


class Regime(enum.Enum):
    LessThanOne = "LessThanOne"
    GreaterThanOne = "GreaterThanOne"


@dataclass(frozen=True)
class QParam:
    """Deformation parameter ``q`` with ``p = 1/q`` and ``ln q`` cached.

    Parameters
    ----------
    q : float
        Positive real number different from 1.

    Examples
    --------
    >>> qp = QParam(2.0)
    >>> qp.p, qp.regime
    (0.5, <Regime.GreaterThanOne: 'GreaterThanOne'>)
    """

    q: float
    p: float = field(init=False)
    lnq: float = field(init=False)
    regime: Regime = field(init=False)

    def __post_init__(self):
        q = float(self.q)
        if not (q > 0.0) or q == 1.0 or not math.isfinite(q):
            raise DomainError("q must be a positive real different from 1", q=q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", 1.0 / q)
        object.__setattr__(self, "lnq", math.log(q))
        object.__setattr__(
            self, "regime",
            Regime.LessThanOne if q < 1.0 else Regime.GreaterThanOne)

    @classmethod
    def of(cls, q):
        """Return ``q`` unchanged if it already is a QParam."""
        return q if isinstance(q, QParam) else cls(q)

    @property
    def small(self):
        """The member of ``{q, p}`` lying in ``(0, 1)``."""
        return self.q if self.q < 1.0 else self.p

    def require(self, regime):
        if self.regime is not regime:
            raise DomainError(f"operation requires regime {regime.value}", q=self.q)
        return self


@dataclass(frozen=True)
class NumericResult:
    """Value with a first-order error estimate and a work counter."""

    value: complex
    abs_err: float = 0.0
    terms_used: int = 0
    truncated: bool = False

    def __complex__(self):
        return complex(self.value)

    def __repr__(self):
        return (f"NumericResult(value={complex(self.value)!r}, abs_err={self.abs_err:.3g}, "
                f"terms_used={self.terms_used}, truncated={self.truncated})")


@dataclass(frozen=True)
class SurfacePoint:
    """Point of the Riemann surface of the logarithm.

    Parameters
    ----------
    modulus : float
        Positive modulus.
    argument : float
        Unbounded real argument; ``x`` and ``x e^{2 pi i}`` are distinct.
    """

    modulus: float
    argument: float = 0.0

    def __post_init__(self):
        if not self.modulus > 0:
            raise DomainError("surface points need a positive modulus",
                              modulus=self.modulus)
        object.__setattr__(self, "modulus", float(self.modulus))
        object.__setattr__(self, "argument", float(self.argument))

    @classmethod
    def of(cls, x):
        """Wrap a complex number (principal argument) or pass through."""
        if isinstance(x, SurfacePoint):
            return x
        x = complex(x)
        if x == 0:
            from .errors import ZeroArgument
            raise ZeroArgument("0 is not a point of the surface")
        return cls(abs(x), math.atan2(x.imag, x.real))

    @property
    def value(self):
        """Projection to the punctured plane."""
        return self.modulus * complex(math.cos(self.argument), math.sin(self.argument))

    def log(self):
        return complex(math.log(self.modulus), self.argument)

    def rotate(self, angle):
        return SurfacePoint(self.modulus, self.argument + angle)

    def scale(self, r):
        """Multiply by a positive real, keeping the argument."""
        return SurfacePoint(self.modulus * r, self.argument)

    def __complex__(self):
        return self.value


def q_bracket(n, qp):
    """q-integer ``[n]_q = (q^n - 1)/(q - 1)``.

    >>> q_bracket(3, QParam(2))
    7.0
    """
    qp = QParam.of(qp)
    if n < 0:
        raise DomainError("n must be non-negative", n=n)
    return float(sum(qp.q ** k for k in range(n)))


def q_factorial(n, qp):
    """q-factorial ``[n]_q^! = [1]_q [2]_q ... [n]_q`` with ``[0]_q^! = 1``.

    >>> q_factorial(3, QParam(2))
    21.0
    """
    qp = QParam.of(qp)
    if n < 0:
        raise DomainError("n must be non-negative", n=n)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_bracket(k, qp)
    return out


def _check_base(base):
    base = float(base)
    if not 0.0 < base < 1.0:
        raise DomainError("infinite products need a base in (0, 1)", base=base)
    return base


def _log_tail(w, lnb):
    """``log (w; base)_inf = -sum_j w^j / (j (1 - base^j))`` for ``|w| <= 1/4``."""
    rmax = float(np.max(np.abs(w), initial=0.0))
    if rmax == 0.0:
        return np.zeros(w.shape, dtype=complex)
    # |coef_j| <= 1/(1 - base), so J terms leave at most rmax^J/(1 - base)
    need = math.log(1e-18 * -math.expm1(lnb)) / math.log(min(rmax, _TAIL_RADIUS))
    j = np.arange(1, min(_TAIL_TERMS, max(1, math.ceil(need))) + 1)
    coef = 1.0 / (j * -np.expm1(j * lnb))
    # Horner in w
    acc = np.zeros(w.shape, dtype=complex)
    for c in coef[::-1]:
        acc = (acc + c) * w
    return -acc


def log_qpoch_inf(a, base):
    """Vectorized ``log (a; base)_inf`` for ``0 < base < 1``.

    Factors are split by the size of ``w_k = a base^k``. For ``|w_k| > 4``
    the terms ``log(-w_k)`` are summed in closed form and the terms
    ``log(1 - 1/w_k)`` form a finite product in ``1/a`` handled by the
    tail series. Factors with ``1/4 < |w_k| <= 4`` are taken directly.
    The rest are summed through ``-sum_j w^j / (j (1 - base^j))``. The
    cost is thus independent of ``|a|`` and bounded when ``base`` is
    close to 1. Exact zeros of the product give ``-inf``. The imaginary
    part is an unspecified branch.
    """
    base = _check_base(base)
    a = np.asarray(a, dtype=complex)
    absa = np.abs(a)
    lnb = math.log(base)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(absa > _TAIL_RADIUS,
                     np.ceil(np.log(absa / _TAIL_RADIUS) / -lnb), 0.0)
        K1 = np.where(absa > 1 / _TAIL_RADIUS,
                      np.ceil(np.log(absa * _TAIL_RADIUS) / -lnb), 0.0)
    K = np.nan_to_num(K, nan=0.0).astype(np.int64)
    K1 = np.minimum(np.nan_to_num(K1, nan=0.0).astype(np.int64), K)
    out = np.zeros(a.shape, dtype=complex)
    big = K1 > 0
    if np.any(big):
        ab, kb = a[big], K1[big].astype(float)
        head = kb * np.log(-ab) + lnb * kb * (kb - 1) / 2
        v = 1.0 / (ab * np.exp((kb - 1) * lnb))
        head += _log_tail(v, lnb) - _log_tail(base / ab, lnb)
        out[big] = head
    span = K - K1
    jmax = int(span.max()) if span.size else 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for j in range(jmax):
            fac = np.log(1.0 - a * np.power(base, K1 + j))
            out += np.where(j < span, fac, 0.0)
        w = a * np.power(base, K)
    return out + _log_tail(w, lnb)


def qpoch_inf(a, base):
    """Vectorized ``(a; base)_inf`` for ``0 < base < 1``."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(log_qpoch_inf(a, base))


def qpoch(a, base, n):
    """Vectorized finite ``(a; base)_n``; any real base, ``n`` may be negative.

    For ``n < 0`` the usual convention ``(a; q)_n = 1/(a q^n; q)_{-n}``
    is used.
    """
    a = np.asarray(a, dtype=complex)
    if n < 0:
        return 1.0 / qpoch(a * base ** n, base, -n)
    out = np.ones(a.shape, dtype=complex)
    for k in range(n):
        out = out * (1.0 - a * base ** k)
    return out


def pochhammer(a, base, n, tol=1e-16):
    """q-Pochhammer symbol ``(a; base)_n`` for finite or infinite ``n``.

    Parameters
    ----------
    a : complex
    base : float
        Any nonzero real for finite ``n``; must lie in ``(0, 1)`` when
        ``n`` is ``math.inf``.
    n : int or math.inf
    tol : float, optional
        Truncation threshold for the infinite product: factors are
        multiplied until ``|a| base^k < tol/10``.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> abs(pochhammer(2, 0.5, 2).value)
    0.0
    >>> round(pochhammer(0.5, 0.5, math.inf).value.real, 10)
    0.2887880951
    """
    a = complex(a)
    if n != math.inf:
        n = int(n)
        if n < 0:
            raise DomainError("n must be non-negative or inf", n=n)
        val = complex(qpoch(a, float(base), n))
        return NumericResult(val, 4 * EPS * n * abs(val), n, False)
    base = _check_base(base)
    if a == 0:
        return NumericResult(1.0 + 0j, 0.0, 0, False)
    lnb = math.log(base)
    kstop = max(0, math.ceil(math.log(abs(a) * 10.0 / tol) / -lnb))
    factors = 1.0 - a * base ** np.arange(kstop)
    val = complex(np.prod(factors))
    rem = abs(a) * base ** kstop
    tail = 2.0 * rem / (1.0 - base)
    err = abs(val) * (tail + 4 * EPS * max(kstop, 1))
    return NumericResult(val, err, kstop, True)


@dataclass(frozen=True)
class TruncSeries:
    """Truncated power series ``x^offset * sum_{n<=N} c_n x^n``.

    Parameters
    ----------
    coeffs : array_like of complex
        ``c_0, ..., c_N``; the series is known modulo ``x^(offset+N+1)``.
    valuation_offset : int, optional
        0 for series in ``C[[x]]`` and 1 for series in ``x C[[x]]``.
    """

    coeffs: np.ndarray
    valuation_offset: int = 0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise DomainError("a truncated series needs at least one coefficient")
        if self.valuation_offset < 0:
            raise DomainError("valuation offset must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self):
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def truncate(self, order):
        return TruncSeries(self.coeffs[: order + 1], self.valuation_offset)

    def shift(self, offset):
        """Re-express with a different valuation offset (zeros padded/dropped)."""
        d = self.valuation_offset - offset
        if d >= 0:
            return TruncSeries(np.concatenate([np.zeros(d), self.coeffs]), offset)
        if np.any(self.coeffs[:-d] != 0):
            raise DomainError("series has terms below the requested valuation")
        return TruncSeries(self.coeffs[-d:], offset)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        acc = np.zeros(x.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc * x ** self.valuation_offset

    def _aligned(self, other):
        off = min(self.valuation_offset, other.valuation_offset)
        a, b = self.shift(off), other.shift(off)
        n = min(a.order, b.order)
        return a.coeffs[: n + 1], b.coeffs[: n + 1], off

    def __add__(self, other):
        a, b, off = self._aligned(other)
        return TruncSeries(a + b, off)

    def __sub__(self, other):
        a, b, off = self._aligned(other)
        return TruncSeries(a - b, off)

    def __neg__(self):
        return TruncSeries(-self.coeffs, self.valuation_offset)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        return TruncSeries(self.coeffs * other, self.valuation_offset)

    __rmul__ = __mul__

    def allclose(self, other, rtol=1e-12, atol=1e-14):
        a, b, _ = self._aligned(other)
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))


def series_mul(f, g):
    """Cauchy product, exact up to the smaller of the two orders.

    >>> s = series_mul(TruncSeries([1, 1, 0]), TruncSeries([1, -1, 0]))
    >>> s.coeffs.real
    array([ 1.,  0., -1.])
    """
    n = min(f.order, g.order)
    c = np.convolve(f.coeffs[: n + 1], g.coeffs[: n + 1])[: n + 1]
    return TruncSeries(c, f.valuation_offset + g.valuation_offset)


def series_dq(f, qp):
    """Jackson q-derivative, ``x^n -> [n]_q x^(n-1)``, coefficientwise."""
    qp = QParam.of(qp)
    off = f.valuation_offset
    powers = off + np.arange(f.order + 1)
    brackets = np.array([q_bracket(int(k), qp) for k in powers])
    c = f.coeffs * brackets
    if off == 0:
        if f.order == 0:
            return TruncSeries([0.0], 0)
        return TruncSeries(c[1:], 0)
    return TruncSeries(c, off - 1)
