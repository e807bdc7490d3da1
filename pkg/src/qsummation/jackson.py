"""
Jackson q-integrals.

``jackson_finite`` is ``int_0^x f d_q t = (1-q) x sum_{n>=0} f(q^n x) q^n``
and ``jackson_bilateral`` sums over a whole q-orbit ``lambda q^Z``:
``(1-q) lambda sum_{n in Z} f(q^n lambda) q^n``. Both call ``f`` on
blocks of points, so ``f`` should accept numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergent, PoleOnPath
from .qcore import EPS, NumericResult, QParam, Regime

__all__ = ["Spiral", "jackson_finite", "jackson_bilateral", "BUDGET"]

BUDGET = 100_000


@dataclass(frozen=True)
class Spiral:
    """The discrete q-orbit ``anchor * q^Z`` in the punctured plane."""

    anchor: complex
    qp: QParam

    def __post_init__(self):
        a = complex(self.anchor)
        if a == 0:
            raise DomainError("a spiral needs a nonzero anchor")
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "qp", QParam.of(self.qp))

    def index_of(self, z, atol=1e-12):
        """Integer ``n`` with ``z = anchor q^n``, or None."""
        t = np.log(complex(z) / self.anchor)
        im = (t.imag + math.pi) % (2 * math.pi) - math.pi
        n = t.real / self.qp.lnq
        if abs(im) < atol and abs(n - round(n)) < atol * max(1.0, abs(n)):
            return int(round(n))
        return None

    def contains(self, z, atol=1e-12):
        return self.index_of(z, atol) is not None

    def __eq__(self, other):
        if not isinstance(other, Spiral):
            return NotImplemented
        return self.qp.q == other.qp.q and self.contains(other.anchor)

    def __hash__(self):
        return hash(self.qp.q)

    def reanchor(self, k):
        """Same spiral anchored at ``anchor q^k``."""
        return Spiral(self.anchor * self.qp.q ** k, self.qp)


def _evaluate(f, pts):
    vals = np.asarray(f(pts), dtype=complex)
    if vals.shape != pts.shape:
        vals = np.array([complex(f(z)) for z in pts])
    return vals


class _Side:
    """One tail of a Jackson sum, walked outward in growing blocks."""

    def __init__(self, f, anchor, base, step, thresh):
        self.f, self.anchor, self.base, self.step = f, anchor, base, step
        self.thresh = thresh
        self.n = 0 if step > 0 else -1
        self.blocks = []
        self.done = False
        self.count = 0
        self.last = 0.0

    def advance(self, size):
        ns = self.n + self.step * np.arange(size)
        self.n = int(ns[-1]) + self.step
        w = np.power(self.base, ns.astype(float))
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            vals = _evaluate(self.f, self.anchor * w)
            terms = vals * w
        small = np.abs(terms) < self.thresh
        # zero weight times an overflowing kernel is a vanishing term
        bad = ~np.isfinite(terms)
        if np.any(bad):
            if np.any(bad & (w > 1e-300) & (w < 1e300)):
                raise PoleOnPath("integrand is singular at a spiral point",
                                 point=complex(self.anchor * w[bad][0]))
            terms[bad] = 0.0
            small |= bad
        self.count += size
        # three consecutive sub-threshold terms end the tail
        run = 0
        for i, s in enumerate(small):
            run = run + 1 if s else 0
            if run == 3:
                self.blocks.append(terms[: i + 1])
                self.last = float(np.abs(terms[i - 2: i + 1]).max())
                self.done = True
                return
        self.blocks.append(terms)
        self.last = float(np.abs(terms[-3:]).max())

    def total(self):
        return np.concatenate(self.blocks).sum() if self.blocks else 0j


def _run(sides, tol, budget):
    size = 64
    while not all(s.done for s in sides):
        for s in sides:
            if not s.done:
                if s.count >= budget:
                    partial = sum(t.total() for t in sides)
                    raise NonConvergent("Jackson sum tail did not decay within budget",
                                        partial=partial, side=s.step)
                s.advance(min(size, budget - s.count))
        size = min(2 * size, 8192)


def jackson_finite(f, x, qp, tol=1e-15, budget=BUDGET):
    """Jackson integral ``int_0^x f(t) d_q t`` for ``0 < q < 1``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    x : complex
        Upper end point.
    qp : QParam or float
        Base ``q`` in ``(0, 1)``.
    tol : float, optional
        Absolute tolerance on the neglected tail.

    Returns
    -------
    NumericResult

    Examples
    --------
    >>> r = jackson_finite(lambda t: t, 2.0, QParam(0.5))
    >>> round(r.value.real, 12)
    2.666666666667
    """
    qp = QParam.of(qp).require(Regime.LessThanOne)
    x = complex(x)
    if x == 0:
        return NumericResult(0j, 0.0, 0, False)
    pref = (1 - qp.q) * x
    thresh = tol * (1 - qp.q) / abs(pref)
    side = _Side(f, x, qp.q, 1, thresh)
    _run([side], tol, budget)
    val = pref * side.total()
    err = abs(pref) * side.last / (1 - qp.q) + 4 * EPS * abs(val) * math.log2(side.count + 1)
    return NumericResult(complex(val), float(err), side.count, True)


def _peak_shift(f, lam, q, span=50.0, samples=1001):
    """Spiral index near the largest term ``|f(q^n lam) q^n|``."""
    nmax = int(math.ceil(span / abs(math.log(q))))
    stride = max(1, (2 * nmax) // samples)
    ns = np.arange(-nmax, nmax + 1, stride)
    w = np.power(q, ns.astype(float))
    with np.errstate(over="ignore", invalid="ignore", under="ignore", divide="ignore"):
        try:
            mags = np.abs(_evaluate(f, lam * w) * w)
        except ArithmeticError:
            return 0
    mags = np.where(np.isfinite(mags), mags, 0.0)
    if mags.max() == 0.0:
        return 0
    return int(ns[int(mags.argmax())])


def jackson_bilateral(f, s, tol=1e-15, budget=BUDGET, recenter=True):
    """Bilateral Jackson integral over the spiral ``s``.

    Computes ``(1-q) lambda sum_{n in Z} f(q^n lambda) q^n`` with ``q`` the
    spiral's base, walking outward from ``n = 0`` in both directions.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    s : Spiral
    tol : float, optional
        Absolute tolerance on each neglected tail.
    recenter : bool, optional
        Start the walk at the spiral point carrying the largest term, found
        on a coarse scan of ``|xi| in [e^-50, e^50]``. The sum itself does
        not depend on the anchor.

    Returns
    -------
    NumericResult

    Raises
    ------
    NonConvergent
        If a tail has not decayed after ``budget`` terms.
    PoleOnPath
        If ``f`` is singular at a spiral point.
    """
    q = s.qp.q
    lam = s.anchor
    if recenter:
        lam = lam * q ** _peak_shift(f, lam, q)
    pref = (1 - q) * lam
    b = min(q, 1 / q)
    thresh = tol * (1 - b) / abs(pref)
    sides = [_Side(f, lam, q, 1, thresh), _Side(f, lam, q, -1, thresh)]
    _run(sides, tol, budget)
    val = pref * (sides[0].total() + sides[1].total())
    n = sides[0].count + sides[1].count
    err = (abs(pref) * (sides[0].last + sides[1].last) / (1 - b)
           + 4 * EPS * abs(val) * math.log2(n + 1))
    return NumericResult(complex(val), float(err), n, True)
