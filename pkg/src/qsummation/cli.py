"""
Command-line front end.

::

    qsummation eval   --target theta --q 0.5 --x 1
    qsummation verify --target thm-identity --q 2 --tol 1e-8
    qsummation sweep  --target confluence-lt1 --x 1 --q-grid 0.9,0.99,0.999 --output csv
    qsummation verify --list

Complex parameters are written ``modulus@argument`` (radians, unbounded,
so points of the Riemann surface of the logarithm are expressible), as a
Python literal such as ``0.3+0.4j``, or as a real number.

Exit status is 0 on success or PASS, 1 on FAIL or a numerical error, and
2 on a usage error. ``QSUM_THREADS`` caps the number of worker threads
used for independent verification cases; reports are always ordered by
case id.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import datetime
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import euler_qlt1 as e1
from . import hypergeom as hg
from . import qsum_gt1 as g1
from . import special as sp
from .errors import QSumError
from .euler_qlt1 import EulerQltContext
from .qcore import QParam, Regime, SurfacePoint

__all__ = ["RunConfig", "Case", "Report", "UsageError", "run", "main", "registry",
           "parse_complex"]

SCHEMA = 1
CSV_COLUMNS = ("param", "value_re", "value_im", "abs_err", "residual", "pass")
TOL_RANGE = (1e-14, 1e-2)


class UsageError(Exception):
    """Malformed command line; ``key`` names the offending parameter."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


# Parameter parsing -----------------------------------------------------

def parse_complex(text):
    """Parse ``modulus@argument``, a Python complex literal or a real.

    ``modulus@argument`` yields a SurfacePoint, everything else a complex.

    Examples
    --------
    >>> parse_complex("2@-1.5")
    SurfacePoint(modulus=2.0, argument=-1.5)
    >>> parse_complex("0.3+0.4j")
    (0.3+0.4j)
    """
    text = text.strip()
    if "@" in text:
        mod, arg = text.split("@", 1)
        return SurfacePoint(float(mod), float(arg))
    return complex(text.replace(" ", ""))


def _parse_grid(text):
    vals = [float(t) for t in text.split(",") if t.strip()]
    if len(vals) < 2:
        raise ValueError("needs at least two comma-separated values")
    steps = np.diff(vals)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("must be strictly monotone")
    return vals


_PARSERS = {
    "q": float, "x": parse_complex, "lam": parse_complex, "mu": parse_complex,
    "a": parse_complex, "b": parse_complex, "c": parse_complex, "d": float,
    "m": int, "k": int, "n": int, "tol": float, "q-grid": _parse_grid,
    "samples": int, "kernel": str,
}
_KERNELS = {"eq": g1.Kernel.EqKernel, "theta": g1.Kernel.ThetaKernel}


def _fmt(v):
    if isinstance(v, SurfacePoint):
        return f"{v.modulus:.12g}@{v.argument:.12g}"
    if isinstance(v, complex):
        if v.imag == 0:
            return f"{v.real:.12g}"
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(t) for t in v)
    return str(v)


def _c(v):
    return complex(v)


# Configuration and reports ---------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation.

    Parameters
    ----------
    command : {"eval", "verify", "sweep"}
    target : str
        Registered target name.
    params : dict
        Parsed parameters keyed by their command-line names.
    output : {"json", "csv"}
    seed : int
        Seed of the random sample grids.
    timestamp : bool
        Include a timestamp in json output.
    """

    command: str
    target: str
    params: dict = field(default_factory=dict)
    output: str = "json"
    seed: int = 0
    timestamp: bool = True

    @property
    def tol(self):
        return self.params.get("tol", 1e-8)


@dataclass(frozen=True)
class Case:
    """One row of a report."""

    id: str
    param: str
    value: complex | None = None
    abs_err: float | None = None
    residual: float | None = None
    passed: bool = True
    terms_used: int | None = None
    error: str | None = None


@dataclass(frozen=True)
class Report:
    config: RunConfig
    cases: tuple
    status: str

    @property
    def exit_code(self):
        return 0 if self.status in ("PASS", "OK") else 1

    @property
    def max_residual(self):
        res = [c.residual for c in self.cases if c.residual is not None]
        return max(res) if res else None


@dataclass(frozen=True)
class Target:
    name: str
    command: str
    summary: str
    keys: tuple
    fn: object


_REGISTRY: dict = {}


def _register(command, name, summary, keys):
    def deco(fn):
        _REGISTRY[(command, name)] = Target(name, command, summary, tuple(keys), fn)
        return fn
    return deco


def registry(command=None):
    """Registered targets, sorted by command then name."""
    items = sorted(_REGISTRY.values(), key=lambda t: (t.command, t.name))
    return [t for t in items if command is None or t.command == command]


# Sampling --------------------------------------------------------------

class _Sampler:
    """Random sample grid whose keys can be pinned from the command line."""

    def __init__(self, params, seed):
        self.params = params
        self.rng = np.random.default_rng(seed)
        self.random_used = False

    def get(self, key, draw):
        if key in self.params:
            return self.params[key]
        self.random_used = True
        return draw(self.rng)

    def count(self):
        return self.params.get("samples", 5)


def _polar(lo, hi, arg=(-math.pi, math.pi)):
    return lambda r: complex(cmath.rect(r.uniform(lo, hi), r.uniform(*arg)))


def _cases(sampler, build):
    """Call ``build`` once per sample; stop early if nothing is random."""
    out = []
    for i in range(max(1, sampler.count())):
        out.append((f"{i:03d}",) + tuple(build()))
        if not sampler.random_used:
            break
    return out


def _base(params, default, regime):
    q = params.get("q", default)
    try:
        return QParam(q).require(regime)
    except QSumError as err:
        raise UsageError("q", str(err)) from None


# Verification targets --------------------------------------------------
#
# Each returns a list of (case_id, label, thunk); thunk() -> (value, residual).

def _psi_numeric(q, x):
    """``Gamma_q'/Gamma_q`` by a Cauchy integral, independent of Omega."""
    return g1._cauchy_derivative(lambda z: sp.gamma_q(q, z).value, x, 1, radius=0.1,
                                 nodes=32) / sp.gamma_q(q, x).value


@_register("verify", "theta", "theta: bilateral sum = triple product, theta(x) = x theta(qx)",
           ("q", "x", "samples"))
def _v_theta(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        x = _c(s.get("x", _polar(0.2, 5.0)))

        def thunk():
            t = sp.theta_product(q, x)
            r1 = abs(sp.theta_bilateral(q, x) - t) / abs(t)
            r2 = abs(t - x * sp.theta_product(q, q * x)) / abs(t)
            return t, max(r1, r2)
        return f"q={_fmt(q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "modular", "theta modular relation under q* = exp(4 pi^2/ln q)",
           ("q", "x", "samples"))
def _v_modular(params, s):
    qp = _base(params, 0.5, Regime.LessThanOne)

    def build():
        x = s.get("x", lambda r: SurfacePoint(r.uniform(0.3, 3.0), r.uniform(-3.0, 3.0)))

        def thunk():
            return None, sp.verify_modular(qp, x)
        return f"q={_fmt(qp.q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "psi-omega", "Psi_q(x) = -ln q Omega(q^x) - ln(1-q), Psi_q(x+m) shift",
           ("q", "x", "m", "samples"))
def _v_psi_omega(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q
    lnq = math.log(q)

    def build():
        x = _c(s.get("x", lambda r: complex(r.uniform(0.5, 3.0), r.uniform(-1.0, 1.0))))
        m = s.get("m", lambda r: int(r.integers(0, 5)))

        def thunk():
            psi = _psi_numeric(q, x)
            r1 = abs(psi - (-lnq * sp.omega(math.inf, q ** x, q).value - math.log1p(-q)))
            shift = sp.psi_q(q, x + m).value - sp.psi_q(q, x).value
            r2 = abs(shift - lnq * sp.omega(m, q ** x, q).value)
            return psi, max(r1, r2)
        return f"q={_fmt(q)},x={_fmt(x)},m={m}", thunk
    return _cases(s, build)


@_register("verify", "a-psi", "A(q) = -(Psi_q(1) + ln(1-q))/ln q", ("q", "samples"))
def _v_a_psi(params, s):
    def build():
        q = s.get("q", lambda r: float(r.uniform(0.1, 0.9)))
        QParam(q).require(Regime.LessThanOne)

        def thunk():
            a = sp.const_A(q)
            rhs = -(_psi_numeric(q, 1.0) + math.log1p(-q)) / math.log(q)
            return a, abs(a - rhs)
        return f"q={_fmt(q)}", thunk
    return _cases(s, build)


@_register("verify", "omega", "Omega_{m+n}(x) = Omega_m(x) + Omega_n(q^m x), infinite case",
           ("q", "x", "m", "n", "samples"))
def _v_omega(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        x = _c(s.get("x", _polar(0.1, 3.0)))
        m = s.get("m", lambda r: int(r.integers(0, 6)))
        n = s.get("n", lambda r: int(r.integers(0, 6)))

        def thunk():
            om = lambda k, z: sp.omega(k, z, q).value
            r1 = abs(om(m + n, x) - om(m, x) - om(n, q ** m * x))
            r2 = abs(om(math.inf, x) - om(m, x) - om(math.inf, q ** m * x))
            return om(math.inf, x), max(r1, r2)
        return f"q={_fmt(q)},x={_fmt(x)},m={m},n={n}", thunk
    return _cases(s, build)


@_register("verify", "qlog-omega", "ell(x) = -Omega(x) + Omega(q/x)", ("q", "x", "samples"))
def _v_qlog_omega(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        x = _c(s.get("x", _polar(0.2, 3.0)))

        def thunk():
            ell = sp.q_log(q, x).value
            rhs = -sp.omega(math.inf, x, q).value + sp.omega(math.inf, q / x, q).value
            return ell, abs(ell - rhs)
        return f"q={_fmt(q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "qlog-psi", "ell(q^x) = (Psi_q(x) - Psi_q(1-x))/ln q",
           ("q", "x", "samples"))
def _v_qlog_psi(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        x = _c(s.get("x", lambda r: complex(r.uniform(0.1, 0.9), r.uniform(-1.0, 1.0))))

        def thunk():
            ell = sp.q_log(q, q ** x).value
            rhs = (sp.psi_q(q, x).value - sp.psi_q(q, 1 - x).value) / math.log(q)
            return ell, abs(ell - rhs)
        return f"q={_fmt(q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "q-euler", "q < 1 Euler function: recursion = partial fractions = "
           "expansion at infinity", ("q", "x", "samples"))
def _v_q_euler(params, s):
    ctx = EulerQltContext(_base(params, 0.5, Regime.LessThanOne))

    def build():
        x = _c(s.get("x", _polar(0.5, 5.0, (-3.0, 3.0))))

        def thunk():
            v = [e1.euler_q(ctx, x).value, e1.euler_q_heine(ctx, x).value,
                 e1.euler_q_infinity(ctx, x).value]
            return v[0], max(abs(v[0] - v[1]), abs(v[0] - v[2]), abs(v[1] - v[2]))
        return f"q={_fmt(ctx.qp.q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "q-euler-residue", "residues of the q < 1 Euler function at (q-1)q^k",
           ("q", "k", "samples"))
def _v_residue(params, s):
    ctx = EulerQltContext(_base(params, 0.5, Regime.LessThanOne))
    q = ctx.qp.q

    ks = iter(range(0, -1000, -1))

    def build():
        k = s.get("k", lambda r: next(ks))

        def thunk():
            z0 = ctx.pole(k)
            rho = 0.3 * abs(z0) * (1 - q)
            w = np.exp(2j * math.pi * (np.arange(64) + 0.5) / 64)
            vals = np.array([e1.euler_q(ctx, z0 + rho * t).value for t in w])
            contour = complex(np.mean(vals * rho * w))
            res = e1.euler_q_residue(ctx, k)
            return res, abs(res - contour)
        return f"q={_fmt(q)},k={k}", thunk
    return _cases(s, build)


@_register("verify", "heine", "Heine transformation of 2phi1", ("q", "a", "b", "c", "x", "samples"))
def _v_heine(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        a = _c(s.get("a", _polar(0.1, 0.9)))
        b = _c(s.get("b", _polar(0.1, 2.0)))
        c = _c(s.get("c", _polar(0.1, 2.0)))
        x = _c(s.get("x", _polar(0.1, 0.9)))
        return (f"q={_fmt(q)},a={_fmt(a)},b={_fmt(b)},c={_fmt(c)},x={_fmt(x)}",
                lambda: (None, hg.verify_heine(a, b, c, q, x)))
    return _cases(s, build)


@_register("verify", "watson", "Watson connection formula for 2phi1",
           ("q", "a", "b", "c", "x", "samples"))
def _v_watson(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        a = _c(s.get("a", _polar(0.4, 0.9)))
        b = _c(s.get("b", _polar(0.4, 0.9)))
        x = _c(s.get("x", _polar(0.4, 0.9, (-3.0, 3.0))))
        c = _c(s.get("c", lambda r: 0.3 * r.uniform(0.2, 1.0) * abs(a * b * x) / q
                          * cmath.exp(1j * r.uniform(-3, 3))))
        return (f"q={_fmt(q)},a={_fmt(a)},b={_fmt(b)},c={_fmt(c)},x={_fmt(x)}",
                lambda: (hg.watson_rhs(a, b, c, q, x), hg.verify_watson(a, b, c, q, x)))
    return _cases(s, build)


@_register("verify", "watson-degenerate", "connection formula for b = a q^m (c = 0 allowed)",
           ("q", "m", "a", "c", "x", "samples"))
def _v_watson_deg(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        m = s.get("m", lambda r: int(r.integers(0, 4)))
        a = _c(s.get("a", _polar(0.4, 0.9)))
        x = _c(s.get("x", _polar(0.4, 0.9, (-3.0, 3.0))))
        c = _c(s.get("c", lambda r: 0.0 if r.uniform() < 0.3 else
                          0.3 * r.uniform(0.2, 1.0) * abs(a * a * x) * q ** (m - 1)
                          * cmath.exp(1j * r.uniform(-3, 3))))
        return (f"q={_fmt(q)},m={m},a={_fmt(a)},c={_fmt(c)},x={_fmt(x)}",
                lambda: (hg.watson_degenerate_rhs(m, a, c, q, x),
                         hg.verify_watson_degenerate(m, a, c, x, q)))
    return _cases(s, build)


@_register("verify", "watson-ca-qk", "connection formula for b = a q^m, c = a q^-k",
           ("q", "k", "m", "a", "x", "samples"))
def _v_watson_ca_qk(params, s):
    q = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        k = s.get("k", lambda r: int(r.integers(0, 3)))
        m = s.get("m", lambda r: int(r.integers(0, 3)))
        x = _c(s.get("x", _polar(0.4, 0.9, (-3.0, 3.0))))
        a = _c(s.get("a", lambda r: r.uniform(1.5, 3.0) * q ** (1 - k - m) / abs(x)
                          * cmath.exp(1j * r.uniform(-3, 3))))
        return (f"q={_fmt(q)},k={k},m={m},a={_fmt(a)},x={_fmt(x)}",
                lambda: (hg.watson_ca_qk_rhs(k, m, a, q, x),
                         hg.verify_watson_ca_qk(k, m, a, x, q)))
    return _cases(s, build)


@_register("verify", "ramanujan", "(x; p)_inf 0phi1(-; x; p, x) = 1", ("q", "x", "samples"))
def _v_ramanujan(params, s):
    p = _base(params, 0.5, Regime.LessThanOne).q

    def build():
        x = _c(s.get("x", _polar(0.1, 3.0, (-3.0, 3.0))))
        return f"q={_fmt(p)},x={_fmt(x)}", lambda: (None, hg.verify_ramanujan(x, p))
    return _cases(s, build)


def _qgt1(params, default=2.0):
    return _base(params, default, Regime.GreaterThanOne)


def _off_neg_spiral(r):
    """Random lambda away from -q^Z."""
    return complex(cmath.rect(r.uniform(0.5, 2.0), r.uniform(-2.5, 2.5)))


@_register("verify", "q-factorial", "q-Laplace transforms of xi^n give [n]_q! or q^{n(n-1)/2}",
           ("q", "n", "d", "lam", "kernel", "samples"))
def _v_qfactorial(params, s):
    qp = _qgt1(params)

    def build():
        n = s.get("n", lambda r: int(r.integers(0, 6)))
        kern = s.get("kernel", lambda r: ("eq", "theta")[int(r.integers(0, 2))])
        if "lam" in params or ("d" not in params and s.rng.uniform() < 0.5):
            lam = _c(s.get("lam", _off_neg_spiral))
            mode, tag = g1.SpiralMode(lam), f"lam={_fmt(lam)}"
        else:
            d = s.get("d", lambda r: float(r.uniform(-2.0, 2.0)))
            mode, tag = g1.RayMode(d), f"d={_fmt(d)}"
        spec = g1.QSumSpec(_KERNELS[kern], mode, qp)

        def thunk():
            chk = g1.q_factorial_check(spec, n)
            return chk.lhs, chk.residual
        return f"q={_fmt(qp.q)},n={n},kernel={kern},{tag}", thunk
    return _cases(s, build)


@_register("verify", "thm-identity", "continuous and discrete sums of the q-Euler series agree "
           "for both Borel transforms", ("q", "x", "d", "lam", "samples"))
def _v_identity(params, s):
    qp = _qgt1(params)

    def build():
        x = s.get("x", _polar(0.3, 3.0, (-2.5, 2.5)))
        d = s.get("d", lambda r: cmath.phase(_c(x)) + float(r.uniform(-0.5, 0.5)))
        lam = _c(s.get("lam", _off_neg_spiral))

        def thunk():
            v = g1.euler_four_sums(qp, x, d, lam)
            res = max(abs(v["ray_eq"].value - v["ray_theta"].value),
                      abs(v["spiral_eq"].value - v["spiral_theta"].value))
            return v["ray_eq"].value, res
        return f"q={_fmt(qp.q)},x={_fmt(x)},d={_fmt(d)},lam={_fmt(lam)}", thunk
    return _cases(s, build)


@_register("verify", "euler-equation", "every q-Euler sum solves x^2 d_q y + y = x",
           ("q", "x", "lam", "samples"))
def _v_euler_eq(params, s):
    qp = _qgt1(params)

    def build():
        x = _c(s.get("x", _polar(0.3, 3.0, (-2.5, 2.5))))
        lam = _c(s.get("lam", _off_neg_spiral))

        def thunk():
            fr = lambda z: g1.euler_q_continued(qp, z).value
            fs = lambda z: g1.euler_sum_spiral(qp, z, lam).value
            res = max(g1.euler_equation_residual(qp, fr, x),
                      g1.euler_equation_residual(qp, fs, x))
            return fr(x), res
        return f"q={_fmt(qp.q)},x={_fmt(x)},lam={_fmt(lam)}", thunk
    return _cases(s, build)


@_register("verify", "stokes", "Stokes jump E_q(x e^{2 pi i}) - E_q(x)", ("q", "x", "samples"))
def _v_stokes(params, s):
    qp = _qgt1(params)

    def build():
        x = s.get("x", lambda r: SurfacePoint(r.uniform(0.3, 3.0), r.uniform(-6.0, -0.3)))

        def thunk():
            chk = g1.stokes_jump(qp, x)
            return chk.lhs, chk.residual
        return f"q={_fmt(qp.q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "disc-cont", "discrete minus continuous q-Euler sum in theta and ell terms",
           ("q", "lam", "x", "samples"))
def _v_disc_cont(params, s):
    qp = _qgt1(params)

    def build():
        lam = _c(s.get("lam", _off_neg_spiral))
        x = s.get("x", _polar(0.3, 3.0, (-2.5, 2.5)))

        def thunk():
            chk = g1.disc_cont_difference(qp, lam, x)
            return chk.lhs, chk.residual
        return f"q={_fmt(qp.q)},lam={_fmt(lam)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "moyenne", "average of the discrete sums over lambda = continuous sum",
           ("q", "x", "samples"))
def _v_moyenne(params, s):
    qp = _qgt1(params)

    def build():
        x = s.get("x", _polar(0.3, 3.0, (-2.5, 2.5)))

        def thunk():
            chk = g1.average_over_spiral(qp, x)
            return chk.lhs, chk.residual
        return f"q={_fmt(qp.q)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "spiral-compare", "difference of two discrete sums is a constant times "
           "a theta quotient", ("q", "lam", "mu", "samples"))
def _v_spiral(params, s):
    qp = _qgt1(params)

    def build():
        lam = _c(s.get("lam", lambda r: -cmath.exp(1j * r.uniform(0.05, 0.2))))
        mu = _c(s.get("mu", lambda r: cmath.exp(1j * r.uniform(0.5, 1.0))))
        xs = [complex(cmath.rect(0.4 + 0.3 * j, 0.4 * j - 0.9)) for j in range(5)]

        def thunk():
            rep = g1.spiral_compare(qp, lam, mu, xs)
            c0 = g1.spiral_constant(qp)
            return rep.constant, max(rep.dispersion, abs(rep.constant - c0))
        return f"q={_fmt(qp.q)},lam={_fmt(lam)},mu={_fmt(mu)}", thunk
    return _cases(s, build)


@_register("verify", "tschakaloff", "four Tschakaloff sums and both closed forms agree",
           ("q", "lam", "d", "x", "samples"))
def _v_tschakaloff(params, s):
    qp = _qgt1(params)

    def build():
        lam = _c(s.get("lam", lambda r: cmath.rect(r.uniform(0.5, 2.0), r.uniform(0.3, 2.8))))
        x = _c(s.get("x", _polar(0.3, 2.0, (-2.5, 2.5))))
        d = s.get("d", lambda r: float(r.uniform(0.3, 2.8)) * (1 if r.uniform() < 0.5 else -1))

        def thunk():
            rep = g1.tschakaloff_sums(qp, lam, d, x)
            return rep.ray_eq, rep.residual
        return f"q={_fmt(qp.q)},lam={_fmt(lam)},d={_fmt(d)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "tschakaloff-equation", "Tschakaloff sums solve x y(qx) - q y(x) + q x = 0",
           ("q", "lam", "d", "x", "samples"))
def _v_tschakaloff_eq(params, s):
    qp = _qgt1(params)

    def build():
        lam = _c(s.get("lam", lambda r: cmath.rect(r.uniform(0.5, 2.0), r.uniform(0.3, 2.8))))
        x = _c(s.get("x", _polar(0.3, 2.0, (-2.5, 2.5))))
        d = s.get("d", lambda r: float(r.uniform(0.3, 2.8)))

        def thunk():
            rep = lambda z: g1.tschakaloff_sums(qp, lam, d, z)
            r1 = g1.tschakaloff_functional_residual(qp, lambda z: rep(z).spiral_theta, x)
            r2 = g1.tschakaloff_functional_residual(qp, lambda z: rep(z).ray_eq, x)
            return rep(x).spiral_theta, max(r1, r2)
        return f"q={_fmt(qp.q)},lam={_fmt(lam)},d={_fmt(d)},x={_fmt(x)}", thunk
    return _cases(s, build)


@_register("verify", "modified-tschakaloff", "sums of the series with Borel transform "
           "1/(1+xi)^n, including the lambda average", ("q", "n", "lam", "d", "x", "samples"))
def _v_modified(params, s):
    qp = _qgt1(params)

    def build():
        n = s.get("n", lambda r: int(r.integers(1, 4)))
        lam = _c(s.get("lam", lambda r: cmath.rect(r.uniform(0.5, 2.0), r.uniform(0.3, 2.8))))
        x = _c(s.get("x", _polar(0.3, 2.0, (-1.0, 1.0))))
        d = s.get("d", lambda r: cmath.phase(x) + float(r.uniform(-0.5, 0.5)))

        def thunk():
            rep = g1.modified_tschakaloff_suite(qp, n, lam, d, x)
            res = max(rep.spiral_residual, rep.ray_residual, rep.average_residual)
            return rep.ray_eq, res
        return f"q={_fmt(qp.q)},n={n},lam={_fmt(lam)},d={_fmt(d)},x={_fmt(x)}", thunk
    return _cases(s, build)


# Evaluation targets ----------------------------------------------------

def _need(params, key):
    if key not in params:
        raise UsageError(key, "required by this target")
    return params[key]


@_register("eval", "theta", "theta_q(x), q in (0, 1)", ("q", "x", "tol"))
def _e_theta(params):
    r = sp.theta(_base(params, 0.5, Regime.LessThanOne).q, _c(_need(params, "x")))
    return r.value, r.abs_err, r.reduction_steps


@_register("eval", "q-log", "q-logarithm ell_q(x), q in (0, 1)", ("q", "x", "tol"))
def _e_qlog(params):
    return sp.q_log(_base(params, 0.5, Regime.LessThanOne).q, _c(_need(params, "x")))


@_register("eval", "gamma-q", "Jackson q-Gamma, q in (0, 1)", ("q", "x", "tol"))
def _e_gamma(params):
    return sp.gamma_q(_base(params, 0.5, Regime.LessThanOne).q, _c(_need(params, "x")))


@_register("eval", "psi-q", "logarithmic derivative of q-Gamma", ("q", "x", "tol"))
def _e_psi(params):
    return sp.psi_q(_base(params, 0.5, Regime.LessThanOne).q, _c(_need(params, "x")))


@_register("eval", "eq-exp", "q-exponential e_q(x), q > 1", ("q", "x", "tol"))
def _e_eq(params):
    return sp.eq_exp(_qgt1(params), _c(_need(params, "x")))


@_register("eval", "euler-q", "q-Euler function, q in (0, 1)", ("q", "x", "tol"))
def _e_euler_q(params):
    ctx = EulerQltContext(_base(params, 0.5, Regime.LessThanOne))
    return e1.euler_q(ctx, _c(_need(params, "x")), tol=params.get("tol", 1e-15))


@_register("eval", "euler", "classical Euler function", ("x", "tol"))
def _e_euler(params):
    return e1.euler_classical(_c(_need(params, "x")))


@_register("eval", "euler-ray", "continuous sum of the q > 1 Euler series in direction d",
           ("q", "x", "d", "kernel", "tol"))
def _e_euler_ray(params):
    x = _need(params, "x")
    d = params.get("d", SurfacePoint.of(x).argument)
    return g1.euler_sum_ray(_qgt1(params), x, d, _KERNELS[params.get("kernel", "eq")],
                            tol=params.get("tol", 1e-13))


@_register("eval", "euler-spiral", "discrete sum of the q > 1 Euler series on [lam; q]",
           ("q", "x", "lam", "kernel", "tol"))
def _e_euler_spiral(params):
    return g1.euler_sum_spiral(_qgt1(params), _c(_need(params, "x")), _c(params.get("lam", 1.0)),
                               _KERNELS[params.get("kernel", "eq")],
                               tol=params.get("tol", 1e-13))


@_register("eval", "phi", "basic hypergeometric 2phi1(a, b; c; q, x)",
           ("q", "a", "b", "c", "x", "tol"))
def _e_phi(params):
    q = _base(params, 0.5, Regime.LessThanOne).q
    spec = hg.BasicHG((_c(_need(params, "a")), _c(_need(params, "b"))),
                      (_c(_need(params, "c")),), q)
    return hg.phi_rs(spec, _c(_need(params, "x")))


# Sweep targets ---------------------------------------------------------
#
# Each returns rows (param, value, abs_err, error).

@_register("sweep", "confluence-lt1", "|E_q(x) - E(x)| as q -> 1-", ("x", "q-grid"))
def _s_lt1(params):
    grid = params.get("q-grid", [0.9, 0.99, 0.999])
    rows = e1.confluence_sweep_lt1(_c(params.get("x", 1.0)), grid)
    return [(r["q"], r["value"], None, r["error"]) for r in rows]


@_register("sweep", "confluence-gt1-ray", "|E_q^d(x) - E(x)| as q -> 1+", ("x", "q-grid"))
def _s_gt1_ray(params):
    grid = params.get("q-grid", [1.1, 1.01, 1.001])
    rows = g1.confluence_sweep_gt1(_c(params.get("x", 1.0)), grid)
    return [(r["q"], r["ray"], None, r["ray_error"]) for r in rows]


@_register("sweep", "confluence-gt1-spiral", "|E_q^[lam](x) - E(x)| as q -> 1+",
           ("x", "lam", "q-grid"))
def _s_gt1_spiral(params):
    grid = params.get("q-grid", [1.1, 1.01, 1.001])
    rows = g1.confluence_sweep_gt1(_c(params.get("x", 1.0)), grid,
                                   lam=_c(params.get("lam", 1.0)))
    return [(r["q"], r["spiral"], None, r["spiral_error"]) for r in rows]


@_register("sweep", "confluence-2f0", "q-confluent 2phi1 against the Borel sum of 2F0",
           ("a", "b", "x", "d", "q-grid"))
def _s_2f0(params):
    grid = params.get("q-grid", [0.9, 0.99])
    rows = e1.confluent_hypergeom_sweep(_c(params.get("a", 0.3)), _c(params.get("b", 0.7)),
                                        _c(params.get("x", 0.1j)), params.get("d", math.pi / 2),
                                        grid)
    return [(r["q"], r["value"], None, r["error"]) for r in rows]


# Execution -------------------------------------------------------------

def _error_text(err):
    ctx = ", ".join(f"{k}={_fmt(v) if isinstance(v, (complex, float, SurfacePoint)) else v}"
                    for k, v in sorted(err.context.items()) if v is not None)
    return f"{err.kind}: {err}" + (f" ({ctx})" if ctx else "")


def _threads():
    raw = os.environ.get("QSUM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("QSUM_THREADS", f"expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("QSUM_THREADS", f"expected a positive integer, got {raw!r}")
    return n


def _validate(config):
    key = (config.command, config.target)
    if key not in _REGISTRY:
        raise UsageError("target", f"unknown {config.command} target {config.target!r}")
    target = _REGISTRY[key]
    for k in config.params:
        if k not in target.keys and k != "tol":
            raise UsageError(k, f"not a parameter of target {config.target!r}")
    lo, hi = TOL_RANGE
    if not lo <= config.tol <= hi:
        raise UsageError("tol", f"must lie in [{lo:g}, {hi:g}]")
    if config.params.get("samples", 1) < 1:
        raise UsageError("samples", "must be positive")
    if "kernel" in config.params and config.params["kernel"] not in _KERNELS:
        raise UsageError("kernel", "must be 'eq' or 'theta'")
    return target


def _run_case(tol, case_id, label, thunk):
    try:
        value, residual = thunk()
    except QSumError as err:
        return Case(case_id, label, passed=False, error=_error_text(err))
    value = None if value is None else complex(value)
    residual = float(residual)
    return Case(case_id, label, value, None, residual, bool(residual < tol))


def run(config):
    """Execute a configuration.

    Returns
    -------
    Report

    Raises
    ------
    UsageError
        Unknown target, foreign parameter, or parameter out of range.
    QSumError
        Numerical failure of an ``eval`` target.
    """
    target = _validate(config)
    params = config.params
    if config.command == "eval":
        r = target.fn(params)
        if isinstance(r, tuple):
            value, err, terms = r
        else:
            value, err, terms = r.value, r.abs_err, r.terms_used
        label = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
        case = Case("000", label, complex(value), float(err), None, True, int(terms))
        return Report(config, (case,), "OK")
    if config.command == "sweep":
        rows = target.fn(params)
        cases, prev = [], math.inf
        for i, (q, value, err, error) in enumerate(rows):
            cases.append(Case(f"{i:03d}", _fmt(q), complex(value), err, float(error),
                              bool(error < prev)))
            prev = error
        status = "PASS" if all(c.passed for c in cases) else "FAIL"
        return Report(config, tuple(cases), status)
    sampler = _Sampler(params, config.seed)
    jobs = target.fn(params, sampler)
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(lambda j: _run_case(config.tol, *j), jobs))
    else:
        cases = [_run_case(config.tol, *j) for j in jobs]
    cases.sort(key=lambda c: c.id)
    status = "PASS" if all(c.passed for c in cases) else "FAIL"
    return Report(config, tuple(cases), status)


def _num(v):
    return v if v is not None and math.isfinite(v) else None


def render(report):
    """Serialize a report as json or csv text."""
    cfg = report.config
    if cfg.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in report.cases:
            w.writerow([c.param,
                        "" if c.value is None else repr(c.value.real),
                        "" if c.value is None else repr(c.value.imag),
                        "" if c.abs_err is None else repr(c.abs_err),
                        "" if c.residual is None else repr(c.residual),
                        str(c.passed).lower()])
        return buf.getvalue()
    doc = {
        "schema": SCHEMA,
        "command": cfg.command,
        "target": cfg.target,
        "params": {k: _fmt(v) for k, v in sorted(cfg.params.items())},
        "seed": cfg.seed,
        "tol": cfg.tol,
        "status": report.status,
        "max_residual": _num(report.max_residual),
        "cases": [{
            "id": c.id, "param": c.param,
            "value_re": None if c.value is None else _num(c.value.real),
            "value_im": None if c.value is None else _num(c.value.imag),
            "abs_err": _num(c.abs_err), "residual": _num(c.residual), "pass": c.passed,
            "terms_used": c.terms_used, "error": c.error,
        } for c in report.cases],
    }
    if cfg.timestamp:
        doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _build_parser():
    parser = argparse.ArgumentParser(prog="qsummation",
                                     description="q-Borel summation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "verify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--list", action="store_true", help="list registered targets")
        p.add_argument("--target")
        p.add_argument("--output", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp from json output")
        for key in _PARSERS:
            p.add_argument(f"--{key}", dest=key.replace("-", "_"), metavar="VALUE")
    return parser


def main(argv=None):
    """Entry point; returns the exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list:
        for t in registry(args.command):
            print(f"{t.name:24s} {t.summary}")
        return 0
    try:
        if not args.target:
            raise UsageError("target", "required unless --list is given")
        params = {}
        for key, conv in _PARSERS.items():
            raw = getattr(args, key.replace("-", "_"))
            if raw is None:
                continue
            try:
                params[key] = conv(raw)
            except (ValueError, QSumError) as err:
                raise UsageError(key, f"cannot parse {raw!r}: {err}") from None
        config = RunConfig(args.command, args.target, params, args.output, args.seed,
                           not args.no_timestamp)
        report = run(config)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except QSumError as err:
        print(f"error: {_error_text(err)}", file=sys.stderr)
        return 1
    sys.stdout.write(render(report))
    for c in report.cases:
        if c.error:
            print(f"case {c.id}: {c.error}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
