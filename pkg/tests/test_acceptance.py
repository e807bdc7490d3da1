"""Acceptance criteria 1-11, each at its stated tolerance."""

import cmath
import json
import math

import numpy as np
import pytest

from qsummation import cli
from qsummation import euler_qlt1 as e1
from qsummation import hypergeom as hg
from qsummation import qsum_gt1 as g1
from qsummation import special as sp
from qsummation.errors import PoleAt
from qsummation.qcore import QParam, SurfacePoint


def rng(k):
    return np.random.default_rng(1000 + k)


def rect(r, lo, hi, alo=-math.pi, ahi=math.pi):
    return cmath.rect(r.uniform(lo, hi), r.uniform(alo, ahi))


def cauchy_log_derivative(f, x, radius=0.1, nodes=32):
    """``f'(x)/f(x)`` from the trapezoid rule on a circle; independent of any closed form."""
    w = np.exp(2j * math.pi * np.arange(nodes) / nodes)
    vals = np.array([f(x + radius * t) for t in w])
    return complex(np.mean(vals / (radius * w))) / f(x)


def test_c01_theta(report):
    r = rng(1)
    worst_sum = worst_fe = worst_raw = 0.0
    for b in (0.3, 0.5, 0.8):
        for _ in range(100):
            x = rect(r, 0.2, 5.0)
            t = sp.theta_product(b, x)
            # theta sums the reduced bilateral series, or the dual one when the
            # direct sum cancels; neither route touches the product
            tv = sp.theta(b, x).value
            worst_sum = max(worst_sum, abs(tv - t) / abs(t))
            worst_fe = max(worst_fe, abs(tv - x * sp.theta(b, b * x).value) / abs(tv))
            # the unguarded direct sum is accurate up to its own cancellation factor
            cond = float(sp._theta_direct(math.log(b), cmath.log(x))[4])
            raw = abs(sp.theta_bilateral(b, x) - t) / abs(t)
            worst_raw = max(worst_raw, raw / (1e-11 * max(1.0, cond)))
    ok = worst_sum < 1e-11 and worst_fe < 1e-12 and worst_raw < 1
    report(1, "theta sum vs product, functional equation", ok,
           f"sum/product {worst_sum:.1e} (< 1e-11), x theta(px) {worst_fe:.1e} (< 1e-12), "
           f"unguarded sum error / (1e-11 cond) {worst_raw:.1e} (< 1)")
    assert ok


def test_c02_gamma_omega(report):
    r = rng(2)
    res = dict.fromkeys(("psi-omega", "A-psi", "omega", "qlog-omega", "qlog-psi"), 0.0)
    for _ in range(50):
        q = r.uniform(0.1, 0.9)
        lnq = math.log(q)
        x = complex(r.uniform(0.5, 3.0), r.uniform(-1.0, 1.0))
        m, n = int(r.integers(0, 6)), int(r.integers(0, 6))
        psi = cauchy_log_derivative(lambda z: sp.gamma_q(q, z).value, x)
        res["psi-omega"] = max(res["psi-omega"], abs(
            psi - (-lnq * sp.omega(math.inf, q ** x, q).value - math.log1p(-q))))
        psi1 = cauchy_log_derivative(lambda z: sp.gamma_q(q, z).value, 1.0)
        res["A-psi"] = max(res["A-psi"], abs(sp.const_A(q) + (psi1 + math.log1p(-q)) / lnq))
        y = rect(r, 0.2, 3.0)
        try:
            om = lambda k, z: sp.omega(k, z, q).value
            res["omega"] = max(res["omega"], abs(om(m + n, y) - om(m, y) - om(n, q ** m * y)),
                               abs(om(math.inf, y) - om(m, y) - om(math.inf, q ** m * y)))
            ell = sp.q_log(q, y).value
            res["qlog-omega"] = max(res["qlog-omega"], abs(
                ell + om(math.inf, y) - om(math.inf, q / y)))
        except PoleAt:
            pytest.fail(f"random sample hit a pole: q={q}, y={y}")
        s = complex(r.uniform(0.1, 0.9), r.uniform(-1.0, 1.0))
        rhs = (sp.psi_q(q, s).value - sp.psi_q(q, 1 - s).value) / lnq
        res["qlog-psi"] = max(res["qlog-psi"], abs(sp.q_log(q, q ** s).value - rhs))
    ok = max(res.values()) < 1e-9
    report(2, "q-Gamma / Omega / q-log suite", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in res.items()) + " (< 1e-9)")
    assert ok


def test_c03_q_euler(report):
    worst = 0.0
    count = 0
    for q in (0.3, 0.5, 0.7):
        ctx = e1.EulerQltContext.of(q)
        for rad in np.linspace(0.5, 5.0, 6):
            for arg in np.linspace(-math.pi, math.pi, 12, endpoint=False):
                x = cmath.rect(rad, arg)
                k, z = ctx.nearest_pole(x)
                if abs(x - z) < 0.05 * abs(z):
                    continue
                v = [e1.euler_q(ctx, x).value, e1.euler_q_heine(ctx, x).value,
                     e1.euler_q_infinity(ctx, x).value]
                worst = max(worst, abs(v[0] - v[1]), abs(v[0] - v[2]), abs(v[1] - v[2]))
                count += 1
    res_worst = 0.0
    for q in (0.3, 0.5, 0.7):
        ctx = e1.EulerQltContext.of(q)
        for k in (0, -1, -2):
            z0 = ctx.pole(k)
            res = e1.euler_q_residue(ctx, k)
            g = lambda h: h * e1.euler_q(ctx, z0 + h).value
            for t in (1, 1j, -1, -1j):
                # Richardson step removes the O(h) term of (x - x0) E_q(x)
                h = 1e-5 * abs(z0) * t
                res_worst = max(res_worst, abs(2 * g(h / 2) - g(h) - res))
    ok = worst < 1e-8 and res_worst < 1e-6
    report(3, "q-Euler recursion / Heine / infinity", ok,
           f"pairwise {worst:.1e} on {count} points (< 1e-8), residue {res_worst:.1e} (< 1e-6)")
    assert ok


def test_c04_confluence_lt1(report):
    ok = True
    parts = []
    for x in (1.0, 2 * cmath.exp(1j * math.pi / 4)):
        err = [row["error"] for row in e1.confluence_sweep_lt1(x, [0.9, 0.99, 0.999])]
        good = err[0] > err[1] > err[2] and err[2] < 5e-3
        ok &= good
        parts.append(f"x={x:.3g}: " + ", ".join(f"{e:.2e}" for e in err))
    report(4, "confluence q -> 1-", ok, "; ".join(parts) + " (decreasing, last < 5e-3)")
    assert ok


def test_c05_hypergeometric(report):
    r = rng(5)
    q = 0.5
    res = dict.fromkeys(("heine", "watson", "b=aq^m", "b=aq^m,c=aq^-k", "b=a,c=0"), 0.0)
    for _ in range(20):
        a, b, c, x = rect(r, 0.1, 0.9), rect(r, 0.1, 2.0), rect(r, 0.1, 2.0), rect(r, 0.1, 0.9)
        res["heine"] = max(res["heine"], hg.verify_heine(a, b, c, q, x))
        a, b = rect(r, 0.4, 0.9), rect(r, 0.4, 0.9)
        x = rect(r, 0.4, 0.9, -3.0, 3.0)
        c = 0.3 * r.uniform(0.2, 1.0) * abs(a * b * x) / q * cmath.exp(1j * r.uniform(-3, 3))
        res["watson"] = max(res["watson"], hg.verify_watson(a, b, c, q, x))
        m = int(r.integers(1, 4))
        a, x = rect(r, 0.4, 0.9), rect(r, 0.4, 0.9, -3.0, 3.0)
        c = 0.3 * r.uniform(0.2, 1.0) * abs(a * a * x) * q ** (m - 1) * cmath.exp(
            1j * r.uniform(-3, 3))
        res["b=aq^m"] = max(res["b=aq^m"], hg.verify_watson_degenerate(m, a, c, x, q))
        k, m = int(r.integers(0, 3)), int(r.integers(0, 3))
        x = rect(r, 0.4, 0.9, -3.0, 3.0)
        a = r.uniform(1.5, 3.0) * q ** (1 - k - m) / abs(x) * cmath.exp(1j * r.uniform(-3, 3))
        res["b=aq^m,c=aq^-k"] = max(res["b=aq^m,c=aq^-k"], hg.verify_watson_ca_qk(k, m, a, x, q))
        a, x = rect(r, 0.4, 0.9), rect(r, 0.4, 0.9, -3.0, 3.0)
        res["b=a,c=0"] = max(res["b=a,c=0"], hg.verify_watson_degenerate(0, a, 0.0, x, q))
    rows = e1.confluent_hypergeom_sweep(0.3, 0.7 + 0.2j, 0.1j, math.pi / 2, [0.9, 0.99])
    err = [row["error"] for row in rows]
    ok = max(res.values()) < 1e-8 and err[1] < err[0]
    report(5, "Heine, Watson and degenerations; 2F0 confluence", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in res.items())
           + f" (< 1e-8); 2F0 errors {err[0]:.2e} > {err[1]:.2e}")
    assert ok


def test_c06_q_factorial(report):
    worst = 0.0
    modes = [g1.RayMode(d) for d in (-1.5, 0.0, 2.0)]
    modes += [g1.SpiralMode(l) for l in (1.0, 1j, 0.6 * cmath.exp(2.5j))]
    for q in (1.5, 2.0, 3.0):
        for kernel in g1.Kernel:
            for mode in modes:
                spec = g1.QSumSpec(kernel, mode, QParam(q))
                for n in range(6):
                    worst = max(worst, g1.q_factorial_check(spec, n).residual)
    ok = worst < 1e-8
    report(6, "q-factorial integral representations", ok,
           f"max relative {worst:.1e} over 4 formulas x 3 q x 3 paths x n <= 5 (< 1e-8)")
    assert ok


def test_c07_identity_theorem(report):
    qp = QParam(2.0)
    worst_ray = worst_spiral = 0.0
    xs = [cmath.rect(0.3 + 0.6 * j, -2.0 + 1.0 * j) for j in range(5)]
    for i, x in enumerate(xs):
        for j in range(5):
            d = cmath.phase(x) + (j - 2) * 0.3
            lam = cmath.rect(0.5 + 0.3 * j, -2.4 + 1.2 * j)
            v = g1.euler_four_sums(qp, x, d, lam)
            worst_ray = max(worst_ray, abs(v["ray_eq"].value - v["ray_theta"].value))
            worst_spiral = max(worst_spiral, abs(v["spiral_eq"].value - v["spiral_theta"].value))
    ok = max(worst_ray, worst_spiral) < 1e-7
    report(7, "identity theorem on a 5x5 grid, q = 2", ok,
           f"ray {worst_ray:.1e}, spiral {worst_spiral:.1e} (< 1e-7)")
    assert ok


def test_c08_part_two_identities(report):
    res = dict.fromkeys(("stokes", "disc-cont", "moyenne", "spiral"), 0.0)
    r = rng(8)
    for q in (1.5, 2.0):
        qp = QParam(q)
        for arg in (-0.5, -math.pi / 2, -3.0, -5.5):
            x = SurfacePoint(r.uniform(0.3, 2.0), arg)
            res["stokes"] = max(res["stokes"], g1.stokes_jump(qp, x).residual,
                                g1.stokes_jump(qp, x, g1.Kernel.ThetaKernel).residual)
        for lam, x in ((1.0, 0.5), (1j, 0.8 - 0.3j), (0.6 + 0.6j, 1.2j), (-0.7 + 0.2j, 2.0)):
            res["disc-cont"] = max(res["disc-cont"], g1.disc_cont_difference(qp, lam, x).residual)
        for x in (0.7, 1.5j, 0.4 * cmath.exp(-2.5j)):
            res["moyenne"] = max(res["moyenne"], g1.average_over_spiral(qp, x).residual)
        res["moyenne"] = max(res["moyenne"], g1.average_over_spiral(
            qp, 0.7, a=cmath.exp(1j * math.pi / 6)).residual)
        xs = [cmath.rect(0.4 + 0.3 * j, 0.4 * j - 0.9) for j in range(5)]
        for _ in range(2):
            lam = -cmath.exp(1j * r.uniform(0.05, 0.2))
            mu = cmath.exp(1j * r.uniform(0.5, 1.0))
            rep = g1.spiral_compare(qp, lam, mu, xs)
            res["spiral"] = max(res["spiral"], rep.dispersion,
                                abs(rep.constant - g1.spiral_constant(qp)))
    ok = max(res.values()) < 1e-6
    report(8, "Stokes, discrete/continuous, averaging, spiral comparison", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in res.items()) + " (< 1e-6, q = 1.5, 2)")
    assert ok


def test_c09_tschakaloff(report):
    qp = QParam(2.0)
    sums = fe = 0.0
    for lam, d, x in ((1j, 1.0, 0.3), (0.8 * cmath.exp(2.5j), -1.2, 0.7 - 0.4j),
                      (1.5 * cmath.exp(0.4j), 2.0, 1.1j)):
        sums = max(sums, g1.tschakaloff_sums(qp, lam, d, x).residual)
        rep = lambda z: g1.tschakaloff_sums(qp, lam, d, z)
        for key in ("spiral_theta", "spiral_eq", "ray_theta", "ray_eq"):
            fe = max(fe, g1.tschakaloff_functional_residual(
                qp, lambda z: getattr(rep(z), key), x))
    mod = 0.0
    for n in (1, 2):
        rep = g1.modified_tschakaloff_suite(qp, n, 1j, math.pi / 2, 0.3)
        mod = max(mod, rep.spiral_residual, rep.ray_residual, rep.average_residual)
    ok = sums < 1e-8 and fe < 1e-8 and mod < 1e-6
    report(9, "Tschakaloff sums, closed forms, modified series", ok,
           f"sums/closed forms {sums:.1e} (< 1e-8), equation {fe:.1e} (< 1e-8), "
           f"modified n = 1, 2 {mod:.1e} (< 1e-6)")
    assert ok


def test_c10_confluence_gt1(report):
    rows = g1.confluence_sweep_gt1(1.0, [1.1, 1.01, 1.001], lam=1.0)
    ray = [row["ray_error"] for row in rows]
    spiral = [row["spiral_error"] for row in rows]
    ok = ray[0] > ray[1] > ray[2] and spiral[0] > spiral[1] > spiral[2]
    report(10, "confluence q -> 1+ at x = 1", ok,
           "ray " + ", ".join(f"{e:.2e}" for e in ray)
           + "; spiral " + ", ".join(f"{e:.2e}" for e in spiral) + " (strictly decreasing)")
    assert ok


def test_c11_cli(report, capsys):
    def call(*argv):
        code = cli.main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    n_list = len(call("verify", "--list")[1].splitlines())
    runs = [call("verify", "--target", t, "--seed", "3", "--samples", "3", "--no-timestamp")
            for t in ("heine", "theta", "q-factorial") for _ in range(2)]
    identical = all(runs[i][1] == runs[i + 1][1] for i in range(0, len(runs), 2))
    csv_runs = [call("sweep", "--target", "confluence-lt1", "--output", "csv")[1]
                for _ in range(2)]
    identical &= csv_runs[0] == csv_runs[1]
    codes = (runs[0][0],
             call("sweep", "--target", "confluence-lt1", "--q-grid", "0.999,0.9")[0],
             call("eval", "--target", "theta", "--x", "0")[0],
             call("verify", "--target", "unknown")[0])
    schema = json.loads(runs[0][1])["schema"]
    ok = n_list >= 12 and identical and codes == (0, 1, 1, 2) and schema == 1
    report(11, "CLI determinism and exit codes", ok,
           f"{n_list} verify targets (>= 12), byte-identical {identical}, "
           f"exit codes pass/fail/error/usage {codes}")
    assert ok
