"""Acceptance criteria 1-13, each printing one PASS/FAIL line."""
import math

import numpy as np
import pytest

from nps.asymptotics import perturbed_identity_ratio_check, ratio_table, sharp_ratio_constants
from nps.checks import all_ok, run_checks
from nps.cli import main
from nps.counterexample import kernel_report, krein_example, norm_growth
from nps.dirichlet import DirichletProblem, green_identity_check, solve_dirichlet
from nps.geometry import Curve2D, SurfaceRev, willmore_inequality_check
from nps.nystrom import assemble, factorization_residual, plemelj_residual
from nps.symmetrizable import (SymmetrizablePair, finite_rank_truncate,
                               functional_calculus, resolvent_growth_check)
from nps.zeta_eta import (eta_function, heat_trace_residue, pairing_check,
                          zeta_determinant_sphere, zeta_S2)

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def report(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {number}: {detail}"
    return report


def test_criterion_01_plemelj_factorization(ellipse_ops, verdict):
    n = ellipse_ops.norms()
    p = plemelj_residual(ellipse_ops) / (n["S_hat"] * n["K_hat"])
    f = factorization_residual(ellipse_ops) / (n["S_hat"] * n["A_hat"])
    verdict(1, p <= 1e-9 and f <= 1e-9, f"plemelj {p:.2e}, factorization {f:.2e} (tol 1e-9)")


def test_criterion_02_circle_spectra(verdict):
    r, n = 0.25, 128
    ops = assemble(Curve2D.circle(r), n, rescale=False)
    k = np.sort(np.linalg.eigvals(ops.K_hat).real)[::-1]
    k_ref = np.zeros(n)
    k_ref[0] = 1.0
    ek = float(np.max(np.abs(k - k_ref)))
    s = np.sort(np.linalg.eigvalsh(ops.S_hat))[::-1]
    m = np.arange(1, n // 2)
    # the Nyquist mode m = n/2 appears once
    s_ref = np.sort(np.concatenate(([-r * math.log(r)], np.repeat(r / (2 * m), 2),
                                    [r / n])))[::-1]
    es = float(np.max(np.abs(s - s_ref)))
    verdict(2, ek <= 1e-11 and es <= 1e-10, f"K eigenvalues {ek:.2e} (tol 1e-11), "
                                            f"S eigenvalues {es:.2e} (tol 1e-10)")


def test_criterion_03_ellipse_spectrum(ellipse_ops, ellipse_spec, verdict):
    ref = np.array([1, 1 / 3, -1 / 3, 1 / 9, -1 / 9, 1 / 27, -1 / 27, 1 / 81, -1 / 81])
    err = float(np.max(np.abs(ellipse_spec.lam[:9] - ref)))
    ev = np.linalg.eigvals(ellipse_ops.Kstar_hat)
    rep = pairing_check(ev)
    eta_err = abs(eta_function(ev, 0.0) - 1.0)
    verdict(3, err <= 1e-8 and rep.ok and eta_err <= 1e-8,
            f"first 9 eigenvalues {err:.2e} (tol 1e-8), pairs {rep.pairs}, eta(0) error {eta_err:.2e}")


def test_criterion_04_dirichlet(verdict):
    curve = Curve2D.ellipse(0.4, 0.2)
    ops = assemble(curve, 256, rescale=False)
    rng = np.random.default_rng(11)
    rad = 0.85 * np.sqrt(rng.uniform(size=20))
    th = rng.uniform(0, 2 * np.pi, 20)
    pts = np.column_stack((0.4 * rad * np.cos(th), 0.2 * rad * np.sin(th)))
    func = lambda x, y: x**3 - 3 * x * y**2 + x**2 - y**2
    sol = solve_dirichlet(DirichletProblem(curve, func, "interior", pts), ops)
    err = float(np.max(np.abs(sol.values - func(pts[:, 0], pts[:, 1]))))
    g = green_identity_check(0.5, [lambda x, y: x / 0.5, lambda x, y: np.exp(x) * np.cos(2 * y)],
                             [[0.0, 0.0], [0.25, 0.0], [-0.1, 0.3]])
    verdict(4, err <= 1e-6 and g.max_residual <= 1e-7,
            f"20-point error {err:.2e} (tol 1e-6), Poisson residual {g.max_residual:.2e} (tol 1e-7)")


def test_criterion_05_resolvent_growth(ellipse_spec, verdict):
    alphas = []
    for v in ellipse_spec.nonzero:
        if all(abs(v - w) > 1e-6 for w in alphas):
            alphas.append(float(v))
        if len(alphas) == 5:
            break
    reps = [resolvent_growth_check(ellipse_spec, a) for a in alphas]
    radii = min(len({round(abs(r.z - r.alpha), 15) for r in rep.rows}) for rep in reps)
    ok = len(reps) >= 5 and radii >= 4 and all(rep.ok and not rep.skipped for rep in reps)
    verdict(5, ok, f"{len(reps)} eigenvalues x {radii} radii, "
                   f"{sum(len(r.rows) for r in reps)} (alpha, z) pairs, all within the sandwich: {ok}")


def test_criterion_06_functional_calculus(ellipse_spec, verdict):
    rng = np.random.default_rng(6)
    worst = max(functional_calculus(ellipse_spec, rng.standard_normal(4)).horner_residual
                for _ in range(10))
    tests = [(np.exp, np.exp), (np.sin, np.cos),
             (lambda t: t * np.exp(-t**2), lambda t: (1 - 2 * t**2) * np.exp(-t**2)),
             (lambda t: 1 / (2 - t), lambda t: 1 / (2 - t) ** 2),
             (lambda t: np.cos(3 * t) * t, lambda t: np.cos(3 * t) - 3 * t * np.sin(3 * t))]
    bounds = [functional_calculus(ellipse_spec, f, dphi=df) for f, df in tests]
    ok_b = all(b.upper_ok and b.lower_ok for b in bounds)
    verdict(6, worst <= 1e-10 and ok_b,
            f"10 cubics worst {worst:.2e} (tol 1e-10), upper and lower bounds on 5 functions: {ok_b}")


def test_criterion_07_finite_rank(ellipse_ops128, verdict):
    pair = SymmetrizablePair.from_operators(ellipse_ops128)
    checks = [finite_rank_truncate(pair, N)[1] for N in range(pair.n + 1)]
    bad = [N for N, c in enumerate(checks) if not c.ok]
    verdict(7, not bad, f"{len(checks)} truncations, violations {bad[:5]}")


def test_criterion_08_counterexample(verdict):
    worst, dims = 0.0, True
    for N in (2, 3, 16):
        rep = kernel_report(krein_example(np.linspace(1.0, 0.5, N)))
        worst = max(worst, max(e.residual for e in rep.entries.values()))
        dims = dims and all(e.dimension == 1 for e in rep.entries.values())
    _, ratios = norm_growth((4, 16, 64))
    ok = worst <= 1e-13 and dims and bool(np.all(ratios >= 1.9))
    verdict(8, ok, f"kernel residual {worst:.2e} (tol 1e-13), norm ratios "
                   f"{', '.join(f'{r:.4f}' for r in ratios)} (need >= 1.9)")


def test_criterion_09_sphere_zeta(verdict):
    z0 = abs(zeta_S2(0.0) - 1 / 12)
    z1 = abs(zeta_S2(1.0))
    fit = heat_trace_residue()
    res = abs(fit.a_m2 - 0.5)
    det = zeta_determinant_sphere()
    stated = 2 ** (-1 / 6) * math.exp(1 / 12) / det.glaisher
    d_err = abs(det.det - stated)
    ok = z0 <= 1e-12 and z1 <= 1e-12 and res <= 1e-4 and d_err <= 1e-8
    verdict(9, ok, f"zeta(0) {z0:.1e}, zeta(1) {z1:.1e}, a_-2 {fit.a_m2:.8f}, "
                   f"det {det.det:.12f} vs 2^(-1/6)e^(1/12)/G = {stated:.12f} (diff {d_err:.2e})")


def test_criterion_10_sharp_ratio(verdict):
    sc = sharp_ratio_constants(SurfaceRev.sphere())
    c_err = max(abs(sc.c_S - 0.5), abs(sc.c_K - 0.5))
    t = sc.table_check
    spheroids = [SurfaceRev.spheroid(1.0, c) for c in (0.5, 0.7, 0.9, 1.3, 1.6, 2.0)]
    will = [willmore_inequality_check(s).ok for s in spheroids]
    ok = c_err <= 1e-10 and t["ok"] and all(will)
    verdict(10, ok, f"constants error {c_err:.1e}, sigma_n sqrt(n) at n=2000 "
                    f"{t['sigma_S_sqrt_n']:.5f}, Willmore on 6 spheroids {sum(will)}/6")


def test_criterion_11_synthetic_ratio(verdict):
    rep = perturbed_identity_ratio_check(sizes=(400,), B_spec="geometric")
    err = rep.error(400)
    verdict(11, err <= 1e-3, f"tail ratio error at N=400 {err:.2e} (tol 1e-3)")


def test_criterion_12_planar_degeneracy(ellipse_ops, verdict):
    t = ratio_table(ellipse_ops, 30)
    r5, r30 = t.details["ratio_5"], t.details["ratio_30"]
    verdict(12, r30 <= 1e-4 * r5, f"sigma ratio n=5 {r5:.3e}, n=30 {r30:.3e}, quotient {r30 / r5:.2e}")


def test_criterion_13_property_suite(tmp_path, verdict):
    results = run_checks(Curve2D.ellipse(1.0, 0.5), 256)
    failed = [r.name for r in results if not r.ok]
    code = main(["check", "--out", str(tmp_path / "check.json")])
    verdict(13, all_ok(results) and code == 0,
            f"{len(results)} invariant checks, failed {failed}, check exit code {code}")
