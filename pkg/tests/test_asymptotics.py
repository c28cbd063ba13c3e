import numpy as np
import pytest

from nps.asymptotics import (counting_ratio, perturbation, perturbed_identity_ratio_check,
                             ratio_table, sharp_ratio_constants, sphere_table_check,
                             tail_ratio_error)
from nps.errors import DomainError, ParameterError
from nps.geometry import Curve2D, SurfaceRev
from nps.symmetrizable import SymmetrizablePair
from nps.zeta_eta import SphereSpectrum


def test_sphere_ratios_exactly_one():
    t = ratio_table(SphereSpectrum(10), 50)
    assert t.kind == "sphere" and t.verdict
    assert np.all(t.column("ratio_mu") == 1.0) and np.all(t.column("ratio_sigma") == 1.0)


def test_row_monotonicity_and_reciprocals(ellipse_ops):
    for src in (SphereSpectrum(8), ellipse_ops):
        t = ratio_table(src, 30)
        assert np.all(np.diff(t.column("mu_S")) >= 0)
        assert np.all(np.diff(t.column("sigma_S")) <= 0)
        assert np.all(np.diff(t.column("sigma_K")) <= 0)


def test_planar_ratio_collapses(ellipse_ops):
    t = ratio_table(ellipse_ops, 30)
    assert t.kind == "planar" and t.verdict
    assert t.details["ratio_30"] <= 1e-4 * t.details["ratio_5"]


def test_synthetic_rank3_example():
    N = 200
    rng = np.random.default_rng(0)
    V = np.linalg.qr(rng.standard_normal((N, 3)))[0]
    A = np.eye(N) + V @ np.diag([0.5, -0.3, 0.2]) @ V.T
    S = np.diag(1.0 / np.arange(1, N + 1))
    t = ratio_table(SymmetrizablePair(S, A), N, kappa=(1.0, 1.0), eps=0.05, n_from=50)
    assert t.kind == "synthetic" and t.verdict
    lam_K = np.sort(np.abs(np.linalg.eigvals(S @ A)))[::-1]
    assert np.allclose(t.column("mu_K") * lam_K, 1.0, atol=1e-12)


def test_truncation_warning():
    with pytest.warns(RuntimeWarning, match="resolvable"):
        t = ratio_table(SphereSpectrum(2), 50)
    assert len(t.rows) == 9 and t.warnings
    with pytest.raises(ParameterError):
        ratio_table(SphereSpectrum(2), 0)
    with pytest.raises(ParameterError):
        ratio_table(np.eye(3), 2)


def test_csv_rows():
    head, body = ratio_table(SphereSpectrum(3), 5).csv_rows()
    assert head[0] == "n" and head[-1] == "verdict" and len(body) == 5


def test_zero_perturbation_exact():
    s = 1.0 / np.arange(1, 101)
    err, _, _ = tail_ratio_error(perturbation(100, "zero"), s)
    assert err == 0.0


def test_rank1_and_geometric_examples():
    s = 1.0 / np.arange(1, 401)
    assert tail_ratio_error(perturbation(400, "rank1"), s)[0] <= 0.02
    assert tail_ratio_error(perturbation(400, "geometric"), s)[0] <= 1e-3


def test_singular_perturbation_rejected():
    with pytest.raises(DomainError):
        tail_ratio_error(perturbation(20, [-1.0]), 1.0 / np.arange(1, 21))
    with pytest.raises(ParameterError):
        perturbation(10, "cubic")


def test_perturbed_identity_report():
    rep = perturbed_identity_ratio_check()
    assert rep.error(400) <= 1e-3
    assert rep.monotone
    for N, c in rep.counting_ratio.items():
        assert abs(c - 1) <= 0.05, N
    assert set(rep.to_dict()) >= {"tail_errors", "nested_errors", "monotone"}


def test_counting_ratio_identity():
    s = 1.0 / np.arange(1, 51)
    assert counting_ratio(s, s, 25) == 1.0


def test_sphere_table_constants():
    t = sphere_table_check(2000)
    assert abs(t["sigma_S_sqrt_n"] - 0.5) <= 0.02 * 0.5


def test_sharp_constants_sphere():
    sc = sharp_ratio_constants(SurfaceRev.sphere())
    assert sc.c_S == pytest.approx(0.5, abs=1e-10) and sc.c_K == pytest.approx(0.5, abs=1e-10)
    assert sc.c_gamma == pytest.approx(1.0, abs=1e-10)
    assert sc.table_check["ok"]


def test_sharp_constants_spheroid_identity():
    sc = sharp_ratio_constants(SurfaceRev.spheroid(1.0, 2.0))
    assert sc.c_gamma == pytest.approx(sc.c_gamma_direct, abs=1e-10)
    assert sc.table_check is None
    with pytest.raises(ParameterError):
        sharp_ratio_constants(Curve2D.circle())
