import math

import numpy as np
import pytest

from nps.errors import ParameterError, PositivityError
from nps.geometry import Curve2D
from nps.nystrom import (assemble, dtn_matrix, dump_matrices_csv, eigenvalues_sorted,
                         factorization_residual, kress_weights, plemelj_residual)


def test_kress_weights_integrate_log_kernel():
    # int_0^{2pi} log(4 sin^2((t - s)/2)) cos(m s) ds = -2 pi cos(m t) / m for m >= 1, 0 for m = 0
    n = 64
    r = kress_weights(n)
    s = 2 * np.pi * np.arange(n) / n
    assert np.sum(r) == pytest.approx(0.0, abs=1e-13)
    for m in (1, 3, 10):
        assert np.dot(r, np.cos(m * s)) == pytest.approx(-2 * np.pi / m, abs=1e-12)


def test_circle_spectra(circle_ops):
    r, n = 0.25, 128
    kev = np.sort(np.linalg.eigvals(circle_ops.K_hat).real)[::-1]
    assert abs(kev[0] - 1) <= 1e-11 and np.max(np.abs(kev[1:])) <= 1e-11
    sev = np.sort(np.linalg.eigvalsh(circle_ops.S_hat))[::-1]
    expected = [-r * math.log(r)] + [r / (2 * m) for m in range(1, n // 2) for _ in (0, 1)] + [r / n]
    assert np.max(np.abs(sev - np.sort(expected)[::-1])) <= 1e-10


def test_ellipse_np_spectrum(ellipse_ops):
    lam = eigenvalues_sorted(ellipse_ops.Kstar_hat)
    assert np.max(np.abs(lam.imag)) <= 1e-9
    top = np.sort(lam.real[:9])[::-1]
    expected = np.sort([1, 1 / 3, -1 / 3, 1 / 9, -1 / 9, 1 / 27, -1 / 27, 1 / 81, -1 / 81])[::-1]
    assert np.max(np.abs(top - expected)) <= 1e-8
    assert np.all(lam.real <= 1 + 1e-12) and np.all(lam.real > -1)


def test_self_convergence():
    # 9 = the eigenvalue 1 and four complete +- pairs
    a = eigenvalues_sorted(assemble(Curve2D.ellipse(1, 0.5), 256).K_hat).real[:9]
    b = eigenvalues_sorted(assemble(Curve2D.ellipse(1, 0.5), 512).K_hat).real[:9]
    assert np.max(np.abs(np.sort(a) - np.sort(b))) < 1e-8


def test_gauss_identity_discrete(kite_ops, ellipse_ops):
    for ops in (kite_ops, ellipse_ops):
        w = ops.grid.sqrtw
        assert np.max(np.abs(ops.K_hat @ w - w)) <= 1e-10


def test_plemelj_and_factorization(ellipse_ops, ellipse_ops128, circle_ops):
    for ops, tol in ((ellipse_ops, 1e-9), (ellipse_ops128, 1e-9), (circle_ops, 1e-12)):
        nS = np.linalg.norm(ops.S_hat, 2)
        nK = np.linalg.norm(ops.K_hat, 2)
        nA = np.linalg.norm(ops.A_hat, 2)
        assert plemelj_residual(ops) <= tol * nS * nK
        assert factorization_residual(ops) <= 1e-9 * nS * nA


def test_plemelj_convergence_on_kite():
    with pytest.warns(RuntimeWarning, match="Plemelj residual"):
        r64 = plemelj_residual(assemble(Curve2D.kite(), 64))
    r128 = plemelj_residual(assemble(Curve2D.kite(), 128))
    assert r128 <= r64 / 100


def test_rescaling_recorded_and_spectrum_invariant():
    a = assemble(Curve2D.ellipse(1, 0.5), 128)
    b = assemble(Curve2D.ellipse(0.5, 0.25), 128)
    assert a.scale_factor == pytest.approx(0.25) and b.scale_factor == pytest.approx(0.5)
    assert np.allclose(a.K_hat, b.K_hat, atol=1e-13)


def test_positivity_error_without_rescale():
    with pytest.raises(PositivityError, match="rescale"):
        assemble(Curve2D.circle(1.5), 64, rescale=False)


def test_grid_size_validation():
    with pytest.raises(ParameterError):
        assemble(Curve2D.circle(0.25), 63)
    with pytest.raises(ParameterError):
        assemble(Curve2D.circle(0.25), 16)


def test_dtn_on_circle(circle_ops):
    r = 0.25
    dtn = dtn_matrix(circle_ops)
    t = circle_ops.grid.t
    for m in (0, 1, 2, 5):
        v = circle_ops.grid.to_hat(np.cos(m * t))
        assert np.allclose(dtn.matrix @ v, (m / r) * v, atol=1e-8 * max(1, m / r))
    assert dtn.residual <= 1e-9 * np.linalg.norm(circle_ops.S_inv, 2)


def test_dtn_two_forms(ellipse_ops):
    assert dtn_matrix(ellipse_ops).relative_residual <= 1e-9


def test_adjoint_singular_values_decay_fast(ellipse_ops):
    # geometric decay of the singular values of K* (rate 1/3 per +- pair on this ellipse)
    sv = np.linalg.svd(ellipse_ops.Kstar_hat, compute_uv=False)
    assert sv[19] / sv[4] <= 1e-6


def test_adjoint_singular_values_geometric_rate(ellipse_ops):
    sv = np.linalg.svd(ellipse_ops.Kstar_hat, compute_uv=False)
    rate = (sv[21] / sv[1]) ** (1 / 10)
    assert rate == pytest.approx(1 / 3, rel=1e-2)


def test_dump_matrices(tmp_path, circle_ops):
    paths = dump_matrices_csv(circle_ops, tmp_path)
    assert len(paths) == 4
    back = np.loadtxt(paths[0], delimiter=",")
    assert np.array_equal(back, circle_ops.S_hat)
