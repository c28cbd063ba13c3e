import math

import numpy as np
import pytest

from nps.dirichlet import (DirichletProblem, boundary_values, green_identity_check, modal_solution,
                           point_source_density, poisson_integral, solve_dirichlet)
from nps.errors import ParameterError, PlacementError, TruncationError
from nps.geometry import Curve2D
from nps.kernels import richardson_zero
from nps.nystrom import assemble
from nps.symmetrizable import SymmetrizablePair, cyclic_coefficients, factorize

SMALL = Curve2D.ellipse(0.4, 0.2)


@pytest.fixture(scope="module")
def small_ops():
    return assemble(SMALL, 256, rescale=False)


@pytest.fixture(scope="module")
def small_spec(small_ops):
    return factorize(SymmetrizablePair.from_operators(small_ops))


def interior_points(count=20, seed=3):
    rng = np.random.default_rng(seed)
    r = 0.8 * np.sqrt(rng.uniform(size=count))
    th = rng.uniform(0, 2 * np.pi, count)
    return np.column_stack((0.4 * r * np.cos(th), 0.2 * r * np.sin(th)))


def test_harmonic_polynomial_example(small_ops):
    prob = DirichletProblem(SMALL, lambda x, y: x**2 - y**2, "interior", [[0.1, 0.05]])
    sol = solve_dirichlet(prob, small_ops)
    assert sol.values[0] == pytest.approx(0.0075, abs=1e-6)
    assert sol.path_agreement <= 1e-9


@pytest.mark.parametrize("func", [lambda x, y: x**2 - y**2, lambda x, y: x**3 - 3 * x * y**2 + y,
                                  lambda x, y: np.exp(x) * np.cos(y)])
def test_harmonic_data_reproduced(small_ops, func):
    pts = interior_points()
    sol = solve_dirichlet(DirichletProblem(SMALL, func, "interior", pts), small_ops)
    assert np.max(np.abs(sol.values - func(pts[:, 0], pts[:, 1]))) <= 1e-6


def test_rescaled_operators_use_user_coordinates(ellipse_ops):
    pts = interior_points() * 2.5  # interior of the unit-size ellipse (1, 0.5)
    func = lambda x, y: x**2 - y**2
    prob = DirichletProblem(Curve2D.ellipse(1.0, 0.5), func, "interior", pts)
    sol = solve_dirichlet(prob, ellipse_ops)
    assert np.max(np.abs(sol.values - func(pts[:, 0], pts[:, 1]))) <= 1e-6


def test_constant_and_zero_data(small_ops):
    pts = interior_points(8)
    one = solve_dirichlet(DirichletProblem(SMALL, lambda x, y: 1.0, "interior", pts), small_ops)
    assert np.max(np.abs(one.values - 1)) <= 1e-8
    zero = solve_dirichlet(DirichletProblem(SMALL, np.zeros(256), "interior", pts), small_ops)
    assert np.all(zero.values == 0.0)


def test_exterior_constant_data_on_circle():
    # the exterior problem in this representation is the log-capacity solution log|x| / log r
    r = 0.25
    curve = Curve2D.circle(r)
    ops = assemble(curve, 128, rescale=False)
    pts = np.array([[0.5, 0.0], [0.0, -1.0], [3.0, 4.0]])
    sol = solve_dirichlet(DirichletProblem(curve, lambda x, y: 1.0, "exterior", pts), ops)
    expected = np.log(np.linalg.norm(pts, axis=1)) / math.log(r)
    assert np.max(np.abs(sol.values - expected)) <= 1e-8


def test_linearity_and_maximum_principle(small_ops):
    pts = interior_points()
    f = lambda x, y: np.cos(3 * x) * y
    g = lambda x, y: x**2 - y**2
    uf = solve_dirichlet(DirichletProblem(SMALL, f, "interior", pts), small_ops).values
    ug = solve_dirichlet(DirichletProblem(SMALL, g, "interior", pts), small_ops).values
    uh = solve_dirichlet(DirichletProblem(SMALL, lambda x, y: 2 * f(x, y) - 3 * g(x, y),
                                          "interior", pts), small_ops).values
    assert np.max(np.abs(uh - (2 * uf - 3 * ug))) <= 1e-12
    data = small_ops.grid.sample(f)
    assert np.all(uf <= data.max() + 1e-6) and np.all(uf >= data.min() - 1e-6)


def test_harmonicity_flag(small_ops):
    prob = DirichletProblem(SMALL, lambda x, y: np.exp(x) * np.sin(y), "interior", [[0.05, 0.02]])
    sol = solve_dirichlet(prob, small_ops, check_harmonic=True)
    assert abs(sol.laplacian[0]) <= 1e-4


def test_placement_errors():
    with pytest.raises(PlacementError):
        DirichletProblem(SMALL, lambda x, y: x, "interior", [[1.0, 0.0]])
    with pytest.raises(PlacementError):
        DirichletProblem(SMALL, lambda x, y: x, "exterior", [[0.0, 0.0]])
    with pytest.raises(PlacementError):
        DirichletProblem(SMALL, lambda x, y: x, "interior", [[0.4, 0.0]])
    with pytest.raises(ParameterError):
        DirichletProblem(SMALL, lambda x, y: x, "inside", [[0.0, 0.0]])


def test_nonfinite_data_rejected(small_ops):
    prob = DirichletProblem(SMALL, lambda x, y: 1 / (x - x), "interior", [[0.0, 0.0]])
    with np.errstate(divide="ignore", invalid="ignore"), pytest.raises(ParameterError):
        boundary_values(prob, small_ops)


def test_modal_matches_direct(small_ops, small_spec):
    rng = np.random.default_rng(5)
    c = rng.standard_normal(4)
    f = lambda x, y: c[0] + c[1] * np.cos(5 * np.arctan2(y, x)) + c[2] * x + c[3] * np.sin(x * y * 20)
    pts = interior_points(10)
    res = modal_solution(DirichletProblem(SMALL, f, "interior", pts), small_spec, small_ops)
    assert res.max_difference <= 1e-6
    assert res.mode_residual <= 1e-8 * np.linalg.norm(small_spec.pair.A, 2) * 10


def test_modal_kernel_component(small_ops, small_spec):
    r = small_spec.rank
    if r == small_spec.pair.n:
        pytest.skip("no numerical kernel at this resolution")
    h = small_ops.grid.from_hat(small_spec.G[:, r])
    res = modal_solution(DirichletProblem(SMALL, h, "interior", interior_points(5)), small_spec, small_ops)
    assert res.max_difference <= 1e-6


def test_modal_truncation_error(small_ops, small_spec):
    prob = DirichletProblem(SMALL, lambda x, y: np.cos(7 * x), "interior", interior_points(3))
    with pytest.raises(TruncationError):
        modal_solution(prob, small_spec, small_ops, n_modes=3)


def test_top_mode_boundary_limit(small_ops, small_spec):
    grid = small_ops.grid
    g0 = grid.from_hat(small_spec.G[:, 0])
    i = 17
    eps = np.array([0.02, 0.01, 0.005, 0.0025])
    pts = grid.points[i] - eps[:, None] * grid.normals[i]
    vals = solve_dirichlet(DirichletProblem(SMALL, g0, "interior", pts), small_ops).values
    est, _ = richardson_zero(eps, vals)
    assert est == pytest.approx(g0[i], abs=1e-4 * np.max(np.abs(g0)))


def test_point_source_closed_form(circle_ops):
    r = 0.25
    z = np.array([2 * r, 0.0])
    q = point_source_density(circle_ops, z, [1.0, 0.0])
    x = circle_ops.grid.points
    d = z - x
    expected = -d[:, 0] / (2 * np.pi * np.sum(d * d, axis=1))
    assert np.max(np.abs(q - expected)) <= 1e-14
    with pytest.raises(PlacementError):
        point_source_density(circle_ops, [0.1, 0.0], [1.0, 0.0])
    with pytest.raises(ParameterError):
        point_source_density(circle_ops, z, [1.0, 1.0])


def test_point_source_cyclicity(small_ops, small_spec):
    grid = small_ops.grid
    q = point_source_density(small_ops, [0.45, 0.35], [0.6, 0.8])
    rep = cyclic_coefficients(small_spec, grid.to_hat(q), n_modes=20)
    assert rep.min_abs > 1e-12 and rep.cyclic
    q_axis = point_source_density(small_ops, [0.8, 0.0], [1.0, 0.0])
    rep_axis = cyclic_coefficients(small_spec, grid.to_hat(q_axis), n_modes=20)
    assert not rep_axis.cyclic


def test_poisson_integral_mean_value():
    assert poisson_integral(0.5, lambda x, y: 1 + x, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-14)


def test_green_identity_examples():
    rho = 0.5
    cos = lambda x, y: x / rho
    rep = green_identity_check(rho, [cos, lambda x, y: 1.0 + 0 * x], [[0.0, 0.0], [rho / 2, 0.0]])
    assert rep.ok
    assert rep.transform_values[0, 0] == pytest.approx(0.0, abs=1e-8)
    assert rep.transform_values[0, 1] == pytest.approx(0.5, abs=1e-8)
    assert np.allclose(rep.transform_values[1], 1.0, atol=1e-8)
    with pytest.raises(ParameterError):
        green_identity_check(0.7, [cos], [[0.0, 0.0]])


def test_green_identity_generic():
    funcs = [lambda x, y: np.exp(x) * np.sin(3 * y), lambda x, y: np.cos(x * y * 8)]
    pts = [[0.1, 0.1], [-0.2, 0.3], [0.0, -0.35]]
    assert green_identity_check(0.5, funcs, pts).max_residual <= 1e-7
