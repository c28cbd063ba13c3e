"""Dirichlet problems through the layer-potential representation.

With ``a = A f`` the function ``u = -S_a - 2 D_f`` solves the interior
problem and ``u = S_a + 2 D_f`` the exterior one.  Boundary data and
evaluation points are given in the coordinates of the user's curve; when
the operators were assembled on a rescaled copy the data are transported
accordingly, which leaves harmonic extensions unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError, PlacementError, TruncationError
from .geometry import Curve2D, winding_number
from .kernels import eval_potentials, laplacian_fd
from .nystrom import assemble

SIDES = ("interior", "exterior")


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    """Boundary data ``f`` (callable of ``(x, y)`` or nodal values), side and targets."""

    curve: Curve2D
    data: object
    side: str = "interior"
    points: np.ndarray = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise ParameterError(f"side must be one of {SIDES}")
        pts = np.zeros((0, 2)) if self.points is None else np.atleast_2d(np.asarray(self.points, float))
        if pts.shape[1] != 2 or not np.all(np.isfinite(pts)):
            raise ParameterError("evaluation points must be finite 2-vectors")
        object.__setattr__(self, "points", pts)
        if len(pts):
            check_side(self.curve, pts, self.side)


def check_side(curve, points, side, min_dist=1e-10):
    t = 2 * np.pi * np.arange(4096) / 4096
    x = curve.derivatives(t)[0]
    d = np.min(np.linalg.norm(points[:, None, :] - x[None, :, :], axis=-1), axis=1)
    if np.any(d < min_dist):
        raise PlacementError("evaluation point lies on the boundary")
    wn = winding_number(curve, points)
    want = 1 if side == "interior" else 0
    bad = np.flatnonzero(np.abs(wn) != want)
    if bad.size:
        raise PlacementError(f"{bad.size} point(s) not on the {side} side, first {points[bad[0]]}")


def boundary_values(problem, ops):
    """Data at the grid nodes, in the user's coordinates."""
    grid = ops.grid
    if callable(problem.data):
        x = grid.points / ops.scale_factor
        f = np.asarray(problem.data(x[:, 0], x[:, 1]), dtype=float) * np.ones(grid.n)
    else:
        f = np.asarray(problem.data, dtype=float)
        if f.shape != (grid.n,):
            raise ParameterError(f"nodal data must have length {grid.n}")
    if not np.all(np.isfinite(f)):
        raise ParameterError("boundary data must be finite at every node")
    return f


@dataclass(frozen=True)
class DirichletSolution:
    points: np.ndarray
    values: np.ndarray
    density: np.ndarray
    path_agreement: float
    laplacian: np.ndarray | None = None

    def to_dict(self):
        d = {"points": self.points.tolist(), "values": self.values.tolist(),
             "path_agreement": self.path_agreement}
        if self.laplacian is not None:
            d["laplacian"] = self.laplacian.tolist()
        return d


def _combine(ops, a_nodal, f_nodal, points, side):
    ps = eval_potentials(ops.grid, a_nodal, points)
    pd = eval_potentials(ops.grid, f_nodal, points)
    sgn = -1.0 if side == "interior" else 1.0
    return sgn * (ps.single + 2 * pd.double)


def solve_dirichlet(problem, ops=None, n=256, check_harmonic=False):
    """Values of the harmonic extension of the data at ``problem.points``."""
    if ops is None:
        ops = assemble(problem.curve, n)
    f = boundary_values(problem, ops)
    fh = ops.grid.to_hat(f)
    ah = ops.A_hat @ fh
    ah_solve = ops.solve_S(ops.K_hat @ fh)
    agree = float(np.linalg.norm(ah - ah_solve) / max(np.linalg.norm(ah_solve), 1e-300))
    a = ops.grid.from_hat(ah)
    pts = problem.points * ops.scale_factor
    vals = _combine(ops, a, f, pts, problem.side) if len(pts) else np.zeros(0)
    lap = None
    if check_harmonic and len(pts):
        sgn = -1.0 if problem.side == "interior" else 1.0
        lap = np.array([sgn * (ls + 2 * ld) for ls, ld in
                        (_laplacians(ops, a, f, p) for p in pts)])
    return DirichletSolution(problem.points, vals, a, agree, lap)


def _laplacians(ops, a, f, p):
    ls, _ = laplacian_fd(ops.grid, a, p)
    _, ld = laplacian_fd(ops.grid, f, p)
    return ls, ld


@dataclass(frozen=True)
class ModalSolution:
    values: np.ndarray
    direct: np.ndarray
    max_difference: float
    mode_residual: float
    coefficients: np.ndarray
    kernel_norm: float


def modal_solution(problem, spec, ops, n_modes=None, trunc_tol=1e-6):
    """Interior solution assembled from the eigenmodes of ``K``.

    The data are split as ``f = h + sum c_j g_j`` with ``h`` in the span of
    the numerical kernel; then ``u = -2 D_h - sum c_j (lambda_j S_{f_j} + 2 D_{g_j})``.
    """
    if problem.side != "interior":
        raise ParameterError("modal solution is implemented for the interior problem")
    f = boundary_values(problem, ops)
    fh = ops.grid.to_hat(f)
    c = spec.Phi.T @ (spec.sqrtS_inv @ fh)
    r = spec.rank
    m = r if n_modes is None else min(n_modes, r)
    tail = float(np.linalg.norm(spec.G[:, m:r] @ c[m:r]))
    if tail > trunc_tol * max(np.linalg.norm(fh), 1e-300):
        raise TruncationError(f"coefficient tail {tail:.3e} above tolerance")
    h = spec.G[:, r:] @ c[r:]
    g_part = spec.G[:, :m] @ c[:m]
    a_modal = spec.F[:, :m] @ (spec.lam[:m] * c[:m])
    A = spec.pair.A
    mode_res = float(np.linalg.norm(A @ spec.G[:, :m] - spec.F[:, :m] * spec.lam[:m], 2))
    scale = float(np.linalg.norm(A, 2) * np.linalg.norm(spec.G[:, :m], 2))
    if mode_res > 1e-8 * scale:
        raise ConsistencyError(f"mode identity residual {mode_res:.3e} too large")
    pts = problem.points * ops.scale_factor
    grid = ops.grid
    ps = eval_potentials(grid, grid.from_hat(a_modal), pts)
    pd = eval_potentials(grid, grid.from_hat(g_part + h), pts)
    vals = -ps.single - 2 * pd.double
    direct = solve_dirichlet(problem, ops).values
    diff = float(np.max(np.abs(vals - direct), initial=0.0))
    if diff > 1e-6:
        raise ConsistencyError(f"modal and direct solutions differ by {diff:.3e}")
    return ModalSolution(vals, direct, diff, mode_res, c, float(np.linalg.norm(h)))


def point_source_density(grid, z, a):
    """Nodal values of ``q_z(x) = a . grad_z E(z - x) = -a.(z - x) / (2 pi |z - x|^2)``."""
    grid = getattr(grid, "grid", grid)
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    if abs(np.linalg.norm(a) - 1.0) > 1e-12:
        raise ParameterError("direction must be a unit vector")
    pz = z[None, :]
    try:
        check_side(grid.curve, pz, "exterior")
    except PlacementError as exc:
        raise PlacementError(f"source point must lie strictly outside the curve: {exc}") from None
    d = z[None, :] - grid.points
    return -(d @ a) / (2 * np.pi * np.einsum("ij,ij->i", d, d))


@dataclass(frozen=True)
class GreenReport:
    residuals: np.ndarray
    max_residual: float
    transform_values: np.ndarray
    poisson_values: np.ndarray

    @property
    def ok(self):
        return self.max_residual <= 1e-7


def poisson_integral(rho, func, z, m=4096):
    """``int P(z, zeta) f(zeta) dsigma`` on the circle of radius ``rho``."""
    th = 2 * np.pi * np.arange(m) / m
    zeta = rho * np.column_stack((np.cos(th), np.sin(th)))
    fz = np.asarray(func(zeta[:, 0], zeta[:, 1]), dtype=float) * np.ones(m)
    z = np.asarray(z, dtype=float)
    ker = (rho**2 - z @ z) / (2 * np.pi * rho * np.sum((zeta - z) ** 2, axis=1))
    return float(np.sum(ker * fz) * rho * 2 * np.pi / m)


def green_identity_check(rho, funcs, points, n=128):
    """Compare the layer-potential solution on a disk with the Poisson integral."""
    if not 0 < rho <= 0.5:
        raise ParameterError("disk radius must lie in (0, 1/2]")
    curve = Curve2D.circle(rho)
    ops = assemble(curve, n, rescale=False)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tv, pv = [], []
    for func in funcs:
        sol = solve_dirichlet(DirichletProblem(curve, func, "interior", pts), ops)
        tv.append(sol.values)
        pv.append([poisson_integral(rho, func, p) for p in pts])
    tv, pv = np.array(tv), np.array(pv)
    res = np.abs(tv - pv)
    return GreenReport(res, float(res.max(initial=0.0)), tv, pv)
