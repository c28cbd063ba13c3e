"""Nystrom discretization of the layer potential operators on planar curves.

All matrices live in weight-symmetrized coordinates: a nodal vector ``f``
is represented by ``sqrt(w) * f`` so that the discrete L2 inner product is
the Euclidean one and L2 adjoints become transposes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ParameterError, PositivityError
from .geometry import rescale_for_positivity

PLEMELJ_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    curve: object
    n: int
    t: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    speed: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, curve, n):
        if n % 2 or n < 4:
            raise ParameterError(f"grid size must be even and >= 4, got {n}")
        t = 2 * np.pi * np.arange(n) / n
        x, tau, nu, kappa, speed = curve.frame(t)
        return cls(curve, n, t, x, tau, nu, kappa, speed, speed * 2 * np.pi / n)

    @property
    def sqrtw(self):
        return np.sqrt(self.weights)

    def to_hat(self, f):
        """Nodal values -> weighted coordinates (works on arrays of columns too)."""
        f = np.asarray(f)
        return f * (self.sqrtw if f.ndim == 1 else self.sqrtw[:, None])

    def from_hat(self, fh):
        fh = np.asarray(fh)
        return fh / (self.sqrtw if fh.ndim == 1 else self.sqrtw[:, None])

    def sample(self, func):
        """Evaluate ``func(x, y)`` at the nodes."""
        return np.asarray(func(self.points[:, 0], self.points[:, 1]), dtype=float) \
            * np.ones(self.n)


def kress_weights(n):
    """Trigonometric product weights for the log(4 sin^2((t-s)/2)) singularity.

    Returns ``r`` with ``R_ij = r[(i - j) % n]``.
    """
    half = n // 2
    tau = 2 * np.pi * np.arange(n) / n
    m = np.arange(1, half)
    r = (np.cos(np.outer(tau, m)) / m).sum(axis=1) + np.cos(half * tau) / n
    return -(4 * np.pi / n) * r


def double_layer_kernel(grid):
    """Kernel ``k(x_i, y_j) = <y_j - x_i, n_j> / (2 pi |x_i - y_j|^2)``,
    with the removable diagonal value ``kappa_i / (4 pi)``."""
    x, nu = grid.points, grid.normals
    d = x[None, :, :] - x[:, None, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    np.fill_diagonal(r2, 1.0)
    k = np.einsum("ijk,jk->ij", d, nu) / (2 * np.pi * r2)
    np.fill_diagonal(k, grid.curvature / (4 * np.pi))
    return k


def single_layer_kernel(grid):
    """Symmetric matrix ``T`` with ``S_nodal = T @ diag(w)`` (Kress splitting)."""
    n = grid.n
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    R = kress_weights(n)[idx]
    x = grid.points
    d = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    s2 = 4 * np.sin(0.5 * (grid.t[:, None] - grid.t[None, :])) ** 2
    np.fill_diagonal(s2, 1.0)
    np.fill_diagonal(r2, 1.0)
    smooth = -np.log(r2 / s2) / (4 * np.pi)
    np.fill_diagonal(smooth, -np.log(grid.speed**2) / (4 * np.pi))
    T = -R * (n / (2 * np.pi)) / (4 * np.pi) + smooth
    return 0.5 * (T + T.T)


@dataclass(frozen=True, eq=False)
class DiscretizedOperators:
    grid: BoundaryGrid
    S_hat: np.ndarray
    K_hat: np.ndarray
    Kstar_hat: np.ndarray
    A_hat: np.ndarray
    scale_factor: float = 1.0
    A_asymmetry: float = 0.0
    _chol: tuple = field(default=None, repr=False)

    @property
    def n(self):
        return self.grid.n

    @property
    def curve(self):
        return self.grid.curve

    def solve_S(self, b):
        return cho_solve(self._chol, b)

    @cached_property
    def S_inv(self):
        return self.solve_S(np.eye(self.n))

    def norms(self):
        return {name: float(np.linalg.norm(getattr(self, name), 2))
                for name in ("S_hat", "K_hat", "A_hat")}


def assemble(curve, n=256, rescale=True, plemelj_tol=PLEMELJ_TOL):
    """Assemble the weighted-symmetrized S, K, K* and the factor A on ``curve``.

    The curve is first shrunk to diameter 1/2 (unless ``rescale`` is false)
    which makes the single layer matrix positive definite.
    """
    if n % 2 or n < 32:
        raise ParameterError(f"n must be even and >= 32, got {n}")
    factor = 1.0
    if rescale:
        curve, factor = rescale_for_positivity(curve)
    grid = BoundaryGrid.build(curve, n)
    sw = grid.sqrtw
    S_hat = sw[:, None] * single_layer_kernel(grid) * sw[None, :]
    K_hat = sw[:, None] * (2 * double_layer_kernel(grid)) * sw[None, :]
    Kstar_hat = K_hat.T.copy()
    try:
        chol = cho_factor(S_hat, lower=True)
    except np.linalg.LinAlgError:
        raise PositivityError(
            "single layer matrix is not positive definite; rescale the curve "
            "to diameter <= 1/2 (rescale=True)") from None
    if np.min(np.diag(chol[0])) <= 0:
        raise PositivityError("single layer matrix is not positive definite")
    A_raw = cho_solve(chol, K_hat)
    asym = float(np.linalg.norm(A_raw - A_raw.T, 2) / max(np.linalg.norm(A_raw, 2), 1e-300))
    A_hat = 0.5 * (A_raw + A_raw.T)
    ops = DiscretizedOperators(grid, S_hat, K_hat, Kstar_hat, A_hat, factor, asym, chol)
    res = plemelj_residual(ops)
    nS, nK = np.linalg.norm(S_hat, 2), np.linalg.norm(K_hat, 2)
    if res > plemelj_tol * nS * nK:
        warnings.warn(f"Plemelj residual {res:.3e} exceeds {plemelj_tol:.0e}*|S||K| "
                      f"({plemelj_tol * nS * nK:.3e}); refine the grid", RuntimeWarning,
                      stacklevel=2)
    return ops


def plemelj_residual(ops):
    """Spectral norm of ``S K* - K S``."""
    return float(np.linalg.norm(ops.S_hat @ ops.Kstar_hat - ops.K_hat @ ops.S_hat, 2))


def factorization_residual(ops):
    """Spectral norm of ``K - S A``."""
    return float(np.linalg.norm(ops.K_hat - ops.S_hat @ ops.A_hat, 2))


@dataclass(frozen=True)
class DtN:
    matrix: np.ndarray
    residual: float
    relative_residual: float


def dtn_matrix(ops):
    """Dirichlet-to-Neumann matrix ``(I - K*) S^{-1} / 2``.

    The residual compares against the second form ``2 Lambda = S^{-1} - A``.
    """
    n = ops.n
    # Lambda^T = S^{-1} (I - K) / 2 since S is symmetric and (K*)^T = K
    lam = 0.5 * ops.solve_S(np.eye(n) - ops.K_hat).T
    other = ops.S_inv - ops.A_hat
    res = float(np.linalg.norm(2 * lam - other, 2))
    return DtN(lam, res, res / float(np.linalg.norm(ops.S_inv, 2)))


def eigenvalues_sorted(M):
    """Eigenvalues of a general real matrix, sorted by decreasing modulus."""
    ev = np.linalg.eigvals(M)
    return ev[np.argsort(-np.abs(ev), kind="stable")]


def dump_matrices_csv(ops, directory):
    """Write S, K, K*, A (weighted coordinates) as CSV with 17 significant digits."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in ("S_hat", "K_hat", "Kstar_hat", "A_hat"):
        path = os.path.join(directory, f"{name}.csv")
        np.savetxt(path, getattr(ops, name), delimiter=",", fmt="%.17g")
        paths.append(path)
    return paths


def grid_summary(ops):
    g = ops.grid
    return {"n": g.n, "length": float(np.sum(g.weights)), "scale_factor": ops.scale_factor,
            "diameter_bound": 0.5, "min_speed": float(np.min(g.speed))}
