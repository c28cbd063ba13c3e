"""Newtonian kernel, layer kernels, off-surface potentials and jump relations.

Sign conventions: ``Delta E = -delta`` and the operator ``K`` (kernel
``2 k(x, y)``) maps the constant 1 to itself on every closed curve.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError


def newton_kernel(d, x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    r = float(np.linalg.norm(x - y))
    if r == 0.0:
        raise DomainError("Newtonian kernel is singular at x = y")
    if d == 2:
        return -math.log(r) / (2 * math.pi)
    if d == 3:
        return 1.0 / (4 * math.pi * r)
    raise DomainError(f"dimension must be 2 or 3, got {d}")


@dataclass(frozen=True)
class KernelValue:
    e_value: float
    k_value: float
    kstar_value: float


def layer_kernels(x, y):
    """Kernels ``E``, ``K = -dE/dn_y`` and ``K* = -dE/dn_x`` between two
    points of the same curve (``CurvePoint`` instances)."""
    d = np.asarray(y.position) - np.asarray(x.position)
    r2 = float(d @ d)
    if r2 == 0.0:
        diag = x.curvature / (4 * math.pi)
        return KernelValue(math.inf, diag, diag)
    k = float(d @ y.outward_normal) / (2 * math.pi * r2)
    ks = float(-d @ x.outward_normal) / (2 * math.pi * r2)
    return KernelValue(-math.log(r2) / (4 * math.pi), k, ks)


# ---------------------------------------------------------------------------
# off-surface evaluation


def trig_upsample(values, m):
    """Trigonometric interpolation of equispaced periodic samples to ``m`` nodes."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if m == n:
        return values.copy()
    c = np.fft.rfft(values)
    if n % 2 == 0:
        c[-1] *= 0.5  # split the Nyquist mode symmetrically
    out = np.zeros(m // 2 + 1, dtype=complex)
    out[:len(c)] = c
    return np.fft.irfft(out, m) * (m / n)


@dataclass
class Potentials:
    single: np.ndarray
    double: np.ndarray
    grad_single: np.ndarray | None = None
    near_boundary: np.ndarray = field(default=None)
    nodes_used: int = 0

    @property
    def warnings(self):
        if self.near_boundary is None or not self.near_boundary.any():
            return []
        return [f"{int(self.near_boundary.sum())} target(s) within 0.1 grid spacing of the boundary"]


def _fine_nodes(curve, m):
    t = 2 * np.pi * np.arange(m) / m
    x, _, nu, _, speed = curve.frame(t)
    return t, x, nu, speed * 2 * np.pi / m


def eval_potentials(grid, density, points, upsample="auto", gradient=False, max_nodes=1 << 18):
    """Single and double layer potentials ``S_f(x)``, ``D_f(x)`` off the curve.

    ``density`` is either nodal values on ``grid`` (trigonometrically
    interpolated when upsampling) or a callable of the curve parameter.
    With ``upsample="auto"`` the quadrature is refined until the node
    spacing is a fifth of the smallest target distance.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    curve = grid.curve
    n = grid.n
    h = float(np.max(grid.weights))
    dist0 = np.min(np.linalg.norm(pts[:, None, :] - grid.points[None, :, :], axis=-1), axis=1)
    near = dist0 < 0.1 * h
    if upsample == "auto":
        m = n
        dmin = max(float(np.min(dist0)), 1e-300)
        while m < max_nodes and h * n / m > dmin / 5:
            m *= 2
    else:
        m = n * int(upsample)
    if near.any() and h * n / m > float(np.min(dist0)) / 5:
        warnings.warn("potential evaluated within a tenth of a grid spacing of the boundary; "
                      "quadrature is not resolved there", RuntimeWarning, stacklevel=2)
    t, y, nu, w = _fine_nodes(curve, m)
    if callable(density):
        f = np.asarray(density(t), dtype=float) * np.ones(m)
    else:
        f = trig_upsample(density, m)
    fw = f * w
    single = np.empty(len(pts))
    double = np.empty(len(pts))
    grad = np.empty((len(pts), 2)) if gradient else None
    for start in range(0, len(pts), 64):
        p = pts[start:start + 64]
        d = p[:, None, :] - y[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", d, d)
        single[start:start + 64] = -(np.log(r2) @ fw) / (4 * np.pi)
        double[start:start + 64] = (np.einsum("ijk,jk->ij", d, nu) / r2) @ fw / (2 * np.pi)
        if gradient:
            grad[start:start + 64] = -np.einsum("ijk,ij->ik", d / r2[:, :, None],
                                                fw[None, :]) / (2 * np.pi)
    return Potentials(single, double, grad, near, m)


# ---------------------------------------------------------------------------
# jump relations


def richardson_zero(eps, values):
    """Polynomial (Neville) extrapolation of ``values(eps)`` to ``eps = 0``.

    Returns the extrapolated value and the change contributed by the last
    sample (a convergence indicator).
    """
    eps = np.asarray(eps, dtype=float)
    p = np.array(values, dtype=float)
    m = len(eps)
    table = [p.copy()]
    for k in range(1, m):
        prev = table[-1]
        nxt = (eps[k:] * prev[:-1] - eps[:-k] * prev[1:]) / (eps[k:] - eps[:-k])
        table.append(nxt)
    est = table[-1][0]
    prev_est = table[-2][0] if m > 1 else est
    return float(est), float(abs(est - prev_est))


@dataclass
class JumpReport:
    residuals: dict
    max_residual: float
    converged: bool
    node: int

    def to_dict(self):
        return {"residuals": dict(self.residuals), "max_residual": self.max_residual,
                "converged": self.converged, "node": self.node}


def jump_check(ops, density, node=0, eps_sequence=None, conv_tol=1e-6):
    """Residuals of the six jump relations at grid node ``node``.

    ``density`` is nodal values on ``ops.grid`` or a callable of the
    curve parameter.  One-sided limits are obtained by approaching along
    the normal and extrapolating ``eps -> 0``.
    """
    grid = ops.grid
    if eps_sequence is None:
        eps_sequence = 1e-2 * 0.5 ** np.arange(7)
    eps = np.asarray(eps_sequence, dtype=float)
    f_nodes = np.asarray(density(grid.t), dtype=float) * np.ones(grid.n) if callable(density) \
        else np.asarray(density, dtype=float)
    fh = grid.to_hat(f_nodes)
    Sf = grid.from_hat(ops.S_hat @ fh)[node]
    Kf = grid.from_hat(ops.K_hat @ fh)[node]
    Ksf = grid.from_hat(ops.Kstar_hat @ fh)[node]
    f0 = f_nodes[node]
    x0, nu = grid.points[node], grid.normals[node]

    sides = {}
    for side, sgn in (("i", -1.0), ("e", 1.0)):
        pts = x0[None, :] + sgn * eps[:, None] * nu[None, :]
        pot = eval_potentials(grid, density, pts, gradient=True)
        dn = pot.grad_single @ nu
        sides[side] = {name: richardson_zero(eps, vals)
                       for name, vals in (("S", pot.single), ("dnS", dn), ("D", pot.double))}

    limits = {f"{k}_{s}": v[0] for s, d in sides.items() for k, v in d.items()}
    drift = max(v[1] for d in sides.values() for v in d.values())
    res = {
        "S_i": limits["S_i"] - Sf,
        "S_e": limits["S_e"] - Sf,
        "dnS_i": limits["dnS_i"] - (0.5 * f0 - 0.5 * Ksf),
        "dnS_e": limits["dnS_e"] - (-0.5 * f0 - 0.5 * Ksf),
        "D_i": limits["D_i"] - (-0.5 * f0 - 0.5 * Kf),
        "D_e": limits["D_e"] - (0.5 * f0 - 0.5 * Kf),
    }
    res = {k: abs(float(v)) for k, v in res.items()}
    scale = max(1.0, float(np.max(np.abs(f_nodes))))
    converged = drift <= conv_tol * scale
    if not converged:
        raise NumericError(f"normal-limit extrapolation did not converge (drift {drift:.2e})")
    return JumpReport(res, max(res.values()), converged, node)


def laplacian_fd(grid, density, point, h=1e-3):
    """Five-point finite-difference Laplacian of ``S_f`` and ``D_f`` at ``point``."""
    p = np.asarray(point, dtype=float)
    offs = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]])
    pot = eval_potentials(grid, density, p + offs)
    lap_s = (pot.single[1:].sum() - 4 * pot.single[0]) / h**2
    lap_d = (pot.double[1:].sum() - 4 * pot.double[0]) / h**2
    return float(lap_s), float(lap_d)
