"""Spectral machinery of compact symmetrizable matrices.

A pair ``(S, A)`` with ``S`` symmetric positive definite and ``A``
symmetric defines ``K = S A`` and its adjoint ``K* = A S``.  Everything
is derived from the symmetric core ``C = sqrt(S) A sqrt(S)``: its
eigenvalues are those of ``K*``, and its orthonormal eigenvectors
``phi_j`` give the biorthogonal families ``f_j = sqrt(S)^{-1} phi_j``
(eigenvectors of ``K*``) and ``g_j = sqrt(S) phi_j = S f_j`` (eigenvectors
of ``K``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (BranchError, ConsistencyError, DomainError, PositivityError,
                     RankError, SingularityError, SymmetrizabilityError)

PLEMELJ_TOL = 1e-9
GROUP_TOL = 1e-8
KERNEL_RTOL = 1e-10


def _norm2(M):
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True, eq=False)
class SymmetrizablePair:
    """``S > 0`` and symmetric ``A``; ``K = S A``.

    If ``K`` is supplied it is checked against ``S A`` and kept as
    ``K_given``; the engine always works with the exact product.
    """

    S: np.ndarray
    A: np.ndarray
    K_given: np.ndarray | None = None
    plemelj_tol: float = PLEMELJ_TOL

    def __post_init__(self):
        S, A = np.asarray(self.S, float), np.asarray(self.A, float)
        if S.shape != A.shape or S.shape[0] != S.shape[1]:
            raise ValueError("S and A must be square matrices of equal size")
        if _norm2(S - S.T) > 1e-12 * max(_norm2(S), 1e-300):
            raise SymmetrizabilityError("S is not symmetric")
        if _norm2(A - A.T) > 1e-10 * max(_norm2(A), 1e-300):
            raise SymmetrizabilityError("A is not symmetric")
        object.__setattr__(self, "S", 0.5 * (S + S.T))
        object.__setattr__(self, "A", 0.5 * (A + A.T))
        if np.linalg.eigvalsh(self.S)[0] <= 0:
            raise PositivityError("S is not positive definite")
        if self.K_given is not None:
            res = _norm2(np.asarray(self.K_given) - self.K)
            if res > self.plemelj_tol * _norm2(self.S) * _norm2(self.A):
                raise SymmetrizabilityError(f"K deviates from S A by {res:.3e}")

    @classmethod
    def from_SK(cls, S, K, plemelj_tol=PLEMELJ_TOL):
        """Build the pair from ``S`` and ``K`` by solving ``S A = K``."""
        S = np.asarray(S, float)
        K = np.asarray(K, float)
        res = _norm2(S @ K.T - K @ S)
        if res > plemelj_tol * _norm2(S) * _norm2(K):
            raise SymmetrizabilityError(f"Plemelj residual {res:.3e} above tolerance")
        A = np.linalg.solve(S, K)
        return cls(S, 0.5 * (A + A.T), K, plemelj_tol)

    @classmethod
    def from_operators(cls, ops, plemelj_tol=PLEMELJ_TOL):
        return cls(ops.S_hat, ops.A_hat, ops.K_hat, plemelj_tol)

    @property
    def n(self):
        return self.S.shape[0]

    @property
    def K(self):
        return self.S @ self.A

    @property
    def Kstar(self):
        return self.A @ self.S

    def plemelj_residual(self):
        return _norm2(self.S @ self.Kstar - self.K @ self.S)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigen-data of ``K*`` sorted by decreasing ``|lambda|``.

    Columns ``[:rank]`` of ``F``, ``G``, ``Phi`` belong to the nonzero
    eigenvalues; the remaining columns of ``Phi`` span the numerical kernel
    of the core operator.
    """

    lam: np.ndarray
    F: np.ndarray
    G: np.ndarray
    Phi: np.ndarray
    sqrtS: np.ndarray
    sqrtS_inv: np.ndarray
    rank: int
    pair: SymmetrizablePair
    s_scale: float
    kernel_tol: float
    group_tol: float

    @property
    def nonzero(self):
        return self.lam[:self.rank]

    @property
    def kernel_basis(self):
        return self.Phi[:, self.rank:]

    @property
    def C(self):
        return self.sqrtS @ self.pair.A @ self.sqrtS

    def norm_minus1(self, x):
        return float(np.linalg.norm(self.sqrtS @ x))

    def norm_plus1(self, x):
        return float(np.linalg.norm(self.sqrtS_inv @ x))

    def biorthogonality_residual(self):
        r = self.rank
        return float(np.max(np.abs(self.F[:, :r].T @ self.G[:, :r] - np.eye(r)))) if r else 0.0

    def eigen_residuals(self):
        r = self.rank
        L = self.lam[:r]
        F, G = self.F[:, :r], self.G[:, :r]
        return (_norm2(self.pair.Kstar @ F - F * L), _norm2(self.pair.K @ G - G * L))

    def projections(self):
        return slanted_projections(self)

    def to_dict(self):
        return {"lambda": [float(v) for v in self.lam[:self.rank]],
                "rank": int(self.rank),
                "biorthogonality_residual": self.biorthogonality_residual(),
                "plemelj_residual": self.pair.plemelj_residual()}


def _order(lam, group_tol):
    order = list(np.argsort(-np.abs(lam), kind="stable"))
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(order) - 1):
            a, b = lam[order[i]], lam[order[i + 1]]
            if abs(abs(a) - abs(b)) <= group_tol and a < 0 < b:
                order[i], order[i + 1] = order[i + 1], order[i]
                swapped = True
    return np.array(order, dtype=int)


def factorize(pair, kernel_tol=None, group_tol=GROUP_TOL):
    """Spectral data of ``K* = A S`` through the symmetric core operator."""
    s_scale = _norm2(pair.S)
    sig, V = np.linalg.eigh(pair.S / s_scale)
    if sig[0] <= 0:
        raise PositivityError("S is not positive definite")
    root = np.sqrt(sig)
    sqrtS = (V * (root * math.sqrt(s_scale))) @ V.T
    sqrtS_inv = (V / (root * math.sqrt(s_scale))) @ V.T
    # the core operator is unchanged by the internal normalization |S| = 1
    C = (V * root) @ V.T @ (pair.A * s_scale) @ (V * root) @ V.T
    C = 0.5 * (C + C.T)
    mu, Phi = np.linalg.eigh(C)
    order = _order(mu, group_tol)
    mu, Phi = mu[order], Phi[:, order]
    idx = np.argmax(np.abs(Phi), axis=0)
    Phi = Phi * np.sign(Phi[idx, np.arange(Phi.shape[1])])
    if kernel_tol is None:
        kernel_tol = KERNEL_RTOL * max(float(np.max(np.abs(mu))), 1e-300)
    rank = int(np.sum(np.abs(mu) > kernel_tol))
    F = sqrtS_inv @ Phi
    G = sqrtS @ Phi
    spec = SpectralData(mu, F, G, Phi, sqrtS, sqrtS_inv, rank, pair, s_scale,
                        float(kernel_tol), group_tol)
    # Krein: sup <S K* x, x> / <S x, x> = max eig(C) <= |K*|
    if mu.size and float(np.max(mu)) > _norm2(pair.Kstar) + 1e-9:
        raise ConsistencyError("Krein inequality violated: max eigenvalue exceeds |K*|")
    return spec


# ---------------------------------------------------------------------------
# spectral projections and resolutions


@dataclass(frozen=True)
class SlantedProjection:
    eigenvalue: float
    Q: np.ndarray
    indices: tuple

    @property
    def multiplicity(self):
        return len(self.indices)


def eigenvalue_groups(spec):
    """Cluster nonzero eigenvalues whose relative gap is below ``group_tol``; lists of indices.

    The gap is measured against the larger modulus so that the small
    ``+-`` pairs near the kernel cutoff are never merged.
    """
    lam = spec.nonzero
    order = np.argsort(lam, kind="stable")
    groups = []
    for i in order:
        prev = lam[groups[-1][-1]] if groups else None
        if groups and abs(lam[i] - prev) <= spec.group_tol * max(abs(lam[i]), abs(prev)):
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    groups.sort(key=lambda g: min(g))
    return groups


def slanted_projections(spec):
    out = []
    for g in eigenvalue_groups(spec):
        Q = spec.F[:, g] @ spec.G[:, g].T
        out.append(SlantedProjection(float(np.mean(spec.lam[g])), Q, tuple(g)))
    return out


def resolution_partial_sum(spec, N):
    """``K*_N = sum_{j<N} lambda_j <., g_j> f_j`` and ``|K* - K*_N|``."""
    n = spec.pair.n
    if not 0 <= N <= n:
        raise DomainError(f"N must lie in [0, {n}]")
    KN = (spec.F[:, :N] * spec.lam[:N]) @ spec.G[:, :N].T
    return KN, _norm2(spec.pair.Kstar - KN)


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    slack: float
    ok: bool


def finite_rank_truncate(pair, N):
    """``L_N = pi_N S pi_N A`` and the check ``|K - L_N| <= |A| sigma_N``."""
    n = pair.n
    if not 0 <= N <= n:
        raise DomainError(f"N must lie in [0, {n}]")
    sig, V = np.linalg.eigh(pair.S)
    sig, V = sig[::-1], V[:, ::-1]
    VN = V[:, :N]
    SN = (VN * sig[:N]) @ VN.T
    LN = SN @ pair.A
    lhs = _norm2(pair.K - LN)
    sigma_N = float(sig[N]) if N < n else 0.0
    rhs = _norm2(pair.A) * sigma_N
    tol = 1e-12 * max(1.0, _norm2(pair.A) * _norm2(pair.S))
    return LN, BoundCheck(lhs, rhs, rhs - lhs, lhs <= rhs + tol)


# ---------------------------------------------------------------------------
# functional calculus


@dataclass(frozen=True)
class CalculusResult:
    matrix: np.ndarray
    norm: float
    upper_bound: float
    lower_bound: float
    c1_norm: float
    horner_residual: float | None

    @property
    def upper_ok(self):
        return self.norm <= self.upper_bound * (1 + 1e-12) + 1e-12

    @property
    def lower_ok(self):
        return self.norm >= self.lower_bound - 1e-9


def horner(coeffs, M):
    """``p(M)`` for increasing-degree coefficients."""
    n = M.shape[0]
    out = np.zeros_like(M, dtype=np.result_type(M, np.asarray(coeffs)))
    for c in coeffs[::-1]:
        out = out @ M + c * np.eye(n)
    return out


def _as_function(phi, dphi):
    if callable(phi):
        if dphi is None:
            def dphi(t, _h=1e-6):
                return (phi(t + _h) - phi(t - _h)) / (2 * _h)
        return phi, dphi, None
    coeffs = np.asarray(phi, dtype=float)
    p = Polynomial(coeffs)
    return p, p.deriv(), coeffs


def functional_calculus(spec, phi, interval=None, dphi=None, samples=10_000):
    """``Phi(phi) = phi(0) I + sum_j (phi(lambda_j) - phi(0)) <., g_j> f_j``.

    ``phi`` is a callable (with optional derivative ``dphi``) or a list of
    polynomial coefficients in increasing degree.  The result carries the
    norm bounds ``max |phi(lambda_j)| <= |Phi(phi)| <= 2 |A| |S| |phi|_C1``.
    """
    f, df, coeffs = _as_function(phi, dphi)
    lam = spec.nonzero
    lo, hi = min(0.0, float(lam.min(initial=0.0))), max(0.0, float(lam.max(initial=0.0)))
    a, b = interval if interval is not None else (lo, hi)
    if a > lo + 1e-12 or b < hi - 1e-12:
        raise DomainError(f"interval [{a}, {b}] must contain the spectrum and 0")
    r = spec.rank
    phi0 = float(f(0.0))
    vals = np.asarray(f(lam), dtype=float) * np.ones(r)
    # kernel modes carry phi(0); their computed eigenvalues are below kernel_tol
    # so using them directly keeps the expansion exact to rounding
    full = np.asarray(f(spec.lam), dtype=float) * np.ones(spec.pair.n)
    M = (spec.F * full) @ spec.G.T
    t = np.linspace(a, b, samples)
    c1 = max(float(np.max(np.abs(f(t)))), float(np.max(np.abs(df(t)))))
    upper = 2 * _norm2(spec.pair.A) * _norm2(spec.pair.S) * c1
    spec_vals = list(np.abs(vals))
    if r < spec.pair.n:
        spec_vals.append(abs(phi0))
    lower = max(spec_vals) if spec_vals else 0.0
    horner_res = None
    if coeffs is not None:
        P = horner(coeffs, spec.pair.Kstar)
        horner_res = _norm2(M - P) / max(_norm2(P), 1e-300)
    return CalculusResult(M, _norm2(M), upper, lower, c1, horner_res)


# ---------------------------------------------------------------------------
# resolvents


@dataclass(frozen=True)
class ResolventResult:
    u: np.ndarray
    direct: np.ndarray
    residual: float
    borel_sum: float | None = None
    borel_bound: float | None = None

    @property
    def borel_ok(self):
        return self.borel_sum is None or self.borel_sum <= self.borel_bound + 1e-9


def resolvent(spec, f, *, lam=None, z=None, probe=None, sing_tol=1e-12):
    """Solve ``(lam - K*) u = f`` or ``(I - z K*) u = f`` by the eigen series.

    Exactly one of ``lam``/``z`` is given.  The series is compared with a
    dense solve; with a ``probe`` vector the absolute Borel sum
    ``sum |lambda_j <f, g_j> <f_j, probe>|`` is returned with its bound
    ``|sqrt(S) f| |sqrt(S) A probe|``.
    """
    if (lam is None) == (z is None):
        raise ValueError("give exactly one of lam or z")
    f = np.asarray(f)
    r = spec.rank
    n = spec.pair.n
    # all modes enter the series; kernel modes contribute at rounding level
    L = spec.lam
    coef = spec.G.T @ f
    Ks = spec.pair.Kstar
    if lam is not None:
        if abs(lam) <= sing_tol or np.min(np.abs(lam - L[:r]), initial=np.inf) <= sing_tol:
            raise SingularityError(f"lambda = {lam} lies on the spectrum")
        u = f / lam + spec.F @ (L / (lam * (lam - L)) * coef)
        direct = np.linalg.solve(lam * np.eye(n) - Ks, f)
    else:
        if np.min(np.abs(1 - z * L), initial=np.inf) <= sing_tol:
            raise SingularityError(f"z = {z} hits a characteristic value")
        u = f + spec.F @ (L * z / (1 - z * L) * coef)
        direct = np.linalg.solve(np.eye(n) - z * Ks, f)
    res = float(np.linalg.norm(u - direct) / max(np.linalg.norm(direct), 1e-300))
    bsum = bbound = None
    if probe is not None:
        probe = np.asarray(probe)
        bsum = float(np.sum(np.abs(L * coef * (spec.F.T @ probe))))
        bbound = float(np.linalg.norm(spec.sqrtS @ f) * np.linalg.norm(spec.sqrtS @ spec.pair.A @ probe))
    return ResolventResult(u, direct, res, bsum, bbound)


def resolvent_residue(spec, j, f, h0=1e-3, levels=5):
    """Residue of ``z -> (I - z K*)^{-1} f`` at ``z = 1/lambda_j`` from dense solves.

    Returns the extrapolated residue and its distance to ``-Q f / lambda``.
    """
    from .kernels import richardson_zero

    lam = spec.lam[j]
    z0 = 1.0 / lam
    n = spec.pair.n
    hs = h0 * abs(z0) * 0.5 ** np.arange(levels)
    vals = np.array([h * np.linalg.solve(np.eye(n) - (z0 + h) * spec.pair.Kstar, f) for h in hs])
    res = np.array([richardson_zero(hs, vals[:, i])[0] for i in range(n)])
    group = next(p for p in slanted_projections(spec) if j in p.indices)
    expected = -group.Q @ f / lam
    err = float(np.linalg.norm(res - expected) / max(np.linalg.norm(expected), 1e-300))
    return res, expected, err


@dataclass(frozen=True)
class GrowthRow:
    alpha: float
    z: complex
    norm: float
    lower: float
    upper: float

    @property
    def ok(self):
        return self.lower * (1 - 1e-9) <= self.norm <= self.upper * (1 + 1e-9)


@dataclass
class GrowthReport:
    alpha: float
    delta: float
    rows: list = field(default_factory=list)
    skipped: bool = False

    @property
    def ok(self):
        return (not self.skipped) and all(r.ok for r in self.rows)


def resolvent_growth_check(spec, alpha, z_samples=None, fractions=(0.5, 0.1, 1e-2, 1e-3),
                           angles=(0.0, math.pi / 2)):
    """Sandwich ``1/|z-a| <= |(K* - z)^{-1}| <= (1 + |A||S|)/|z-a|`` near ``alpha``."""
    L = spec.nonzero
    others = np.append(L[np.abs(L - alpha) > spec.group_tol], 0.0)
    delta = float(np.min(np.abs(others - alpha))) / 2
    radius = min(delta, abs(alpha) / 2)
    rep = GrowthReport(float(alpha), delta)
    if z_samples is None:
        z_samples = [alpha + fr * radius * complex(math.cos(a), math.sin(a))
                     for fr in fractions for a in angles]
    z_samples = [z for z in z_samples if 0 < abs(z - alpha) < radius]
    if not z_samples or radius <= 0:
        rep.skipped = True
        return rep
    Ks = spec.pair.Kstar
    n = spec.pair.n
    c = 1 + _norm2(spec.pair.A) * _norm2(spec.pair.S)
    for z in z_samples:
        smin = np.linalg.svd(Ks - z * np.eye(n), compute_uv=False)[-1]
        d = abs(z - alpha)
        rep.rows.append(GrowthRow(float(alpha), complex(z), float(1 / smin), 1 / d, c / d))
    return rep


# ---------------------------------------------------------------------------
# determinants and powers


def _spectrum_arrays(spectrum, multiplicities=None):
    lam = spectrum.nonzero if isinstance(spectrum, SpectralData) else np.asarray(spectrum)
    mult = np.ones(len(lam)) if multiplicities is None else np.asarray(multiplicities, float)
    return lam, mult


def fredholm_det(spectrum, p, z, multiplicities=None):
    """Regularized determinant ``det(I - z K*) exp(sum_{k<p} z^k tr(K*^k)/k)``.

    ``spectrum`` is a ``SpectralData`` or an array of eigenvalues (with
    optional multiplicities).
    """
    if p < 1:
        raise DomainError("p must be a positive integer")
    lam, mult = _spectrum_arrays(spectrum, multiplicities)
    x = z * lam.astype(complex)
    logs = np.log(1 - x)
    for k in range(1, p):
        logs = logs + x**k / k
    return complex(np.exp(np.sum(mult * logs)))


def det_p_identity(T_eigs, p, multiplicities=None):
    """``det_p(I + T)`` from the eigenvalues of ``T``."""
    mu = np.asarray(T_eigs, dtype=complex)
    mult = np.ones(len(mu)) if multiplicities is None else np.asarray(multiplicities, float)
    logs = np.log(1 + mu)
    for k in range(1, p):
        logs = logs + (-1) ** k * mu**k / k
    return complex(np.exp(np.sum(mult * logs)))


def recursion_check(Kstar, p, z):
    """Relative residual of ``det_{p+1}(I+T) = det_p(I+T) exp((-1)^p tr(T^p)/p)``
    with ``T = -z K*``; the trace is taken from the matrix power."""
    T = -z * np.asarray(Kstar, dtype=complex)
    mu = np.linalg.eigvals(T)
    lhs = det_p_identity(mu, p + 1)
    tr = np.trace(np.linalg.matrix_power(T, p))
    rhs = det_p_identity(mu, p) * np.exp((-1) ** p * tr / p)
    return float(abs(lhs - rhs) / max(abs(lhs), 1e-300))


def complex_power(spec, z, v):
    """``(K*)^z v = sum_j lambda_j^z <v, g_j> f_j`` for ``Re z > 1``."""
    if complex(z).real <= 1:
        raise DomainError("complex powers need Re z > 1")
    r = spec.rank
    L = spec.lam[:r]
    if np.any(L <= 0):
        raise BranchError("negative eigenvalues present; the branch choice is not implemented")
    coef = spec.G[:, :r].T @ np.asarray(v)
    return spec.F[:, :r] @ (np.exp(z * np.log(L)) * coef)


def power_semigroup_residual(spec, z1, z2, v):
    lhs = complex_power(spec, z1 + z2, v)
    rhs = complex_power(spec, z1, complex_power(spec, z2, v))
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(v), 1e-300))


# ---------------------------------------------------------------------------
# cyclicity and synthesis


@dataclass(frozen=True)
class CyclicReport:
    coefficients: np.ndarray
    min_abs: float
    cyclic: bool
    multiplicity_warning: bool
    group_coefficients: list


def cyclic_coefficients(spec, xi, n_modes=None, coef_tol=None):
    """Skew Fourier coefficients ``<xi, g_j>`` and the cyclicity verdict."""
    r = spec.rank if n_modes is None else min(n_modes, spec.rank)
    xi = np.asarray(xi)
    c = spec.G[:, :r].T @ xi
    if coef_tol is None:
        coef_tol = 1e-12 * max(float(np.linalg.norm(spec.sqrtS @ xi)), 1e-300)
    groups = [g for g in eigenvalue_groups(spec) if min(g) < r]
    multi = any(len(g) > 1 for g in groups)
    gcoef = [float(np.linalg.norm(c[[i for i in g if i < r]])) for g in groups]
    cyclic = (not multi) and bool(np.all(np.abs(c) > coef_tol))
    return CyclicReport(c, float(np.min(np.abs(c))) if r else 0.0, cyclic, multi, gcoef)


@dataclass(frozen=True)
class InvariantReport:
    plemelj: float
    plemelj_scale: float
    min_eig_PSP: float
    eigvec_rank: int
    dim: int
    invariance: float

    @property
    def ok(self):
        return (self.plemelj <= 1e-9 * self.plemelj_scale and self.min_eig_PSP > 0
                and self.eigvec_rank == self.dim)


def invariant_projection_check(spec, J):
    """Restriction of ``(S, K*)`` to the invariant subspace spanned by ``f_j, j in J``."""
    J = list(J)
    Q, _ = np.linalg.qr(spec.F[:, J])
    pair = spec.pair
    S_J = Q.T @ pair.S @ Q
    Ks_J = Q.T @ pair.Kstar @ Q
    K_J = Q.T @ pair.K @ Q
    pl = _norm2(S_J @ Ks_J - K_J @ S_J)
    scale = _norm2(S_J) * max(_norm2(K_J), _norm2(Ks_J))
    inv = _norm2(pair.Kstar @ Q - Q @ Ks_J)
    _, W = np.linalg.eig(K_J)
    rank = int(np.linalg.matrix_rank(W, tol=1e-8))
    return InvariantReport(pl, scale, float(np.linalg.eigvalsh(S_J)[0]), rank, len(J), inv)


def bari_construct(F, lam, tol=1e-10):
    """Symmetrizing pair for a complete minimal family ``F`` with ``K* f_n = lam_n f_n``.

    The biorthogonal family is ``G = F^{-T}`` and ``S = G F^{-1} = (F F^T)^{-1}``
    so that ``g_n = S f_n``.
    """
    F = np.asarray(F, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = F.shape[0]
    if F.shape != (n, n) or lam.shape != (n,):
        raise ValueError("F must be square with one eigenvalue per column")
    if np.linalg.matrix_rank(F) < n or np.linalg.cond(F) > 1e12:
        raise RankError("family is not linearly independent")
    G = np.linalg.inv(F).T
    S = G @ np.linalg.inv(F)
    if _norm2(S - S.T) > tol * _norm2(S):
        raise ConsistencyError("constructed S is not symmetric")
    S = 0.5 * (S + S.T)
    if np.linalg.eigvalsh(S)[0] <= 0:
        raise ConsistencyError("constructed S is not positive")
    Kstar = F @ np.diag(lam) @ np.linalg.inv(F)
    A = Kstar @ np.linalg.inv(S)
    A = 0.5 * (A + A.T)
    pair = SymmetrizablePair(S, A)
    if _norm2(S @ Kstar - Kstar.T @ S) > 1e-9 * _norm2(S) * _norm2(Kstar):
        raise ConsistencyError("S K* != K S for the constructed pair")
    return pair
