"""Characteristic-value and singular-number ratios of ``K`` against ``S``.

Three sources are supported: the analytic unit-sphere tables (where
``K* = S`` exactly), planar Nystrom discretizations (where the ratio
collapses because ``K`` is far more smoothing than ``S``) and synthetic
symmetrizable matrices ``K = (I + B) S``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .geometry import SurfaceRev, shape_constants
from .nystrom import DiscretizedOperators
from .symmetrizable import SymmetrizablePair
from .zeta_eta import SphereSpectrum


@dataclass(frozen=True)
class RatioRow:
    n: int
    mu_S: float
    mu_K: float
    sigma_S: float
    sigma_K: float

    @property
    def ratio_mu(self):
        return self.mu_S / self.mu_K

    @property
    def ratio_sigma(self):
        return self.sigma_K / self.sigma_S


@dataclass
class RatioTable:
    kind: str
    rows: list
    verdict: bool
    details: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def csv_rows(self):
        head = ["n", "mu_S", "mu_K", "sigma_S", "sigma_K", "ratio_mu", "ratio_sigma", "verdict"]
        body = [[r.n, r.mu_S, r.mu_K, r.sigma_S, r.sigma_K, r.ratio_mu, r.ratio_sigma,
                 int(self.verdict)] for r in self.rows]
        return head, body


def _rows(lam_S, lam_K, sig_S, sig_K, count):
    return [RatioRow(i + 1, 1.0 / abs(lam_S[i]), 1.0 / abs(lam_K[i]), float(sig_S[i]), float(sig_K[i]))
            for i in range(count)]


def _resolvable(values, rtol):
    v = np.abs(values)
    return int(np.sum(v > rtol * v.max())) if v.size else 0


def _matrix_spectra(S, K):
    lam_S = np.sort(np.linalg.eigvalsh(S))[::-1]
    ev = np.linalg.eigvals(K)
    lam_K = ev[np.argsort(-np.abs(ev), kind="stable")]
    return lam_S, np.abs(lam_K), lam_S.copy(), np.linalg.svd(K, compute_uv=False)


def ratio_table(source, count, kappa=(1.0, 1.0), eps=0.05, n_from=50, rtol=1e-13):
    """Ratio table from a ``SphereSpectrum``, ``DiscretizedOperators`` or ``SymmetrizablePair``.

    Verdicts: sphere ratios equal 1; planar ratio at n = 30 is at most
    ``1e-4`` times the ratio at n = 5; synthetic ratios lie in
    ``[kappa_- - eps, kappa_+ + eps]`` for ``n >= n_from``.
    """
    if count < 1:
        raise ParameterError("count must be positive")
    warn = []
    if isinstance(source, SphereSpectrum):
        kind = "sphere"
        vals = source.expanded()
        lam_S = lam_K = sig_S = sig_K = vals
    elif isinstance(source, DiscretizedOperators):
        kind = "planar"
        lam_S, lam_K, sig_S, sig_K = _matrix_spectra(source.S_hat, source.K_hat)
    elif isinstance(source, SymmetrizablePair):
        kind = "synthetic"
        lam_S, lam_K, sig_S, sig_K = _matrix_spectra(source.S, source.K)
    else:
        raise ParameterError(f"unsupported source {type(source).__name__}")
    avail = min(len(lam_S), _resolvable(lam_K, rtol), _resolvable(sig_K, rtol))
    if count > avail:
        msg = f"only {avail} resolvable values; table truncated from {count}"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        warn.append(msg)
        count = avail
    rows = _rows(lam_S, lam_K, sig_S, sig_K, count)
    table = RatioTable(kind, rows, True, warnings=warn)
    rs = table.column("ratio_sigma")
    if kind == "sphere":
        table.verdict = bool(np.all(np.abs(rs - 1) <= 1e-12)
                             and np.all(np.abs(table.column("ratio_mu") - 1) <= 1e-12))
    elif kind == "planar":
        if count >= 30:
            r5, r30 = rs[4], rs[29]
            table.details.update(ratio_5=float(r5), ratio_30=float(r30))
            table.verdict = bool(r30 <= 1e-4 * r5)
        else:
            table.verdict = False
            table.details["reason"] = "fewer than 30 resolvable values"
    else:
        tail = rs[n_from - 1:] if count >= n_from else np.array([])
        lo, hi = kappa
        table.details.update(kappa_minus=lo, kappa_plus=hi, eps=eps, n_from=n_from)
        table.verdict = bool(tail.size and np.all((tail >= lo - eps) & (tail <= hi + eps)))
    return table


# ---------------------------------------------------------------------------
# synthetic perturbations of the identity


def localized_basis(N, K, decay=1.0, seed=0):
    """``K`` orthonormal vectors whose ``i``-th components decay like ``(1+i)^-decay``.

    Such vectors are the leading sections of fixed square-summable vectors,
    so the resulting ``B`` models one compact operator at every size.
    """
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((N, K)) * ((1.0 + np.arange(N)) ** (-decay))[:, None]
    Q, _ = np.linalg.qr(W)
    return Q


def perturbation(N, B_spec, decay=1.0, seed=0, modes=48):
    """Symmetric ``B`` with the spectrum described by ``B_spec``.

    ``B_spec`` is ``"zero"``, ``"rank1"`` (norm 1/2), ``"geometric"``
    (eigenvalues ``2^-k``), ``("geometric", q)`` (eigenvalues ``q^k``) or an
    explicit array of eigenvalues.
    """
    if isinstance(B_spec, str):
        B_spec = (B_spec, 0.5)
    if isinstance(B_spec, tuple):
        name, q = B_spec
        if name == "zero":
            return np.zeros((N, N))
        if name == "rank1":
            eig = np.array([q])
        elif name == "geometric":
            eig = q ** np.arange(1, modes + 1)
        else:
            raise ParameterError(f"unknown perturbation {name!r}")
    else:
        eig = np.asarray(B_spec, dtype=float)
    m = min(len(eig), N)
    V = localized_basis(N, m, decay, seed)
    return (V * eig[:m]) @ V.T


@dataclass
class PerturbedRatioReport:
    sizes: tuple
    errors: dict
    nested_errors: list
    monotone: bool
    counting_ratio: dict

    def error(self, N):
        return self.errors[N]

    def to_dict(self):
        return {"sizes": list(self.sizes), "tail_errors": {str(k): v for k, v in self.errors.items()},
                "nested_errors": self.nested_errors, "monotone": self.monotone,
                "counting_ratio": {str(k): v for k, v in self.counting_ratio.items()}}


def tail_ratio_error(B, s):
    """``max_{n in [N/2, N]} |sigma_n((I+B)S) / sigma_n(S) - 1|`` for ``S = diag(s)``."""
    N = len(s)
    IB = np.eye(N) + B
    if np.min(np.abs(np.linalg.eigvalsh(IB))) <= 1e-12:
        raise DomainError("I + B is singular")
    sv = np.linalg.svd(IB * s[None, :], compute_uv=False)
    ss = np.sort(s)[::-1]
    r = sv / ss
    return float(np.max(np.abs(r[N // 2 - 1:] - 1))), sv, ss


def counting_ratio(sv_K, sv_S, index):
    """``n(r, K) / n(r, S)`` at ``r = 1 / sigma_index(S)``."""
    thr = sv_S[index - 1] * (1 - 1e-12)
    return float(np.sum(sv_K >= thr) / np.sum(sv_S >= thr))


def perturbed_identity_ratio_check(sizes=(100, 200, 400), B_spec="geometric", seed=0,
                                   decay=1.0, s_decay=1.0, nested=(0.5, 0.25, 0.125)):
    """Tail singular-value ratios of ``K = (I + B) S`` with ``S = diag(k^-s_decay)``.

    Also runs three nested perturbations ``q^k`` at the largest size and
    checks that the tail error shrinks with the spectral tail of ``B``.
    """
    errors, counts = {}, {}
    for N in sizes:
        s = (1.0 + np.arange(N)) ** (-s_decay)
        B = perturbation(N, B_spec, decay, seed)
        err, sv, ss = tail_ratio_error(B, s)
        errors[N] = err
        counts[N] = counting_ratio(sv, ss, N // 2)
    N = max(sizes)
    s = (1.0 + np.arange(N)) ** (-s_decay)
    nested_err = [tail_ratio_error(perturbation(N, ("geometric", q), decay, seed), s)[0]
                  for q in nested]
    mono = all(a > b for a, b in zip(nested_err, nested_err[1:]))
    return PerturbedRatioReport(tuple(sizes), errors, nested_err, mono, counts)


# ---------------------------------------------------------------------------
# sharp constants


@dataclass(frozen=True)
class SharpConstants:
    c_S: float
    c_K: float
    c_gamma: float
    c_gamma_direct: float
    table_check: dict | None = None

    def to_dict(self):
        d = {"c_S": self.c_S, "c_K": self.c_K, "c_gamma": self.c_gamma,
             "c_gamma_direct": self.c_gamma_direct}
        if self.table_check is not None:
            d["sphere_tables"] = self.table_check
        return d


def sphere_table_check(n=2000, tol=0.02):
    """``sigma_n sqrt(n)`` from the analytic unit-sphere tables (multiplicities expanded)."""
    deg = int(math.isqrt(n)) + 2
    vals = SphereSpectrum(deg).expanded(n)
    sigma = float(vals[n - 1])
    return {"n": n, "sigma_S_sqrt_n": sigma * math.sqrt(n), "sigma_K_sqrt_n": sigma * math.sqrt(n),
            "ratio": 1.0, "tol": tol}


def sharp_ratio_constants(surface, quadrature_order=64, n_table=2000, table_tol=0.02):
    """``c_S``, ``c_K`` and ``c_gamma = c_K / c_S`` of a surface of revolution.

    For the unit sphere the analytic tables are compared with the constants.
    """
    if not isinstance(surface, SurfaceRev):
        raise ParameterError("a SurfaceRev is required")
    sc = shape_constants(surface, quadrature_order)
    direct = math.sqrt((3 * sc.willmore - 2 * math.pi * sc.euler_char) / (2 * sc.area))
    table = None
    if surface.family == "sphere" and math.isclose(surface.params["r"], 1.0):
        t = sphere_table_check(n_table, table_tol)
        t["ok"] = bool(abs(t["sigma_S_sqrt_n"] - sc.c_S) <= table_tol * sc.c_S
                       and abs(t["sigma_K_sqrt_n"] - sc.c_K) <= table_tol * sc.c_K
                       and abs(t["ratio"] - sc.c_gamma) <= 1e-10)
        table = t
    return SharpConstants(sc.c_S, sc.c_K, sc.c_gamma, direct, table)
