"""Bordered symmetrizable matrices whose kernels of ``K`` and ``K*`` differ in nature.

``S = diag(1, l_1, ..., l_N)`` and ``A`` has unit diagonal with first row
and column ``(1, -l_1, ..., -l_N)``, where ``sum l_j^2 = 1``.  Then
``ker A = ker SA`` is spanned by ``(1, l_1, ..., l_N)``, ``ker C`` by
``(1, sqrt(l_1), ...)`` and ``ker AS`` by the constant vector, whose norm
grows without bound as ``N`` increases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

KERNEL_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class KreinExample:
    lam: np.ndarray

    @property
    def N(self):
        return len(self.lam)

    @property
    def S(self):
        return np.diag(np.concatenate(([1.0], self.lam)))

    @property
    def A(self):
        n = self.N + 1
        A = np.eye(n)
        A[0, 1:] = -self.lam
        A[1:, 0] = -self.lam
        return A

    @property
    def K(self):
        return self.S @ self.A

    @property
    def Kstar(self):
        return self.A @ self.S

    @property
    def C(self):
        r = np.sqrt(np.concatenate(([1.0], self.lam)))
        return r[:, None] * self.A * r[None, :]

    def kernel_vectors(self):
        """Closed-form kernel vectors of ``A``, ``C``, ``SA`` and ``AS``."""
        v = np.concatenate(([1.0], self.lam))
        return {"A": v, "C": np.concatenate(([1.0], np.sqrt(self.lam))),
                "SA": v.copy(), "AS": np.ones(self.N + 1)}

    def matrices(self):
        return {"A": self.A, "C": self.C, "SA": self.K, "AS": self.Kstar}


@dataclass(frozen=True)
class KernelEntry:
    name: str
    vector: np.ndarray
    residual: float
    dimension: int

    @property
    def ok(self):
        return self.residual <= KERNEL_TOL and self.dimension == 1


@dataclass(frozen=True)
class KernelReport:
    N: int
    normalization_error: float
    entries: dict
    plemelj_residual: float
    as_norm: float
    sa_norm: float
    note: str = ("finite truncation: every kernel is one-dimensional; the constant kernel "
                 "vector of AS has norm sqrt(N+1) and leaves l2 as N grows")

    @property
    def ok(self):
        return all(e.ok for e in self.entries.values()) and self.normalization_error <= 1e-15

    def to_dict(self):
        return {"N": self.N, "normalization_error": self.normalization_error,
                "plemelj_residual": self.plemelj_residual,
                "kernels": {k: {"vector": [float(x) for x in e.vector], "residual": e.residual,
                                "dimension": e.dimension, "ok": e.ok}
                            for k, e in self.entries.items()},
                "ker_AS_norm": self.as_norm, "ker_SA_norm": self.sa_norm,
                "ok": self.ok, "note": self.note}


def krein_example(lambda_raw):
    """Build the example from positive weights, renormalized to unit l2 norm."""
    lam = np.asarray(lambda_raw, dtype=float).ravel()
    if lam.size == 0:
        raise ParameterError("at least one weight is required")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise ParameterError("weights must be positive and finite")
    lam = np.sort(lam)[::-1]
    lam = lam / math.sqrt(math.fsum(lam**2))
    return KreinExample(lam)


def _null_dim(M, rtol=1e-10):
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s <= rtol * s[0]))


def kernel_report(ex):
    mats = ex.matrices()
    entries = {}
    for name, v in ex.kernel_vectors().items():
        M = mats[name]
        res = float(np.max(np.abs(M @ v)))
        entries[name] = KernelEntry(name, v, res, _null_dim(M))
    S, Ks, K = ex.S, ex.Kstar, ex.K
    pl = float(np.max(np.abs(S @ Ks - K @ S)))
    return KernelReport(ex.N, abs(math.fsum(ex.lam**2) - 1.0), entries, pl,
                        float(np.linalg.norm(entries["AS"].vector)),
                        float(np.linalg.norm(entries["SA"].vector)))


def norm_growth(Ns=(4, 16, 64), weights=None):
    """Norms of the ``ker AS`` vector (first entry 1) for equal weights at each N.

    Returns the norms and the successive ratios.
    """
    norms = []
    for N in Ns:
        w = np.ones(N) if weights is None else weights(N)
        rep = kernel_report(krein_example(w))
        norms.append(rep.as_norm)
    norms = np.array(norms)
    return norms, norms[1:] / norms[:-1]
