"""Spectral zeta and eta functions of Neumann-Poincare spectra.

On the unit sphere the eigenvalues are ``1/(2n+1)`` with multiplicity
``2n+1``, so ``zeta_S2(z) = sum (2n+1)^(1-z) = (1 - 2^(1-z)) zeta(z-1)``.
The Riemann zeta function is evaluated here without special-function
libraries (only ``math.gamma`` for the reflection formula).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericError, PairingError, PoleError
from .kernels import richardson_zero

BORWEIN_TERMS = 60


@lru_cache(maxsize=None)
def _borwein_weights(n):
    # d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), exact integers
    terms = [n * math.factorial(n + i - 1) * 4**i // (math.factorial(n - i) * math.factorial(2 * i))
             for i in range(n + 1)]
    d = np.cumsum([float(t) for t in terms])
    return d


def _eta_alternating(s, n=BORWEIN_TERMS):
    d = _borwein_weights(n)
    k = np.arange(n)
    terms = (-1.0) ** k * (d[:n] - d[n]) / (k + 1.0) ** s
    return -math.fsum(terms) / d[n]


def riemann_zeta(s):
    """Riemann zeta at a real argument ``s != 1``.

    For ``s >= -1/2`` an accelerated alternating series gives the Dirichlet
    eta function and ``zeta = eta / (1 - 2^(1-s))``; smaller arguments use
    the reflection formula, which near ``s = 0`` would hit the pole at 1.
    """
    s = float(s)
    if abs(s - 1.0) <= 1e-8:
        raise PoleError("zeta has a pole at s = 1", residue=1.0)
    if s >= -0.5:
        return _eta_alternating(s) / (1.0 - 2.0 ** (1.0 - s))
    if s == round(s) and int(s) % 2 == 0:
        return 0.0
    return (2.0**s * math.pi ** (s - 1) * math.sin(math.pi * s / 2)
            * math.gamma(1 - s) * riemann_zeta(1 - s))


def zeta_S2(z):
    """Spectral zeta function of the Neumann-Poincare operator of the unit sphere."""
    z = float(z)
    if abs(z - 2.0) <= 1e-8:
        raise PoleError("zeta_S2 has a simple pole at z = 2", residue=0.5)
    if z == 1.0:
        return 0.0
    return (1.0 - 2.0 ** (1.0 - z)) * riemann_zeta(z - 1.0)


def zeta_S2_series(z, terms=2000):
    """Direct series ``sum (2n+1)^(1-z)`` for ``z > 2`` with an Euler-Maclaurin tail."""
    if z <= 2:
        raise DomainError("the direct series converges only for z > 2")
    p = z - 1.0
    n = np.arange(terms + 1)
    head = math.fsum((2.0 * n + 1.0) ** (-p))
    M = 2.0 * terms + 1.0
    # tail sum_{n > terms} f(n), f(x) = (2x+1)^(-p)
    tail = (M ** (1 - p) / (2 * (p - 1)) - 0.5 * M ** (-p)
            + (2 * p / 12) * M ** (-p - 1)
            - (8 * p * (p + 1) * (p + 2) / 720) * M ** (-p - 3))
    return head + tail


def derivative(func, x, h=1e-4, levels=4, tol=1e-9):
    """Central difference derivative with Richardson extrapolation in ``h^2``."""
    hs = h * 0.5 ** np.arange(levels)
    vals = [(func(x + hk) - func(x - hk)) / (2 * hk) for hk in hs]
    est, drift = richardson_zero(hs**2, vals)
    if drift > tol:
        raise NumericError(f"finite-difference derivative did not converge (drift {drift:.2e})")
    return est


@dataclass(frozen=True)
class ZetaDeterminant:
    det: float
    dzeta_S2_0: float
    dzeta_m1: float
    glaisher: float

    @property
    def closed_form(self):
        """``2^(1/6) e^(1/12) / G``, from differentiating the product formula."""
        return 2 ** (1 / 6) * math.exp(1 / 12) / self.glaisher

    @property
    def closed_form_stated(self):
        """``2^(-1/6) e^(1/12) / G``, the published form (sign of the log 2 term flipped)."""
        return 2 ** (-1 / 6) * math.exp(1 / 12) / self.glaisher

    @property
    def identity_derived(self):
        return -math.log(2) / 6 - 1 / 12 + math.log(self.glaisher)

    @property
    def identity_stated(self):
        return math.log(2) / 6 - 1 / 12 + math.log(self.glaisher)

    def to_dict(self):
        return {"det": self.det, "closed_form": self.closed_form,
                "closed_form_stated": self.closed_form_stated,
                "det_minus_closed_form": self.det - self.closed_form,
                "det_minus_closed_form_stated": self.det - self.closed_form_stated,
                "dzeta_S2_0": self.dzeta_S2_0, "dzeta_minus1": self.dzeta_m1,
                "glaisher": self.glaisher}


def zeta_determinant_sphere():
    """``det K = exp(-zeta_S2'(0))`` with Glaisher's constant from ``zeta'(-1)``."""
    d0 = derivative(zeta_S2, 0.0)
    dm1 = derivative(riemann_zeta, -1.0)
    G = math.exp(1 / 12 - dm1)
    return ZetaDeterminant(math.exp(-d0), d0, dm1, G)


# ---------------------------------------------------------------------------
# sphere spectrum and heat trace


@dataclass(frozen=True)
class SphereSpectrum:
    N: int

    def __post_init__(self):
        if self.N < 0:
            raise DomainError("truncation must be nonnegative")

    @property
    def degrees(self):
        return np.arange(self.N + 1)

    @property
    def eigenvalues(self):
        return 1.0 / (2 * self.degrees + 1.0)

    @property
    def multiplicities(self):
        return 2 * self.degrees + 1

    @property
    def single_layer_eigenvalues(self):
        """Eigenvalues of the single layer operator on the unit sphere."""
        return 1.0 / (2 * self.degrees + 1.0)

    def ratio(self):
        """Eigenvalue ratio ``lambda_n(K*) / lambda_n(S)``, identically one."""
        return self.eigenvalues / self.single_layer_eigenvalues

    def expanded(self, count=None):
        """Eigenvalues repeated by multiplicity, in decreasing order."""
        vals = np.repeat(self.eigenvalues, self.multiplicities)
        return vals if count is None else vals[:count]


@dataclass(frozen=True)
class HeatTraceFit:
    t: np.ndarray
    phi: np.ndarray
    a_m2: float
    a_m1: float
    a_0: float
    residual: float

    @property
    def residue(self):
        """Residue of zeta_S2 at 2 as ``a_{-2} / Gamma(2)``."""
        return self.a_m2

    @property
    def residue_stated(self):
        """The alternative normalization ``2 a_{-2}``."""
        return 2 * self.a_m2

    def to_dict(self):
        return {"a_minus2": self.a_m2, "a_minus1": self.a_m1, "a_0": self.a_0,
                "fit_residual": self.residual, "residue": self.residue,
                "residue_times_two": self.residue_stated, "known_residue": 0.5}


def heat_trace(t, N=None):
    """``phi(t) = sum_n (2n+1) exp(-(2n+1) t)`` truncated at degree ``N``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if N is None:
        N = int(math.ceil(37.0 / (2 * float(t.min())))) + 1
    k = 2.0 * np.arange(N + 1) + 1.0
    return np.array([math.fsum(k * np.exp(-k * tt)) for tt in t])


def heat_trace_residue(spectrum=None, t_grid=None):
    """Least-squares fit of ``a_{-2} t^-2 + a_{-1} t^-1 + a_0`` to the sphere heat trace."""
    if t_grid is None:
        t_grid = np.geomspace(0.005, 0.05, 12)
    t = np.asarray(t_grid, dtype=float)
    if t.size < 6 or np.any(t <= 0) or np.any(t > 0.5):
        raise DomainError("need at least 6 samples in (0, 0.5]")
    N_needed = int(math.ceil(37.0 / (2 * float(t.min()))))
    N = N_needed if spectrum is None else spectrum.N
    if N < N_needed:
        raise DomainError(f"truncation {N} too small for t_min = {t.min()}; need {N_needed}")
    phi = heat_trace(t, N)
    V = np.vander(t, 3, increasing=True)
    if np.linalg.cond(V) > 1e12:
        raise NumericError("heat-trace fit is ill-conditioned")
    coef, *_ = np.linalg.lstsq(V, t**2 * phi, rcond=None)
    resid = float(np.max(np.abs(V @ coef - t**2 * phi)) / abs(coef[0]))
    return HeatTraceFit(t, phi, float(coef[0]), float(coef[1]), float(coef[2]), resid)


# ---------------------------------------------------------------------------
# eta function


@dataclass(frozen=True)
class PairingReport:
    pairs: int
    max_pair_error: float
    top: float
    unmatched: tuple

    @property
    def ok(self):
        return not self.unmatched


def pairing_check(eigenvalues, tol=1e-8, resolve_tol=1e-8):
    """Check that the spectrum other than the eigenvalue 1 is symmetric under negation.

    Eigenvalues with modulus at most ``resolve_tol`` are regarded as unresolved.
    """
    ev = np.asarray(eigenvalues)
    if np.iscomplexobj(ev):
        if np.max(np.abs(ev.imag), initial=0.0) > tol:
            raise PairingError("spectrum has non-real eigenvalues")
        ev = ev.real
    ev = np.asarray(ev, dtype=float)
    top_idx = int(np.argmin(np.abs(ev - 1.0)))
    top = float(ev[top_idx])
    if abs(top - 1.0) > tol:
        raise PairingError(f"eigenvalue 1 not found (closest {top})")
    rest = np.delete(ev, top_idx)
    rest = rest[np.abs(rest) > resolve_tol]
    pos = np.sort(rest[rest > 0])[::-1]
    neg = np.sort(-rest[rest < 0])[::-1]
    m = min(len(pos), len(neg))
    err = float(np.max(np.abs(pos[:m] - neg[:m]), initial=0.0))
    leftover = np.concatenate((pos[m:], -neg[m:]))
    # a partner that fell just below the resolution threshold is acceptable
    unmatched = tuple(float(x) for x in leftover if abs(x) > resolve_tol + tol)
    if err > tol:
        unmatched = unmatched + (err,)
    return PairingReport(m, err, top, unmatched)


def eta_function(spectrum, s, tol=1e-8, resolve_tol=1e-8):
    """``eta(s) = sum sgn(lambda_j) |lambda_j|^(-s)``.

    For a ``SphereSpectrum`` (or the string ``"sphere"``) this is
    ``zeta_S2(-s)``.  For a finite planar spectrum the symmetry of the
    spectrum under negation is verified first; paired terms cancel and the
    eigenvalue 1 contributes 1.
    """
    if isinstance(spectrum, SphereSpectrum) or (isinstance(spectrum, str) and spectrum == "sphere"):
        return zeta_S2(-s)
    rep = pairing_check(spectrum, tol, resolve_tol)
    if not rep.ok:
        raise PairingError(f"spectrum is not symmetric under negation: {rep.unmatched}")
    return abs(rep.top) ** (-s)


def eta_sphere_series(s, terms=2000):
    """Direct series for the sphere eta function where it converges (``s < -2``)."""
    return zeta_S2_series(-s, terms)
