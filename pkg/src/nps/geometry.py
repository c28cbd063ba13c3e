"""Smooth closed boundaries: planar curves and surfaces of revolution.

Planar curves are 2*pi-periodic parametrizations oriented counterclockwise,
so the outward normal is the tangent rotated clockwise.  Surfaces of
revolution are generated by a meridian profile ``(rho(u), z(u))`` on
``[0, pi]`` closing at both poles (genus 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar
from scipy.spatial.distance import pdist

from .errors import GeometryError, ParameterError

CURVE_FAMILIES = ("circle", "ellipse", "kite", "star", "fourier")
SURFACE_FAMILIES = ("sphere", "spheroid", "fourier")

# positivity of the 2D single layer operator is guaranteed below this diameter
TARGET_DIAMETER = 0.5


def _params_key(params):
    return tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple)) else v)
                        for k, v in params.items()))


# ---------------------------------------------------------------------------
# planar curves


@dataclass(frozen=True)
class CurvePoint:
    position: np.ndarray
    tangent: np.ndarray
    outward_normal: np.ndarray
    curvature: float
    speed: float


@dataclass(frozen=True, eq=False)
class Curve2D:
    """Parametrized smooth closed planar curve.

    ``params`` by family: circle ``r``; ellipse ``a, b``; kite (none);
    star ``k, eps`` (radius ``1 + eps cos(k t)``, ``|eps| < 1``); fourier
    ``coeffs = [c0, a1, b1, a2, b2, ...]`` for the radius
    ``c0 + sum a_k cos(kt) + b_k sin(kt)``, which must stay positive.
    """

    family: str
    params: dict = field(default_factory=dict)
    scale: float = 1.0

    def __post_init__(self):
        _validate_curve(self.family, self.params, self.scale)

    def __eq__(self, other):
        return (isinstance(other, Curve2D) and self.family == other.family
                and _params_key(self.params) == _params_key(other.params)
                and self.scale == other.scale)

    def __hash__(self):
        return hash((self.family, _params_key(self.params), self.scale))

    # constructors
    @classmethod
    def circle(cls, r=1.0):
        return cls("circle", {"r": float(r)})

    @classmethod
    def ellipse(cls, a=1.0, b=0.5):
        return cls("ellipse", {"a": float(a), "b": float(b)})

    @classmethod
    def kite(cls):
        return cls("kite", {})

    @classmethod
    def star(cls, k=5, eps=0.2):
        return cls("star", {"k": int(k), "eps": float(eps)})

    @classmethod
    def fourier(cls, coeffs):
        return cls("fourier", {"coeffs": [float(c) for c in coeffs]})

    def scaled(self, factor):
        return Curve2D(self.family, dict(self.params), self.scale * float(factor))

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params), "scale": self.scale}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], dict(d.get("params", {})), float(d.get("scale", 1.0)))

    def derivatives(self, t):
        """Position and first two parameter derivatives, each of shape (m, 2)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c, s = np.cos(t), np.sin(t)
        p = self.params
        if self.family == "circle":
            r = p["r"]
            x = r * np.stack([c, s], -1)
            dx = r * np.stack([-s, c], -1)
            ddx = -x
        elif self.family == "ellipse":
            a, b = p["a"], p["b"]
            x = np.stack([a * c, b * s], -1)
            dx = np.stack([-a * s, b * c], -1)
            ddx = -x
        elif self.family == "kite":
            c2, s2 = np.cos(2 * t), np.sin(2 * t)
            x = np.stack([c + 0.65 * c2 - 0.65, 1.5 * s], -1)
            dx = np.stack([-s - 1.3 * s2, 1.5 * c], -1)
            ddx = np.stack([-c - 2.6 * c2, -1.5 * s], -1)
        else:
            r, dr, ddr = self._radius(t)
            x = np.stack([r * c, r * s], -1)
            dx = np.stack([dr * c - r * s, dr * s + r * c], -1)
            ddx = np.stack([ddr * c - 2 * dr * s - r * c,
                            ddr * s + 2 * dr * c - r * s], -1)
        k = self.scale
        return k * x, k * dx, k * ddx

    def _radius(self, t):
        return _radial(self.family, self.params, t)

    def frame(self, t):
        """Vectorized boundary data: positions, unit tangents, outward normals,
        curvature and speed at the parameters ``t``."""
        x, dx, ddx = self.derivatives(t)
        speed = np.hypot(dx[:, 0], dx[:, 1])
        tangent = dx / speed[:, None]
        normal = np.stack([tangent[:, 1], -tangent[:, 0]], -1)
        curvature = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / speed**3
        return x, tangent, normal, curvature, speed

    def length(self, n=512):
        t = 2 * np.pi * np.arange(n) / n
        return float(np.sum(self.frame(t)[4]) * 2 * np.pi / n)


def _radial(family, params, t):
    """Radius of a star-shaped family and its first two derivatives."""
    if family == "star":
        k, eps = params["k"], params["eps"]
        return (1 + eps * np.cos(k * t), -eps * k * np.sin(k * t),
                -eps * k * k * np.cos(k * t))
    coeffs = list(params["coeffs"])
    if len(coeffs) % 2 == 0:
        coeffs.append(0.0)
    r = np.full_like(t, coeffs[0])
    dr = np.zeros_like(t)
    ddr = np.zeros_like(t)
    for k in range(1, (len(coeffs) - 1) // 2 + 1):
        a, b = coeffs[2 * k - 1], coeffs[2 * k]
        ck, sk = np.cos(k * t), np.sin(k * t)
        r += a * ck + b * sk
        dr += k * (-a * sk + b * ck)
        ddr -= k * k * (a * ck + b * sk)
    return r, dr, ddr


def _validate_curve(family, params, scale):
    if family not in CURVE_FAMILIES:
        raise ParameterError(f"unknown curve family {family!r}; expected one of {CURVE_FAMILIES}")
    if not scale > 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    try:
        if family == "circle":
            if not params["r"] > 0:
                raise ParameterError(f"circle radius must be positive, got {params['r']}")
        elif family == "ellipse":
            if not (params["a"] > 0 and params["b"] > 0):
                raise ParameterError(f"ellipse semi-axes must be positive, got {params}")
        elif family == "star":
            if int(params["k"]) < 1 or not abs(params["eps"]) < 1:
                raise ParameterError(f"star needs k >= 1 and |eps| < 1, got {params}")
        elif family == "fourier":
            coeffs = params["coeffs"]
            if len(coeffs) < 1:
                raise ParameterError("fourier curve needs at least c0")
            t = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
            if np.min(_radial(family, params, t)[0]) <= 0:
                raise ParameterError("fourier radius must stay positive")
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc} for {family}") from None


def curve_point(curve, t):
    x, tau, nu, kappa, speed = curve.frame(np.array([float(t)]))
    return CurvePoint(x[0], tau[0], nu[0], float(kappa[0]), float(speed[0]))


def diameter(curve, samples=1024):
    t = 2 * np.pi * np.arange(samples) / samples
    return float(np.max(pdist(curve.derivatives(t)[0])))


def rescale_for_positivity(curve):
    """Shrink ``curve`` so its diameter is at most 1/2.

    Returns the (possibly unchanged) curve and the applied factor.  The
    Neumann-Poincare spectrum is invariant under this rescaling; only
    single-layer quantities change.
    """
    d = diameter(curve)
    if d <= TARGET_DIAMETER * (1 + 1e-12):
        return curve, 1.0
    factor = TARGET_DIAMETER / d
    return curve.scaled(factor), factor


def winding_number(curve, points, n=2048):
    """Winding number of ``curve`` around each point (1 inside, 0 outside)."""
    t = 2 * np.pi * np.arange(n + 1) / n
    x = curve.derivatives(t)[0]
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    z = (x[:, 0] + 1j * x[:, 1])[None, :] - (pts[:, 0] + 1j * pts[:, 1])[:, None]
    ang = np.angle(z[:, 1:] / z[:, :-1])
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


# ---------------------------------------------------------------------------
# surfaces of revolution


@dataclass(frozen=True, eq=False)
class SurfaceRev:
    """Genus-0 surface of revolution about the z axis.

    Families: sphere ``r``; spheroid ``a`` (equatorial), ``c`` (polar);
    fourier ``r, coeffs`` with meridian radius ``r (1 + sum e_k cos(k u))``.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in SURFACE_FAMILIES:
            raise ParameterError(f"unknown surface family {self.family!r}")
        p = self.params
        try:
            if self.family == "sphere" and not p["r"] > 0:
                raise ParameterError("sphere radius must be positive")
            if self.family == "spheroid" and not (p["a"] > 0 and p["c"] > 0):
                raise ParameterError("spheroid semi-axes must be positive")
            if self.family == "fourier":
                if not p["r"] > 0:
                    raise ParameterError("fourier surface needs r > 0")
                u = np.linspace(0, np.pi, 2049)
                if np.min(self._radius(u)[0]) <= 0:
                    raise ParameterError("meridian radius must stay positive")
        except KeyError as exc:
            raise ParameterError(f"missing parameter {exc} for {self.family}") from None

    def __eq__(self, other):
        return (isinstance(other, SurfaceRev) and self.family == other.family
                and _params_key(self.params) == _params_key(other.params))

    def __hash__(self):
        return hash((self.family, _params_key(self.params)))

    @classmethod
    def sphere(cls, r=1.0):
        return cls("sphere", {"r": float(r)})

    @classmethod
    def spheroid(cls, a=1.0, c=2.0):
        return cls("spheroid", {"a": float(a), "c": float(c)})

    @classmethod
    def fourier(cls, coeffs, r=1.0):
        return cls("fourier", {"r": float(r), "coeffs": [float(e) for e in coeffs]})

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params), "scale": 1.0}

    @classmethod
    def from_dict(cls, d):
        params = dict(d.get("params", {}))
        s = float(d.get("scale", 1.0))
        if s != 1.0:
            for key in ("r", "a", "c"):
                if key in params:
                    params[key] = params[key] * s
        return cls(d["family"], params)

    def _radius(self, u):
        p = self.params
        if self.family == "sphere":
            r = p["r"]
            return np.full_like(u, r), np.zeros_like(u), np.zeros_like(u)
        r = p["r"]
        R, dR, ddR = np.ones_like(u), np.zeros_like(u), np.zeros_like(u)
        for k, e in enumerate(p["coeffs"], start=1):
            R += e * np.cos(k * u)
            dR -= e * k * np.sin(k * u)
            ddR -= e * k * k * np.cos(k * u)
        return r * R, r * dR, r * ddR

    def profile(self, u):
        """``(rho, z)`` and their first two derivatives in ``u``."""
        u = np.asarray(u, dtype=float)
        c, s = np.cos(u), np.sin(u)
        if self.family == "spheroid":
            a, cc = self.params["a"], self.params["c"]
            return (a * s, -cc * c), (a * c, cc * s), (-a * s, cc * c)
        R, dR, ddR = self._radius(u)
        rho, z = R * s, -R * c
        drho, dz = dR * s + R * c, -dR * c + R * s
        ddrho = ddR * s + 2 * dR * c - R * s
        ddz = -ddR * c + 2 * dR * s + R * c
        return (rho, z), (drho, dz), (ddrho, ddz)

    def principal_curvatures(self, u):
        """Meridian and parallel curvatures (positive on a sphere)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        (rho, _), (dr, dz), (ddr, ddz) = self.profile(u)
        speed = np.hypot(dr, dz)
        k_mer = (dr * ddz - ddr * dz) / speed**3
        near_pole = (u < 1e-6) | (np.pi - u < 1e-6)
        with np.errstate(divide="ignore", invalid="ignore"):
            k_par = np.where(near_pole, ddz / (dr * speed), dz / (rho * speed))
        return k_mer, k_par

    def check_poles(self):
        (_, _), (dr, _), _ = self.profile(np.array([0.0, np.pi]))
        if np.min(np.abs(dr)) < 1e-12:
            raise GeometryError("profile is degenerate at a pole (rho' vanishes)")


@dataclass(frozen=True)
class ShapeConstants:
    area: float
    willmore: float
    euler_char: int
    kappa_minus: float
    kappa_plus: float
    kappa_tilde_minus: float
    kappa_tilde_plus: float
    c_S: float
    c_K: float
    c_gamma: float

    def to_dict(self):
        return dict(self.__dict__)


def _extremum(fun, u, sign):
    """Global extremum of ``sign * fun`` maximized, dense grid plus refinement."""
    vals = sign * fun(u)
    i = int(np.argmax(vals))
    best = vals[i]
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: -sign * fun(np.array([x]))[0], bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best = -res.fun
    return sign * best


def shape_constants(surface, quadrature_order=64, samples=4096):
    """Area, Willmore energy, curvature extrema and the asymptotic constants."""
    if quadrature_order < 16:
        raise ParameterError("quadrature_order must be at least 16")
    surface.check_poles()
    x, w = leggauss(quadrature_order)
    u = 0.5 * np.pi * (x + 1)
    w = 0.5 * np.pi * w
    (rho, _), (dr, dz), _ = surface.profile(u)
    dS = 2 * np.pi * rho * np.hypot(dr, dz)
    k1, k2 = surface.principal_curvatures(u)
    H = 0.5 * (k1 + k2)
    area = float(np.dot(w, dS))
    willmore = float(np.dot(w, H**2 * dS))
    chi = 2

    grid = np.linspace(0.0, np.pi, samples)

    def kmin(v):
        a, b = surface.principal_curvatures(v)
        return np.minimum(a, b)

    def kmax(v):
        a, b = surface.principal_curvatures(v)
        return np.maximum(a, b)

    def ktilde_lo(v):
        a, b = surface.principal_curvatures(v)
        return a + b - np.maximum(a, b)

    def ktilde_hi(v):
        a, b = surface.principal_curvatures(v)
        return a + b - np.minimum(a, b)

    kappa_minus = _extremum(kmin, grid, -1)
    kappa_plus = _extremum(kmax, grid, 1)
    kt_minus = _extremum(ktilde_lo, grid, -1)
    kt_plus = _extremum(ktilde_hi, grid, 1)

    c_S = math.sqrt(area / (16 * math.pi))
    c_K = math.sqrt((3 * willmore - 2 * math.pi * chi) / (32 * math.pi))
    return ShapeConstants(area, willmore, chi, kappa_minus, kappa_plus,
                          kt_minus, kt_plus, c_S, c_K, c_K / c_S)


def spheroid_area(a, c):
    """Closed-form area of the spheroid with equatorial ``a`` and polar ``c``."""
    if math.isclose(a, c):
        return 4 * math.pi * a * a
    if c > a:
        e = math.sqrt(1 - a * a / (c * c))
        return 2 * math.pi * a * a * (1 + c / (a * e) * math.asin(e))
    e = math.sqrt(1 - c * c / (a * a))
    return 2 * math.pi * a * a * (1 + (1 - e * e) / e * math.atanh(e))


@dataclass(frozen=True)
class SymbolQuery:
    """Point ``(u, azimuth)`` on a surface of revolution and a unit covector
    at angle ``theta`` from the meridian direction."""

    u: float
    azimuth: float = 0.0
    theta: float = 0.0


def symbol_A(surface, query):
    """Principal symbol of the order-0 factor at a unit covector.

    Equals ``k1 + k2 - (k1 cos^2 theta + k2 sin^2 theta)`` in the
    principal frame (k1 meridian, k2 parallel).
    """
    k1, k2 = surface.principal_curvatures(np.array([query.u]))
    k1, k2 = float(k1[0]), float(k2[0])
    c2 = math.cos(query.theta) ** 2
    return k1 + k2 - (k1 * c2 + k2 * (1 - c2))


def ess_range(surface, samples=4096):
    """Range of the principal symbol over the cosphere bundle as merged intervals.

    The outermost endpoints are refined to the true extrema.
    """
    u = np.linspace(0.0, np.pi, samples)

    def lo_fun(v):
        a, b = surface.principal_curvatures(v)
        return a + b - np.maximum(a, b)

    def hi_fun(v):
        a, b = surface.principal_curvatures(v)
        return a + b - np.minimum(a, b)

    lo, hi = lo_fun(u), hi_fun(u)
    tol = max(np.max(np.abs(np.diff(lo))), np.max(np.abs(np.diff(hi))), 1e-14)
    order = np.argsort(lo)
    merged = []
    for i in order:
        a, b = float(lo[i]), float(hi[i])
        if merged and a <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    merged[0][0] = min(merged[0][0], _extremum(lo_fun, u, -1))
    merged[-1][1] = max(merged[-1][1], _extremum(hi_fun, u, 1))
    return [tuple(iv) for iv in merged]


@dataclass(frozen=True)
class WillmoreReport:
    kappa_minus: float
    middle: float
    kappa_plus: float
    slack_low: float
    slack_high: float
    order_drift: float
    ok: bool

    def to_dict(self):
        return dict(self.__dict__)


def willmore_inequality_check(surface, orders=(64, 128), tol=1e-10):
    """Check kappa_- <= sqrt((3W - 2 pi chi)/(2 Area)) <= kappa_+ at two orders."""
    consts = [shape_constants(surface, q) for q in orders]
    mids = [math.sqrt(max(3 * c.willmore - 2 * math.pi * c.euler_char, 0.0) / (2 * c.area))
            for c in consts]
    c = consts[-1]
    mid = mids[-1]
    lo_slack = mid - c.kappa_minus
    hi_slack = c.kappa_plus - mid
    ok = lo_slack >= -tol and hi_slack >= -tol
    return WillmoreReport(c.kappa_minus, mid, c.kappa_plus, lo_slack, hi_slack,
                          abs(mids[-1] - mids[0]), bool(ok))
