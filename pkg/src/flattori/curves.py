"""Closed regular curves on S^2 with exact derivatives.

Curves are defined by exact trigonometric-polynomial plane data pulled back
through the inverse stereographic projection from the north pole,

    p^-1(u, v) = (2u, 2v, u^2 + v^2 - 1) / (u^2 + v^2 + 1),

or directly as circles; all derivatives flow through truncated Taylor jets, so
geodesic curvature and normals carry no finite-difference noise.  The
admissible reparametrization rescales a curve so that |gamma'|^2 (1 + kappa^2)
equals 4, which makes its lift to S^3 unit speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import jets
from .errors import AnalysisError, ParallelSingularError, SpecError

# 7-point Gauss-Legendre rule on [0, 1], used for local quadrature corrections.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def inverse_stereographic(u, v):
    """Pull plane points back to S^2 (projection pole at (0,0,1))."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r2 = u * u + v * v
    return np.stack([2 * u, 2 * v, r2 - 1.0], axis=-1) / (r2 + 1.0)[..., None]


def stereographic(points, pole_tol: float = 1e-9):
    """Project S^2 points to the plane; rejects points at the north pole."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    denom = 1.0 - p[..., 2]
    if np.any(denom < pole_tol):
        raise AnalysisError("stereographic projection: point too close to the pole")
    return p[..., :2] / denom[..., None]


class SphericalCurve:
    """Base class: a closed curve on S^2 with jet evaluation.

    Subclasses implement ``jet(t, order) -> (n, 3, order+1)`` returning Taylor
    coefficients of gamma about each of the n parameter values.
    """

    period: float

    def jet(self, t, order: int) -> np.ndarray:
        raise NotImplementedError

    # -- pointwise geometry ------------------------------------------------

    def _jet2(self, t):
        return self.jet(t, 2)

    def point(self, t):
        out = self.jet(np.atleast_1d(t), 0)[..., 0]
        return out[0] if np.ndim(t) == 0 else out

    def velocity(self, t):
        out = jets.coefficient_to_derivative(self.jet(np.atleast_1d(t), 1), 1)
        return out[0] if np.ndim(t) == 0 else out

    def accel(self, t):
        out = jets.coefficient_to_derivative(self.jet(np.atleast_1d(t), 2), 2)
        return out[0] if np.ndim(t) == 0 else out

    def speed(self, t):
        return np.linalg.norm(self.velocity(t), axis=-1)

    def unit_tangent(self, t):
        v = self.velocity(t)
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def normal(self, t):
        """Unit normal n = gamma x gamma' / |gamma'| (the leftward normal)."""
        j = self._jet2(np.atleast_1d(t))
        g = j[..., 0]
        v = jets.coefficient_to_derivative(j, 1)
        n = np.cross(g, v)
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        return n[0] if np.ndim(t) == 0 else n

    def curvature(self, t):
        """Geodesic curvature det(gamma, gamma', gamma'') / |gamma'|^3."""
        j = self._jet2(np.atleast_1d(t))
        g = j[..., 0]
        v = jets.coefficient_to_derivative(j, 1)
        a = jets.coefficient_to_derivative(j, 2)
        det = np.einsum("ni,ni->n", g, np.cross(v, a))
        out = det / np.linalg.norm(v, axis=-1) ** 3
        return float(out[0]) if np.ndim(t) == 0 else out

    def curvature_jet(self, t, order: int) -> np.ndarray:
        """kappa as a jet of the given order (exact derivatives of kappa)."""
        g = self.jet(np.atleast_1d(t), order + 2)
        d1 = jets.derivative(g)
        d2 = jets.derivative(d1)
        K = order + 1
        det = jets.det3(g[..., :K], d1[..., :K], d2[..., :K])
        speed2 = jets.dot3(d1[..., :K], d1[..., :K])
        speed = jets.sqrt(speed2)
        speed3 = jets.mul(speed2, speed)
        return jets.div(det, speed3)

    def admissible_density(self, t):
        """Integrand of the admissible parameter: |gamma'| sqrt(1 + kappa^2) / 2."""
        scalar = np.ndim(t) == 0
        j = self._jet2(np.atleast_1d(t))
        g = j[..., 0]
        v = jets.coefficient_to_derivative(j, 1)
        a = jets.coefficient_to_derivative(j, 2)
        speed = np.linalg.norm(v, axis=-1)
        kappa = np.einsum("ni,ni->n", g, np.cross(v, a)) / speed**3
        out = 0.5 * speed * np.sqrt(1.0 + kappa**2)
        return float(out[0]) if scalar else out

    # -- derived curves ----------------------------------------------------

    def reversed(self) -> "SphericalCurve":
        return ReversedCurve(self)

    def rotated(self, R: np.ndarray) -> "SphericalCurve":
        return RotatedCurve(self, R)

    def validate(self, samples: int = 512, tol: float = 1e-9):
        """Check the closed regular spherical-curve invariants on a dense sample."""
        t = np.linspace(0.0, self.period, samples, endpoint=False)
        j = self.jet(t, 1)
        g = j[..., 0]
        v = jets.coefficient_to_derivative(j, 1)
        norm_defect = np.max(np.abs(np.einsum("ni,ni->n", g, g) - 1.0))
        tang_defect = np.max(np.abs(np.einsum("ni,ni->n", g, v)))
        if norm_defect > tol or tang_defect > 2 * tol * np.max(np.linalg.norm(v, axis=1)):
            raise AnalysisError(
                f"curve leaves the sphere: |gamma|-1 defect {norm_defect:.2e}, "
                f"<gamma,gamma'> defect {tang_defect:.2e}"
            )
        speeds = np.linalg.norm(v, axis=1)
        if speeds.min() <= 1e-8:
            raise AnalysisError(f"curve is irregular: min speed {speeds.min():.2e}")
        closure = np.linalg.norm(self.point(self.period) - self.point(0.0))
        if closure > 1e-8:
            raise AnalysisError(f"curve does not close up: defect {closure:.2e}")


class ReversedCurve(SphericalCurve):
    """Orientation reversal t -> gamma(-t); flips curvature and shell signs."""

    def __init__(self, base: SphericalCurve):
        self.base = base
        self.period = base.period

    def jet(self, t, order):
        j = self.base.jet(-np.atleast_1d(np.asarray(t, dtype=float)), order)
        signs = (-1.0) ** np.arange(order + 1)
        return j * signs

    def reversed(self):
        return self.base


class RotatedCurve(SphericalCurve):
    def __init__(self, base: SphericalCurve, R: np.ndarray):
        self.base = base
        self.R = np.asarray(R, dtype=float)
        self.period = base.period

    def jet(self, t, order):
        return np.einsum("ij,njk->nik", self.R, self.base.jet(t, order))


class CircleCurve(SphericalCurve):
    """Circle of constant geodesic curvature kappa0 centered at e3.

    gamma(t) = sin(r) (cos t, sin t, 0) + cos(r) e3 with cot(r) = kappa0; the
    orientation makes the curvature +kappa0 (not -kappa0).
    """

    def __init__(self, kappa0: float):
        self.kappa0 = float(kappa0)
        self.r = math.atan2(1.0, self.kappa0)  # arccot on (0, pi)
        self.period = 2.0 * math.pi

    def jet(self, t, order):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        sr, cr = math.sin(self.r), math.cos(self.r)
        x = sr * jets.cos_linear(t, 1.0, 0.0, order)
        y = sr * jets.sin_linear(t, 1.0, 0.0, order)
        z = jets.constant(np.full(t.shape, cr), order)
        return np.stack([x, y, z], axis=-2)


def circle_curve(kappa0: float) -> CircleCurve:
    return CircleCurve(kappa0)


@dataclass(frozen=True)
class TrigPolyPlaneSpec:
    """Trigonometric-polynomial plane curve, the seed of every pullback curve.

    Coefficient arrays are indexed by frequency (index k multiplies cos(kt) or
    sin(kt)); ``scale``, ``rotation`` and ``translation`` act in the plane.
    """

    x_cos: tuple = ()
    x_sin: tuple = ()
    y_cos: tuple = ()
    y_sin: tuple = ()
    scale: float = 1.0
    rotation: float = 0.0
    translation: tuple = (0.0, 0.0)

    def __post_init__(self):
        for name in ("x_cos", "x_sin", "y_cos", "y_sin"):
            object.__setattr__(self, name, tuple(float(c) for c in getattr(self, name)))
        object.__setattr__(self, "translation", tuple(float(c) for c in self.translation))
        if self.scale <= 0:
            raise SpecError("trig_poly_plane: scale must be positive")
        moving = any(
            any(abs(c) > 0 for c in coeffs[1:])
            for coeffs in (self.x_cos, self.x_sin, self.y_cos, self.y_sin)
        )
        if not moving:
            raise SpecError("trig_poly_plane: needs a nonzero coefficient of frequency >= 1")

    def plane_jet(self, t, order: int) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.zeros(t.shape + (order + 1,))
        y = np.zeros(t.shape + (order + 1,))
        for k, c in enumerate(self.x_cos):
            if c:
                x += c * jets.cos_linear(t, float(k), 0.0, order)
        for k, c in enumerate(self.x_sin):
            if c:
                x += c * jets.sin_linear(t, float(k), 0.0, order)
        for k, c in enumerate(self.y_cos):
            if c:
                y += c * jets.cos_linear(t, float(k), 0.0, order)
        for k, c in enumerate(self.y_sin):
            if c:
                y += c * jets.sin_linear(t, float(k), 0.0, order)
        cphi, sphi = math.cos(self.rotation), math.sin(self.rotation)
        xr = self.scale * (cphi * x - sphi * y)
        yr = self.scale * (sphi * x + cphi * y)
        xr[..., 0] += self.translation[0]
        yr[..., 0] += self.translation[1]
        return np.stack([xr, yr], axis=-2)

    def to_json(self) -> dict:
        return {
            "version": 1,
            "kind": "trig_poly_plane",
            "x_cos": list(self.x_cos),
            "x_sin": list(self.x_sin),
            "y_cos": list(self.y_cos),
            "y_sin": list(self.y_sin),
            "scale": self.scale,
            "rotation": self.rotation,
            "translation": list(self.translation),
        }


class TrigPolyPullbackCurve(SphericalCurve):
    """Stereographic pullback of a TrigPolyPlaneSpec to S^2."""

    def __init__(self, spec: TrigPolyPlaneSpec):
        self.spec = spec
        self.period = 2.0 * math.pi
        t = np.linspace(0.0, self.period, 1024, endpoint=False)
        pj = spec.plane_jet(t, 1)
        dp = jets.coefficient_to_derivative(pj, 1)
        if np.linalg.norm(dp, axis=-1).min() <= 1e-8:
            raise SpecError("trig_poly_plane: plane curve is irregular (|sigma'| vanishes)")

    def jet(self, t, order):
        pj = self.spec.plane_jet(t, order)
        u, v = pj[..., 0, :], pj[..., 1, :]
        r2 = jets.mul(u, u) + jets.mul(v, v)
        denom = r2.copy()
        denom[..., 0] += 1.0
        num_z = r2.copy()
        num_z[..., 0] -= 1.0
        return np.stack(
            [jets.div(2.0 * u, denom), jets.div(2.0 * v, denom), jets.div(num_z, denom)],
            axis=-2,
        )


def build_spherical(spec: TrigPolyPlaneSpec) -> SphericalCurve:
    """Pull a validated plane spec back to a spherical curve."""
    curve = TrigPolyPullbackCurve(spec)
    curve.validate()
    return curve


class ParallelCurve(SphericalCurve):
    """Parallel curve gamma^theta = cos(theta) gamma + sin(theta) n."""

    def __init__(self, base: SphericalCurve, theta: float, check_samples: int = 1024):
        self.base = base
        self.theta = float(theta)
        self.period = base.period
        t = np.linspace(0.0, base.period, check_samples, endpoint=False)
        factor = math.cos(self.theta) - base.curvature(t) * math.sin(self.theta)
        bad = np.abs(factor) < 1e-8
        if np.any(bad) or factor.min() * factor.max() <= 0:
            bad = bad | (np.abs(factor) <= np.abs(factor).min() * 1.001)
            lo, hi = t[bad].min(), t[bad].max()
            raise ParallelSingularError(
                f"parallel curve singular: cos(theta) - kappa sin(theta) vanishes "
                f"for t in [{lo:.6f}, {hi:.6f}] (theta={self.theta:.6f})"
            )

    def jet(self, t, order):
        g = self.base.jet(t, order + 1)
        d1 = jets.derivative(g)
        n = jets.cross3(g[..., :order + 1], d1)
        speed = jets.sqrt(jets.dot3(d1, d1))[..., None, :]
        n = jets.div(n, speed)
        return math.cos(self.theta) * g[..., :order + 1] + math.sin(self.theta) * n


def parallel_curve(c: SphericalCurve, theta: float) -> SphericalCurve:
    if theta == 0.0:
        return c
    return ParallelCurve(c, theta)


# ---------------------------------------------------------------------------
# Admissible reparametrization
# ---------------------------------------------------------------------------


class AdmissibleCurve:
    """A closed curve in the parameter with |gamma'|^2 (1 + kappa^2) = 4.

    Wraps a base SphericalCurve with the monotone parameter maps s_of_t /
    t_of_s.  Geometry (points, tangents, normals, curvature) is exposed in the
    admissible parameter; curvature and normals are parameter-invariant and
    come straight from the base curve.
    """

    def __init__(self, base: SphericalCurve, nodes: int = 4096):
        base.validate()
        self.base = base
        d = base.period
        self.period_t = d
        n = nodes
        self._t_nodes = np.linspace(0.0, d, n + 1)
        w = base.admissible_density(self._t_nodes)
        if np.any(~np.isfinite(w)) or w.min() <= 0:
            raise AnalysisError("admissible reparametrization: integrand not positive")
        # cumulative composite Simpson on a doubled grid
        mid = base.admissible_density(0.5 * (self._t_nodes[:-1] + self._t_nodes[1:]))
        h = d / n
        increments = (h / 6.0) * (w[:-1] + 4.0 * mid + w[1:])
        self._s_nodes = np.concatenate([[0.0], np.cumsum(increments)])
        self.period_l = float(self._s_nodes[-1])
        self._t_of_s_interp = PchipInterpolator(self._s_nodes, self._t_nodes)
        self._t_memo = None
        ks = base.curvature(np.linspace(0.0, d, 4096, endpoint=False))
        self.kappa_min = float(ks.min())
        self.kappa_max = float(ks.max())

    # -- parameter maps ----------------------------------------------------

    def s_of_t(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        d = self.period_t
        wraps = np.floor(t / d)
        t0 = t - wraps * d
        k = np.clip(np.searchsorted(self._t_nodes, t0, side="right") - 1, 0, len(self._t_nodes) - 2)
        tk = self._t_nodes[k]
        span = t0 - tk
        s = self._s_nodes[k].copy()
        # local Gauss-Legendre correction from the table node
        nodes = tk[:, None] + span[:, None] * _GL_X[None, :]
        vals = self.base.admissible_density(nodes.ravel()).reshape(nodes.shape)
        s += span * (vals @ _GL_W)
        s += wraps * self.period_l
        return float(s[0]) if scalar else s

    def t_of_s(self, s):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        if scalar and self._t_memo is not None and self._t_memo[0] == float(s):
            return self._t_memo[1]
        s = np.atleast_1d(s)
        L = self.period_l
        wraps = np.floor(s / L)
        s0 = s - wraps * L
        t = np.clip(self._t_of_s_interp(s0), 0.0, self.period_t)
        for _ in range(3):
            t -= (self.s_of_t(t) - s0) / self.base.admissible_density(t)
            np.clip(t, 0.0, self.period_t, out=t)
        t += wraps * self.period_t
        if scalar:
            out = float(t[0])
            self._t_memo = (float(s[0]), out)
            return out
        return t

    # -- geometry in the admissible parameter --------------------------------

    @property
    def period(self):
        return self.period_l

    def point(self, s):
        return self.base.point(self.t_of_s(s))

    def velocity(self, s):
        t = self.t_of_s(s)
        v = self.base.velocity(t)
        w = self.base.admissible_density(t)
        return v / w if np.ndim(s) == 0 else v / w[:, None]

    def speed(self, s):
        return np.linalg.norm(self.velocity(s), axis=-1)

    def unit_tangent(self, s):
        return self.base.unit_tangent(self.t_of_s(s))

    def normal(self, s):
        return self.base.normal(self.t_of_s(s))

    def curvature(self, s):
        return self.base.curvature(self.t_of_s(s))

    def rotated(self, R: np.ndarray) -> "AdmissibleCurve":
        """Rotate by R in SO(3); the parameter maps are rotation invariant."""
        out = object.__new__(AdmissibleCurve)
        out.__dict__.update(self.__dict__)
        out.base = self.base.rotated(R)
        return out

    def validate_normalization(self, samples: int = 512, tol: float = 1e-6):
        s = np.linspace(0.0, self.period_l, samples, endpoint=False)
        value = self.speed(s) ** 2 * (1.0 + self.curvature(s) ** 2)
        defect = np.max(np.abs(value - 4.0))
        if defect > tol:
            raise AnalysisError(f"admissible normalization defect {defect:.2e}")
        closure = np.linalg.norm(self.point(self.period_l) - self.point(0.0))
        if closure > 1e-8:
            raise AnalysisError(f"admissible curve closure defect {closure:.2e}")


def reparametrize_admissible(c: SphericalCurve, nodes: int = 4096) -> AdmissibleCurve:
    out = AdmissibleCurve(c, nodes=nodes)
    out.validate_normalization()
    return out


class ParallelAdmissible:
    """Parallel curve of an admissible curve, in the same (still admissible) parameter.

    The derivative relation (gamma^theta)' = (cos theta - kappa sin theta) gamma'
    keeps the admissible normalization, so no reparametrization is needed; the
    curvature comes from the closed-form parallel-curvature identity.
    """

    def __init__(self, base: AdmissibleCurve, theta: float, check_samples: int = 2048):
        self.base_adm = base
        self.theta = float(theta)
        self.period_l = base.period_l
        s = np.linspace(0.0, base.period_l, check_samples, endpoint=False)
        factor = math.cos(theta) - base.curvature(s) * math.sin(theta)
        if np.min(np.abs(factor)) < 1e-8 or factor.min() * factor.max() <= 0:
            bad = s[np.abs(factor) <= np.abs(factor).min() * 1.001]
            raise ParallelSingularError(
                f"parallel curve singular for s in [{bad.min():.6f}, {bad.max():.6f}] "
                f"(theta={theta:.6f})"
            )
        self.epsilon = 1.0 if factor[0] > 0 else -1.0
        ks = self.curvature(s)
        self.kappa_min = float(ks.min())
        self.kappa_max = float(ks.max())

    @property
    def period(self):
        return self.period_l

    def _factor(self, s):
        return math.cos(self.theta) - self.base_adm.curvature(s) * math.sin(self.theta)

    def point(self, s):
        b = self.base_adm
        return math.cos(self.theta) * b.point(s) + math.sin(self.theta) * b.normal(s)

    def velocity(self, s):
        f = self._factor(s)
        v = self.base_adm.velocity(s)
        return f * v if np.ndim(s) == 0 else f[:, None] * v

    def speed(self, s):
        return np.abs(self._factor(s)) * self.base_adm.speed(s)

    def unit_tangent(self, s):
        return self.epsilon * self.base_adm.unit_tangent(s)

    def normal(self, s):
        b = self.base_adm
        return self.epsilon * (
            math.cos(self.theta) * b.normal(s) - math.sin(self.theta) * b.point(s)
        )

    def curvature(self, s):
        k = self.base_adm.curvature(s)
        return (math.sin(self.theta) + k * math.cos(self.theta)) / np.abs(self._factor(s))

    def rotated(self, R: np.ndarray) -> "ParallelAdmissible":
        out = object.__new__(ParallelAdmissible)
        out.__dict__.update(self.__dict__)
        out.base_adm = self.base_adm.rotated(R)
        return out


class ReversedAdmissible:
    """Time reversal s -> gamma(-s) of an admissible curve (stays admissible)."""

    def __init__(self, base):
        self.base_adm = base
        self.period_l = base.period_l
        self.kappa_min = -base.kappa_max
        self.kappa_max = -base.kappa_min

    @property
    def period(self):
        return self.period_l

    def point(self, s):
        return self.base_adm.point(-np.asarray(s, dtype=float))

    def velocity(self, s):
        return -self.base_adm.velocity(-np.asarray(s, dtype=float))

    def speed(self, s):
        return self.base_adm.speed(-np.asarray(s, dtype=float))

    def unit_tangent(self, s):
        return -self.base_adm.unit_tangent(-np.asarray(s, dtype=float))

    def normal(self, s):
        return -self.base_adm.normal(-np.asarray(s, dtype=float))

    def curvature(self, s):
        return -self.base_adm.curvature(-np.asarray(s, dtype=float))

    def rotated(self, R: np.ndarray) -> "ReversedAdmissible":
        return ReversedAdmissible(self.base_adm.rotated(R))


# ---------------------------------------------------------------------------
# Built-in curves and JSON specs
# ---------------------------------------------------------------------------

SIGMA_DEFAULT_A = 1.0 / 7.0

# The plane parametrizations below traverse their image so that the spherical
# pullback under p^-1 above has positive geodesic curvature; this is the
# mirror-image parameter direction of the usual counterclockwise convention.


def _sigma_spec(a: float) -> TrigPolyPlaneSpec:
    return TrigPolyPlaneSpec(x_cos=(0.0, 4.0, 3.0), y_sin=(0.0, 4.0, -3.0), scale=a)


def _limacon_spec(scale: float, b: float) -> TrigPolyPlaneSpec:
    # (b + cos t)(cos t, -sin t): one crossing, positive curvature for b < 1
    return TrigPolyPlaneSpec(
        x_cos=(0.5, b, 0.5), y_sin=(0.0, -b, -0.5), scale=scale
    )


BUILTIN_DEFAULTS = {
    "circle": {"kappa": 1.0},
    "figure_eight": {"scale": 0.4},
    "sigma_a": {"a": SIGMA_DEFAULT_A},
    "lens_shell": {"scale": 0.35},
}


def builtin_spec(name: str, **params) -> dict:
    """JSON spec of a built-in curve; unknown names raise SpecError."""
    base = name[:-4] if name.endswith("_rev") else name
    if base not in BUILTIN_DEFAULTS:
        raise SpecError(f"unknown builtin curve {name!r}")
    merged = dict(BUILTIN_DEFAULTS[base])
    for key, value in params.items():
        if key not in merged:
            raise SpecError(f"builtin {base!r} has no parameter {key!r}")
        merged[key] = float(value)
    if base == "circle":
        spec = {"version": 1, "kind": "circle", "kappa": merged["kappa"]}
    elif base == "sigma_a":
        spec = _sigma_spec(merged["a"]).to_json()
    elif base == "figure_eight":
        spec = _limacon_spec(merged["scale"], 0.5).to_json()
    else:
        spec = _limacon_spec(merged["scale"], 0.7).to_json()
    if name.endswith("_rev"):
        spec["reverse"] = True
    return spec


def catalog() -> dict:
    """All built-in curve specs with their default parameters."""
    return {name: builtin_spec(name) for name in BUILTIN_DEFAULTS}


def _parse_name(text: str):
    text = text.strip()
    if "(" in text:
        if not text.endswith(")"):
            raise SpecError(f"malformed curve name {text!r}")
        name, arglist = text[:-1].split("(", 1)
        params = {}
        for item in arglist.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise SpecError(f"malformed parameter {item!r} in {text!r}")
            key, value = item.split("=", 1)
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise SpecError(f"non-numeric parameter in {text!r}") from exc
        return name.strip(), params
    return text, {}


def curve_from_spec(spec) -> SphericalCurve:
    """Build a SphericalCurve from a JSON dict, a builtin name, or a spec object."""
    if isinstance(spec, SphericalCurve):
        return spec
    if isinstance(spec, TrigPolyPlaneSpec):
        return build_spherical(spec)
    if isinstance(spec, str):
        name, params = _parse_name(spec)
        return curve_from_spec(builtin_spec(name, **params))
    if not isinstance(spec, dict):
        raise SpecError(f"cannot interpret curve spec of type {type(spec).__name__}")
    kind = spec.get("kind")
    if kind == "builtin":
        params = {k: v for k, v in spec.items() if k not in ("kind", "name", "reverse", "version")}
        inner = builtin_spec(spec.get("name", ""), **params)
        if spec.get("reverse"):
            inner["reverse"] = not inner.get("reverse", False)
        return curve_from_spec(inner)
    if kind == "circle":
        if "kappa" not in spec:
            raise SpecError("circle spec needs a 'kappa' field")
        curve = circle_curve(float(spec["kappa"]))
    elif kind == "trig_poly_plane":
        try:
            tspec = TrigPolyPlaneSpec(
                x_cos=spec.get("x_cos", ()),
                x_sin=spec.get("x_sin", ()),
                y_cos=spec.get("y_cos", ()),
                y_sin=spec.get("y_sin", ()),
                scale=float(spec.get("scale", 1.0)),
                rotation=float(spec.get("rotation", 0.0)),
                translation=tuple(spec.get("translation", (0.0, 0.0))),
            )
        except TypeError as exc:
            raise SpecError(f"malformed trig_poly_plane spec: {exc}") from exc
        curve = build_spherical(tspec)
    else:
        raise SpecError(f"unknown curve kind {kind!r}")
    if spec.get("reverse"):
        curve = curve.reversed()
    return curve


def admissible_from_spec(spec, nodes: int = 4096) -> AdmissibleCurve:
    return reparametrize_admissible(curve_from_spec(spec), nodes=nodes)
