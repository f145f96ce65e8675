"""Lifts of framed spherical curves to S^3.

An admissible curve gamma satisfies c^-1 c' = (|gamma'|/2)(e2 + kappa e3) for
its lift c through p2, and the admissible normalization makes that generator a
unit vector, so the lift is unit speed.  Integration is multiplicative: each
step advances by the group exponential of a fourth-order two-point Gauss
average of the generator (with the commutator correction), which keeps every
iterate exactly on S^3; a periodic fiber snap removes the remaining secular
drift.  The monodromy sign c(l) = +-c(0) is the regular homotopy invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import su2
from .errors import AnalysisError, LiftDivergedError
from .su2 import UnitQuaternion

_GAUSS_OFFSETS = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)
_SQRT3_OVER_6 = math.sqrt(3.0) / 6.0

FIBER_DEFECT_BOUND = 1e-6


def _generators(curve, s: np.ndarray) -> np.ndarray:
    """Lift generator (0, 1, kappa)/sqrt(1+kappa^2) at each parameter value."""
    k = curve.curvature(s)
    scale = 1.0 / np.sqrt(1.0 + k * k)
    out = np.zeros(s.shape + (3,))
    out[..., 1] = scale
    out[..., 2] = scale * k
    return out


def fiber_defect(curve, s: np.ndarray, quats: np.ndarray) -> np.ndarray:
    """Deviation of p2(c(s)) from the framed curve (gamma, gamma'/|gamma'|)."""
    base = su2.qarr_rotate_e3(quats) - curve.point(s)
    tang = su2.qarr_rotate_e1(quats) - curve.unit_tangent(s)
    return np.maximum(np.linalg.norm(base, axis=-1), np.linalg.norm(tang, axis=-1))


def _fiber_quaternion(curve, s: float) -> UnitQuaternion:
    q, _ = su2.frame_to_quaternion(curve.point(s), curve.unit_tangent(s))
    return q


def _integrate(curve, s_from: float, s_to: float, start: UnitQuaternion, steps: int,
               snap_every: int = 64):
    """March the lift ODE from s_from to s_to; returns (s_grid, quats)."""
    span = s_to - s_from
    steps = max(int(steps), 1)
    h = span / steps
    s_grid = s_from + h * np.arange(steps + 1)
    g1 = _generators(curve, s_grid[:-1] + _GAUSS_OFFSETS[0] * h)
    g2 = _generators(curve, s_grid[:-1] + _GAUSS_OFFSETS[1] * h)
    omega = 0.5 * h * (g1 + g2) + _SQRT3_OVER_6 * h * h * np.cross(g1, g2)
    increments = su2.qarr_exp(omega)
    quats = np.empty((steps + 1, 4))
    q = start
    quats[0] = q.to_array()
    for k in range(steps):
        q = q.mul(UnitQuaternion.from_array(increments[k]))
        if snap_every and (k + 1) % snap_every == 0 and k + 1 < steps:
            exact = _fiber_quaternion(curve, float(s_grid[k + 1]))
            q = exact if q.dot(exact) >= 0 else -exact
        quats[k + 1] = q.to_array()
    return s_grid, quats


@dataclass
class LiftedCurve:
    """Dense lift samples of an admissible curve with its monodromy sign."""

    curve: object
    s_grid: np.ndarray
    quats: np.ndarray
    period_l: float
    monodromy_sign: int
    max_fiber_defect: float

    @property
    def step(self) -> float:
        return self.period_l / (len(self.s_grid) - 1)

    def start(self) -> UnitQuaternion:
        return UnitQuaternion.from_array(self.quats[0])

    def negated(self) -> "LiftedCurve":
        """The other lift (initial sign flipped)."""
        return LiftedCurve(
            curve=self.curve,
            s_grid=self.s_grid,
            quats=-self.quats,
            period_l=self.period_l,
            monodromy_sign=self.monodromy_sign,
            max_fiber_defect=self.max_fiber_defect,
        )

    def values(self, s, interp: str = "magnus") -> np.ndarray:
        """Lift values at arbitrary parameters, shape (n, 4).

        ``interp='magnus'`` continues the ODE from the nearest stored sample
        with one fractional Magnus step (smooth to machine precision, the
        default); ``interp='slerp'`` uses renormalized spherical-linear
        interpolation between adjacent samples.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        L = self.period_l
        wraps = np.floor(s / L).astype(int)
        s0 = s - wraps * L
        if self.monodromy_sign == 1:
            sign = np.ones_like(s0)
        else:
            sign = np.where(wraps % 2 == 0, 1.0, -1.0)
        h = self.step
        k = np.clip((s0 / h).astype(int), 0, len(self.s_grid) - 2)
        sk = self.s_grid[k]
        delta = s0 - sk
        base = self.quats[k]
        if interp == "slerp":
            nxt = self.quats[k + 1]
            flip = np.sum(base * nxt, axis=-1) < 0
            nxt = np.where(flip[:, None], -nxt, nxt)
            alpha = (delta / h)[:, None]
            mixed = (1 - alpha) * base + alpha * nxt
            out = su2.qarr_normalize(mixed)
        elif interp == "magnus":
            a1 = _generators(self.curve, sk + _GAUSS_OFFSETS[0] * delta)
            a2 = _generators(self.curve, sk + _GAUSS_OFFSETS[1] * delta)
            omega = (
                0.5 * delta[:, None] * (a1 + a2)
                + _SQRT3_OVER_6 * (delta * delta)[:, None] * np.cross(a1, a2)
            )
            out = su2.qarr_mul(base, su2.qarr_exp(omega))
        else:
            raise ValueError(f"unknown interpolation {interp!r}")
        return sign[:, None] * out

    def value(self, s: float, interp: str = "magnus") -> UnitQuaternion:
        return UnitQuaternion.from_array(self.values(s, interp=interp)[0])


def lift_curve(curve, steps_per_period: int = 4096, snap_every: int = 64) -> LiftedCurve:
    """Lift an admissible curve over one period.

    The initial condition is the canonical-sign fiber point over the framed
    start; the step count doubles once automatically if the fiber-defect bound
    fails, and a persistent failure raises LiftDivergedError.
    """
    if steps_per_period < 256:
        raise ValueError("lift_curve needs steps_per_period >= 256")
    L = curve.period_l
    start = _fiber_quaternion(curve, 0.0).canonical_sign()
    for attempt, steps in enumerate((steps_per_period, 2 * steps_per_period)):
        s_grid, quats = _integrate(curve, 0.0, L, start, steps, snap_every)
        defect = float(fiber_defect(curve, s_grid, quats).max())
        if defect <= FIBER_DEFECT_BOUND:
            break
    else:
        raise LiftDivergedError(f"lift diverged: fiber defect {defect:.2e}")
    endpoint = UnitQuaternion.from_array(quats[-1])
    d_plus = su2.distance(endpoint, start)
    d_minus = su2.distance(endpoint, -start)
    monodromy = 1 if d_plus < d_minus else -1
    if min(d_plus, d_minus) > FIBER_DEFECT_BOUND:
        raise LiftDivergedError(
            f"lift endpoint is not on the start fiber (distance {min(d_plus, d_minus):.2e})"
        )
    return LiftedCurve(
        curve=curve,
        s_grid=s_grid,
        quats=quats,
        period_l=L,
        monodromy_sign=monodromy,
        max_fiber_defect=defect,
    )


def invariant_I(lift: LiftedCurve) -> int:
    """Regular homotopy invariant: 0 when the lift closes up, 1 when it flips sign."""
    return 0 if lift.monodromy_sign == 1 else 1


def lift_arc_endpoint(curve, s_from: float, s_to: float, start: UnitQuaternion,
                      steps_per_unit: float | None = None) -> UnitQuaternion:
    """Endpoint of the lift of gamma|[s_from, s_to] starting at ``start``.

    The start must sit on the fiber over the framed curve at s_from;
    integration runs backwards when s_to < s_from.
    """
    defect = fiber_defect(curve, np.atleast_1d(float(s_from)), start.to_array()[None])[0]
    if defect > FIBER_DEFECT_BOUND:
        raise AnalysisError(f"lift start is off the fiber by {defect:.2e}")
    span = s_to - s_from
    if span == 0.0:
        return start
    density = steps_per_unit if steps_per_unit is not None else 4096.0 / curve.period_l
    steps = max(int(math.ceil(abs(span) * density)), 8)
    _, quats = _integrate(curve, s_from, s_to, start, steps)
    endpoint = UnitQuaternion.from_array(quats[-1])
    if fiber_defect(curve, np.atleast_1d(float(s_to)), quats[-1][None])[0] > FIBER_DEFECT_BOUND:
        raise LiftDivergedError("lift diverged along the arc")
    return endpoint


def lift_framed_path(points: np.ndarray, tangents: np.ndarray,
                     start: UnitQuaternion | None = None) -> np.ndarray:
    """Continuation lift of a discrete framed path in US^2 (the Z_2 oracle).

    Chooses at every sample the fiber point nearer to the previous one; the
    path must be sampled densely enough that consecutive frames are much
    closer than the antipodal gap.
    """
    n = len(points)
    out = np.empty((n, 4))
    q, _ = su2.frame_to_quaternion(points[0], tangents[0])
    if start is not None:
        if abs(start.dot(q)) < 1.0 - 1e-6:
            raise AnalysisError("start quaternion is not over the first frame")
        q = start
    out[0] = q.to_array()
    for i in range(1, n):
        qi, _ = su2.frame_to_quaternion(points[i], tangents[i])
        arr = qi.to_array()
        if float(out[i - 1] @ arr) < 0:
            arr = -arr
        out[i] = arr
    return out
