"""Tangent circles of prescribed geodesic curvature and the rolling search.

A mu-circle is a circle of geodesic curvature mu > 0; its spherical radius r
satisfies cot r = mu.  A positive shell admits an inscribed mu-circle touching
it twice whose bi-tangent angle is at least pi; a negative shell on a curve
with curvature above mu admits a circumscribing mu-circle touching it exactly
twice.  Aligning the two circles and rolling one shell against the other
yields a bi-tangent pair of contact points between the curves; comparing lift
endpoints along the connecting sub-arcs classifies it as first or second kind,
and a second-kind contact certifies extrinsic diameter pi for the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import su2
from .errors import AnalysisError
from .lifting import lift_arc_endpoint
from .su2 import UnitQuaternion, frame_to_quaternion, quaternion_from_rotation
from .topology import BOUNDARY, Shell, SphericalLoop

BOUNDARY_TOL = 1e-7


@dataclass
class MuCircle:
    """Oriented circle of geodesic curvature mu (> 0).

    Traversal in the direction center x point has curvature +mu; the
    ``orientation`` field records whether the circle is meant to be traversed
    that way (+1) or against it (-1), e.g. when tangent from the far side of a
    curve.  ``phase_ref`` anchors the angle coordinate.
    """

    center: np.ndarray
    mu: float
    orientation: int = 1
    phase_ref: np.ndarray | None = None
    radius_r: float = field(init=False)

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.center /= np.linalg.norm(self.center)
        if self.mu <= 0:
            raise AnalysisError("mu-circle needs mu > 0")
        self.radius_r = math.atan2(1.0, self.mu)
        if self.phase_ref is None:
            seed = np.array([1.0, 0.0, 0.0])
            if abs(self.center[0]) > 0.9:
                seed = np.array([0.0, 1.0, 0.0])
            u = seed - np.dot(seed, self.center) * self.center
            self.phase_ref = (
                math.cos(self.radius_r) * self.center
                + math.sin(self.radius_r) * u / np.linalg.norm(u)
            )
        self._u = self.phase_ref - math.cos(self.radius_r) * self.center
        self._u /= np.linalg.norm(self._u)
        self._v = np.cross(self.center, self._u)

    def point_at(self, phi):
        phi = np.asarray(phi, dtype=float)
        ring = np.multiply.outer(np.cos(phi), self._u) + np.multiply.outer(np.sin(phi), self._v)
        return math.cos(self.radius_r) * self.center + math.sin(self.radius_r) * ring

    def sample(self, n: int = 512) -> np.ndarray:
        return self.point_at(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))

    def angle_of(self, p: np.ndarray) -> float:
        """Angle coordinate of a point on (or near) the circle, in [0, 2 pi)."""
        a = float(np.dot(p, self._u))
        b = float(np.dot(p, self._v))
        return math.atan2(b, a) % (2.0 * math.pi)

    def signed_gap(self, pts: np.ndarray) -> np.ndarray:
        """<x, center> - cos r: positive inside the disk around the center."""
        return np.atleast_2d(pts) @ self.center - math.cos(self.radius_r)

    def on_circle(self, p: np.ndarray, tol: float = BOUNDARY_TOL) -> bool:
        return abs(float(np.dot(p, self.center)) - math.cos(self.radius_r)) < tol

    def arc_points(self, phi_from: float, phi_to: float, n: int = 256) -> np.ndarray:
        """Samples along the canonical orientation from phi_from to phi_to."""
        span = (phi_to - phi_from) % (2.0 * math.pi)
        return self.point_at(phi_from + np.linspace(0.0, span, n))


def tangent_mu_circle(curve, t: float, mu: float, side: str = "left") -> MuCircle:
    """The mu-circle tangent to the curve at gamma(t).

    side='left' puts the center on the unit-normal side (canonical direction
    agrees with the curve there), side='right' on the opposite side.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    sigma = 1.0 if side == "left" else -1.0
    g = curve.point(t)
    n = curve.normal(t)
    center = (mu * g + sigma * n) / math.sqrt(1.0 + mu * mu)
    return MuCircle(center=center, mu=mu, orientation=1 if side == "left" else -1, phase_ref=g)


@dataclass
class BitangentCircleResult:
    """A mu-circle meeting a shell tangentially at two parameters t1 < t2."""

    circle: MuCircle
    t1: float
    t2: float
    P: np.ndarray
    Q: np.ndarray
    angle_theta: float
    contact_params: tuple
    residual_position: float
    residual_tangency: float


def _contact_components(curve, circle: MuCircle, a: float, b: float,
                        samples: int = 4096, detect: float = 1e-5):
    """Tangential contacts of a circle with the arc [a, b], Newton-polished."""
    ts = np.linspace(a, b, samples)
    gap = curve.point(ts) @ circle.center - math.cos(circle.radius_r)
    near = gap > -detect
    contacts = []
    i = 0
    while i < samples:
        if not near[i]:
            i += 1
            continue
        j = i
        while j + 1 < samples and near[j + 1]:
            j += 1
        block = slice(i, j + 1)
        k = i + int(np.argmax(gap[block]))
        t = ts[k]
        for _ in range(30):
            g1 = float(curve.velocity(t) @ circle.center)
            h = 1e-6 * max(1.0, abs(t))
            g2 = (float(curve.velocity(t + h) @ circle.center) - float(curve.velocity(t - h) @ circle.center)) / (2 * h)
            if abs(g2) < 1e-14:
                break
            step = g1 / g2
            t -= step
            if abs(step) < 1e-14:
                break
        t = min(max(t, a), b)
        contacts.append(t)
        i = j + 1
    merged = []
    for t in sorted(contacts):
        if not merged or abs(t - merged[-1]) > 1e-6 * (b - a):
            merged.append(t)
    return merged


def inscribed_bitangent_circle(shell: Shell, mu: float, t_grid: int = 192,
                               circle_samples: int = 512,
                               bisect_tol: float = 1e-8) -> BitangentCircleResult:
    """Inscribed bi-tangent mu-circle of a positive shell.

    Rolls the family of tangent mu-circles toward the node, finds the infimum
    tangency parameter where the circle is still inscribed in the interior
    domain, and polishes the resulting two-point tangency with Newton.
    """
    if not shell.is_positive:
        raise AnalysisError("inscribed_bitangent_circle needs a positive shell")
    k_max = shell.curvature_range()[1]
    if mu <= k_max:
        raise AnalysisError(
            f"mu = {mu:.6f} must exceed the shell's maximum curvature {k_max:.6f}"
        )
    loop = shell.loop()
    curve, a, b = shell.curve, shell.a, shell.b

    def inscribed(t: float) -> bool:
        circle = tangent_mu_circle(curve, t, mu, "left")
        return loop.contains(circle.sample(circle_samples), BOUNDARY_TOL)

    margin = 1e-6 * (b - a)
    ts = np.linspace(a + margin, b - margin, t_grid)
    flags = [inscribed(t) for t in ts]
    if not any(flags):
        raise AnalysisError(
            "no inscribed mu-circle: predicate never holds (mu too small for this shell?)"
        )
    first = int(np.argmax(flags))
    if first == 0:
        t1 = float(ts[0])
    else:
        lo, hi = float(ts[first - 1]), float(ts[first])
        while hi - lo > bisect_tol:
            mid = 0.5 * (lo + hi)
            if inscribed(mid):
                hi = mid
            else:
                lo = mid
        t1 = hi

    # Newton polish of the two-point tangency: the second contact u satisfies
    # gap(u) = 0 and gap'(u) = 0 where gap(u) = <gamma(u), m(t1)> - cos r.
    circle = tangent_mu_circle(curve, t1, mu, "left")
    contacts = _contact_components(curve, circle, a, b)
    others = [u for u in contacts if abs(u - t1) > 1e-4 * (b - a)]
    if others:
        u = max(others, key=lambda uu: float(curve.point(uu) @ circle.center))
        t1, u = _polish_bitangency(curve, t1, u, mu)
        circle = tangent_mu_circle(curve, t1, mu, "left")
        contacts = _contact_components(curve, circle, a, b)
    merged = [t1]
    for u in sorted(contacts):
        if all(abs(u - v) > 1e-6 * (b - a) for v in merged):
            merged.append(u)
    contacts = sorted(merged)
    t_lo, t_hi = min(contacts), max(contacts)
    P = curve.point(t_lo)
    Q = curve.point(t_hi)
    gaps = [abs(float(curve.point(u) @ circle.center) - math.cos(circle.radius_r)) for u in contacts]
    tangs = [abs(float(curve.unit_tangent(u) @ circle.center)) for u in contacts]
    theta = (circle.angle_of(Q) - circle.angle_of(P)) % (2.0 * math.pi)
    return BitangentCircleResult(
        circle=circle,
        t1=t_lo,
        t2=t_hi,
        P=P,
        Q=Q,
        angle_theta=theta,
        contact_params=tuple(contacts),
        residual_position=max(gaps),
        residual_tangency=max(tangs),
    )


def _polish_bitangency(curve, t: float, u: float, mu: float, iters: int = 40):
    """Newton on (t, u): circle tangent at t passes tangentially through gamma(u)."""
    root = math.sqrt(1.0 + mu * mu)
    cr = mu / root

    def center(tt):
        return (mu * curve.point(tt) + curve.normal(tt)) / root

    def F(tt, uu):
        m = center(tt)
        return np.array(
            [float(curve.point(uu) @ m) - cr, float(curve.velocity(uu) @ m)]
        )

    x = np.array([t, u])
    for _ in range(iters):
        f = F(*x)
        if np.max(np.abs(f)) < 1e-13:
            break
        h = 1e-7
        J = np.empty((2, 2))
        for d in range(2):
            dx = np.zeros(2)
            dx[d] = h
            J[:, d] = (F(*(x + dx)) - F(*(x - dx))) / (2 * h)
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
        x -= step
        if np.linalg.norm(step) < 1e-13:
            break
    return float(x[0]), float(x[1])


def reversed_shell(shell: Shell) -> Shell:
    """The same arc traversed backwards; the sign flips, the domain does not."""
    from .curves import ReversedAdmissible

    rev = ReversedAdmissible(shell.curve)
    return Shell(
        curve=rev,
        a=-shell.b,
        b=-shell.a,
        node=shell.node,
        sign=-shell.sign,
        interior_angle=shell.interior_angle,
    )


def circumscribed_bitangent_circle(shell: Shell, mu: float, **kwargs) -> BitangentCircleResult:
    """Circumscribing bi-tangent mu-circle of a negative shell.

    Reverses the shell's orientation (turning it positive), runs the inscribed
    search there, and re-expresses the contacts for the original orientation.
    The contact set must have exactly two components.
    """
    if shell.is_positive:
        raise AnalysisError("circumscribed_bitangent_circle needs a negative shell")
    k_min = shell.curvature_range()[0]
    if not 0.0 < mu < k_min:
        raise AnalysisError(
            f"mu = {mu:.6f} must lie in (0, min shell curvature = {k_min:.6f})"
        )
    res = inscribed_bitangent_circle(reversed_shell(shell), mu, **kwargs)
    contacts = sorted(-u for u in res.contact_params)
    if len(contacts) != 2:
        raise AnalysisError(
            f"contact multiplicity > 2 for the circumscribed circle "
            f"(contacts at {contacts}); numerical failure"
        )
    c1, d1 = contacts
    circle = MuCircle(
        center=res.circle.center,
        mu=mu,
        orientation=-1,
        phase_ref=res.circle.phase_ref,
    )
    return BitangentCircleResult(
        circle=circle,
        t1=c1,
        t2=d1,
        P=shell.curve.point(d1),
        Q=shell.curve.point(c1),
        angle_theta=res.angle_theta,
        contact_params=(c1, d1),
        residual_position=res.residual_position,
        residual_tangency=res.residual_tangency,
    )


def past_part_predicate(circle: MuCircle, entry: np.ndarray, exit: np.ndarray,
                        on_tol: float = BOUNDARY_TOL, angle_tol: float = 1e-9) -> bool:
    """True when ``exit`` lies in the (closed) past part of the circle
    with respect to ``entry``.

    The past part is the subarc from the circle-antipode of the entry back to
    the entry, following the circle's orientation; the antipode itself counts
    as past (closed arc), as does the entry point.
    """
    for p in (entry, exit):
        if not circle.on_circle(p, on_tol):
            raise AnalysisError("past_part_predicate: point is not on the circle")
    phi = (circle.angle_of(exit) - circle.angle_of(entry)) % (2.0 * math.pi)
    if circle.orientation < 0:
        phi = (2.0 * math.pi - phi) % (2.0 * math.pi)
    return phi >= math.pi - angle_tol or phi <= angle_tol


def circle_through_points(p: np.ndarray, q: np.ndarray, mu: float,
                          inside_hint: np.ndarray) -> MuCircle:
    """A mu-circle through two points, picking the center such that
    ``inside_hint`` lies in its disk."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c = float(np.dot(p, q))
    r = math.atan2(1.0, mu)
    cr = math.cos(r)
    if 1.0 + c < 1e-12:
        raise AnalysisError("circle_through_points: points are antipodal")
    alpha = cr / (1.0 + c)
    rad2 = 1.0 - alpha * alpha * (2.0 + 2.0 * c)
    if rad2 < 0 or 1.0 - c * c < 1e-14:
        raise AnalysisError("circle_through_points: points too far apart for this mu")
    beta = math.sqrt(rad2 / (1.0 - c * c))
    for sgn in (1.0, -1.0):
        m = alpha * (p + q) + sgn * beta * np.cross(p, q)
        if float(np.dot(inside_hint, m)) > cr:
            return MuCircle(center=m, mu=mu, phase_ref=p)
    raise AnalysisError("circle_through_points: hint point is inside neither disk")


# ---------------------------------------------------------------------------
# The rolling search (constructive Theorem-B pipeline)
# ---------------------------------------------------------------------------


@dataclass
class BitangentCertificate:
    """An admissible bi-tangent between the placed gamma1 and gamma2."""

    P: np.ndarray
    P_prime: np.ndarray
    c2: float
    c1_prime: float
    c2_prime: float
    tau: float
    isometry_phi: UnitQuaternion
    kind: str
    diameter_is_pi: bool
    mu: float
    residuals: dict
    inscribed_angle: float
    circumscribed_contacts: tuple

    def to_json(self) -> dict:
        return {
            "P": list(self.P),
            "P_prime": list(self.P_prime),
            "params": {
                "c2": self.c2,
                "c1_prime": self.c1_prime,
                "c2_prime": self.c2_prime,
                "tau": self.tau,
            },
            "isometry_phi": list(self.isometry_phi.to_array()),
            "kind": self.kind,
            "diameter_is_pi": self.diameter_is_pi,
            "mu": self.mu,
            "residuals": self.residuals,
            "inscribed_angle": self.inscribed_angle,
            "circumscribed_contacts": list(self.circumscribed_contacts),
        }


def _frame(curve, s: float) -> np.ndarray:
    return np.column_stack(
        [curve.unit_tangent(s), curve.normal(s), curve.point(s)]
    )


def classify_kind(arc_a, arc_b, P: np.ndarray, Q: np.ndarray,
                  frame_tol: float = 1e-6) -> str:
    """First or second kind of an admissible bi-tangent.

    Each arc is (curve, (s_from, s_to)) running from P to Q along its curve
    (backwards traversal allowed).  Both framed arcs are lifted from the same
    fiber point over P; matching endpoint lifts over Q mean the arcs are
    regular homotopic (first kind), antipodal endpoints mean second kind.  The
    Z_2 gap makes the threshold parameter-free.
    """
    (ca, (sa0, sa1)), (cb, (sb0, sb1)) = arc_a, arc_b
    Ta = ca.unit_tangent(sa0)
    Tb = cb.unit_tangent(sb0)
    if np.linalg.norm(ca.point(sa0) - P) > frame_tol or np.linalg.norm(cb.point(sb0) - P) > frame_tol:
        raise AnalysisError("classify_kind: arcs do not start at P")
    if np.linalg.norm(Ta - Tb) > frame_tol:
        raise AnalysisError("classify_kind: tangent frames disagree at P")
    q_P = frame_to_quaternion(ca.point(sa0), Ta)[0]
    e_a = lift_arc_endpoint(ca, sa0, sa1, q_P)
    e_b = lift_arc_endpoint(cb, sb0, sb1, q_P)
    d_same = su2.distance(e_a, e_b)
    d_anti = su2.distance(e_a, -e_b)
    if d_same < 1.0 and d_anti > 1.0:
        return "first"
    if d_anti < 1.0 and d_same > 1.0:
        return "second"
    raise AnalysisError(
        f"ambiguous lift comparison (distances {d_same:.3f} / {d_anti:.3f})"
    )


def rolling_search(shell1: Shell, shell2: Shell, mu: float,
                   arc_samples: int = 512, scan_points: int = 96,
                   bisect_tol: float = 1e-7) -> BitangentCertificate:
    """Roll shell1 against shell2 along the shared bi-tangent mu-circle.

    shell1 must be a negative shell on a curve with curvature above mu and
    shell2 a positive shell on a curve with curvature below mu.  The rolling
    isometry pins gamma1(t) to the inscribed circle's tangency point P with
    matched frames; the supremum of t keeping the placed shell inside the
    region bounded by the circle arc [Q'P] and the shell2 arc produces the
    second contact P', and lift comparison classifies the bi-tangent's kind.
    """
    if shell1.is_positive or not shell2.is_positive:
        raise AnalysisError(
            "hypothesis violated: rolling_search needs (negative shell1, positive shell2)"
        )
    curve1, curve2 = shell1.curve, shell2.curve

    ins = inscribed_bitangent_circle(shell2, mu)
    C = ins.circle
    c2, d2 = ins.t1, ins.t2
    P = curve2.point(c2)
    if ins.angle_theta < math.pi - 1e-6:
        raise AnalysisError(
            f"inscribed bi-tangent angle {ins.angle_theta:.6f} below pi; unexpected"
        )

    circ = circumscribed_bitangent_circle(shell1, mu)
    c1, d1 = circ.contact_params
    b1 = shell1.b

    # region Omega: circle arc from Q' = gamma2(d2) to P plus the shell arc
    phi_P = C.angle_of(P)
    phi_Q = C.angle_of(curve2.point(d2))
    arc = C.arc_points(phi_Q, phi_P, n=max(64, arc_samples // 2))
    shell_arc = curve2.point(np.linspace(c2, d2, arc_samples, endpoint=False))
    omega_loop = SphericalLoop(np.vstack([arc[:-1], shell_arc]), C.center)
    if omega_loop.classify(C.center[None])[0] < BOUNDARY:
        raise AnalysisError("rolling region is inconsistent: circle center not inside")

    F2 = np.column_stack([curve2.unit_tangent(c2), curve2.normal(c2), P])
    samples1 = curve1.point(np.linspace(shell1.a, shell1.b, arc_samples))

    def placement(t: float) -> np.ndarray:
        return F2 @ _frame(curve1, t).T

    def contained(t: float) -> bool:
        R = placement(t)
        return omega_loop.contains(samples1 @ R.T, BOUNDARY_TOL)

    if not contained(d1):
        raise AnalysisError(
            "rolling start is not contained in the region; hypothesis or numerics failed"
        )
    ts = np.linspace(d1, b1, scan_points)
    first_out = None
    for k in range(1, scan_points):
        if not contained(float(ts[k])):
            first_out = k
            break
    if first_out is None:
        raise AnalysisError(
            "containment never fails along the shell; tau reaches b1, "
            "contradicting the rolling argument"
        )
    lo, hi = float(ts[first_out - 1]), float(ts[first_out])
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if contained(mid):
            lo = mid
        else:
            hi = mid
    tau = lo

    # nearest approach of the placed shell1 to the gamma2 arc, excluding the pivot
    R = placement(tau)
    u_grid = np.linspace(shell1.a, tau, 1024)
    v_grid = np.linspace(c2, d2, 1024)
    placed = curve1.point(u_grid) @ R.T
    wall = curve2.point(v_grid)
    d2_mat = (
        np.sum(placed**2, axis=1)[:, None]
        - 2.0 * placed @ wall.T
        + np.sum(wall**2, axis=1)[None, :]
    )
    pivot_u = np.abs(u_grid - tau) < 0.04 * (tau - shell1.a)
    pivot_v = np.abs(v_grid - c2) < 0.04 * (d2 - c2)
    d2_mat[np.ix_(pivot_u, pivot_v)] = np.inf
    iu, iv = np.unravel_index(np.argmin(d2_mat), d2_mat.shape)
    t_star, u_star, v_star = _polish_contact(
        curve1, curve2, F2, float(tau), float(u_grid[iu]), float(v_grid[iv])
    )

    R = F2 @ _frame(curve1, t_star).T
    rot1 = curve1.rotated(R)
    P_prime = curve2.point(v_star)
    res_ab_P = float(np.linalg.norm(rot1.point(t_star) - P))
    res_ab_Pp = float(np.linalg.norm(rot1.point(u_star) - P_prime))
    res_plus_P = float(np.linalg.norm(rot1.normal(t_star) - curve2.normal(c2)))
    res_plus_Pp = float(np.linalg.norm(rot1.normal(u_star) - curve2.normal(v_star)))
    residuals = {
        "position_P": res_ab_P,
        "position_P_prime": res_ab_Pp,
        "normal_P": res_plus_P,
        "normal_P_prime": res_plus_Pp,
    }
    if max(residuals.values()) > 1e-6:
        raise AnalysisError(f"contact refinement diverged: residuals {residuals}")

    kind = classify_kind(
        (rot1, (t_star, u_star)), (curve2, (c2, v_star)), P, P_prime
    )
    return BitangentCertificate(
        P=P,
        P_prime=P_prime,
        c2=c2,
        c1_prime=u_star,
        c2_prime=v_star,
        tau=t_star,
        isometry_phi=quaternion_from_rotation(R),
        kind=kind,
        diameter_is_pi=(kind == "second"),
        mu=mu,
        residuals=residuals,
        inscribed_angle=ins.angle_theta,
        circumscribed_contacts=(c1, d1),
    )


def _polish_contact(curve1, curve2, F2: np.ndarray, t0: float, u0: float, v0: float,
                    iters: int = 40):
    """Newton for the exact tangential contact of the placed shell with gamma2.

    Unknowns (t, u, v): gamma1(u) placed by the rolling isometry at parameter
    t meets gamma2(v) with parallel tangents.
    """

    def F(x):
        t, u, v = x
        R = F2 @ np.column_stack(
            [curve1.unit_tangent(t), curve1.normal(t), curve1.point(t)]
        ).T
        r = R @ curve1.point(u) - curve2.point(v)
        Tv = curve2.unit_tangent(v)
        nv = curve2.normal(v)
        return np.array(
            [float(r @ Tv), float(r @ nv), float((R @ curve1.unit_tangent(u)) @ nv)]
        )

    x = np.array([t0, u0, v0])
    best = (np.inf, x.copy())
    for _ in range(iters):
        f = F(x)
        fnorm = float(np.max(np.abs(f)))
        if fnorm < best[0]:
            best = (fnorm, x.copy())
        if fnorm < 1e-12:
            break
        J = np.empty((3, 3))
        h = 1e-7
        for d in range(3):
            dx = np.zeros(3)
            dx[d] = h
            J[:, d] = (F(x + dx) - F(x - dx)) / (2 * h)
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
        if np.linalg.norm(step) > 0.2:
            step *= 0.2 / np.linalg.norm(step)
        x -= step
        if np.linalg.norm(step) < 1e-13:
            break
    if best[0] > 1e-8:
        raise AnalysisError(f"contact refinement diverged (residual {best[0]:.2e})")
    f = F(best[1])
    return float(best[1][0]), float(best[1][1]), float(best[1][2])
