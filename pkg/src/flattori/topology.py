"""Crossings, shells and domain membership for closed spherical curves.

Self-intersections are located by polyline segment culling followed by
Gauss-Newton refinement; only transversal double points are accepted.  A shell
is a sub-arc that closes up simply at a node with transversal tangents; its
interior domain is the complementary region whose wedge angle at the node is
below pi.  Membership tests project loops stereographically from a pole far
from the loop and ray-cast in the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path as PlanarPath

from .errors import AnalysisError, NonGenericCurveError

INSIDE, BOUNDARY, OUTSIDE = 1, 0, -1


@dataclass(frozen=True)
class Crossing:
    """Transversal double point gamma(t) = gamma(u), t < u."""

    t: float
    u: float
    point: np.ndarray
    transversality: float


def _pairwise_candidates(points: np.ndarray, threshold: float):
    """Index pairs (i, j), j > i+1, of samples closer than threshold (chordal)."""
    n = len(points)
    block = 512
    out = []
    for i0 in range(0, n, block):
        chunk = points[i0 : i0 + block]
        d2 = np.sum((chunk[:, None, :] - points[None, :, :]) ** 2, axis=-1)
        ii, jj = np.nonzero(d2 < threshold * threshold)
        ii += i0
        keep = jj > ii + 1
        out.append(np.stack([ii[keep], jj[keep]], axis=1))
    pairs = np.concatenate(out, axis=0)
    # drop the wrap-around adjacency (segment 0 vs segment n-1)
    keep = ~((pairs[:, 0] == 0) & (pairs[:, 1] == n - 1))
    return pairs[keep]


def _refine_crossing(curve, t0: float, u0: float, iters: int = 30):
    """Gauss-Newton for gamma(t) = gamma(u) from the seed (t0, u0)."""
    t, u = float(t0), float(u0)
    for _ in range(iters):
        pts = curve.point(np.array([t, u]))
        vel = curve.velocity(np.array([t, u]))
        r = pts[0] - pts[1]
        J = np.column_stack([vel[0], -vel[1]])
        JTJ = J.T @ J
        try:
            step = np.linalg.solve(JTJ, J.T @ r)
        except np.linalg.LinAlgError:
            return None
        t -= step[0]
        u -= step[1]
        if np.linalg.norm(step) < 1e-14:
            break
    pts = curve.point(np.array([t, u]))
    if np.linalg.norm(pts[0] - pts[1]) > 1e-10:
        return None
    return t, u


def find_crossings(curve, samples: int = 2048) -> list[Crossing]:
    """All transversal double points of a closed curve, refined to 1e-10.

    Raises NonGenericCurveError when an intersection is nearly tangential or a
    point is visited more than twice.
    """
    if samples < 1024:
        raise ValueError("find_crossings needs samples >= 1024")
    L = curve.period
    ts = np.linspace(0.0, L, samples, endpoint=False)
    pts = curve.point(ts)
    seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    threshold = 2.5 * seg.max()
    # exclude pairs that are close along the curve (chordal arc length)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]
    pairs = _pairwise_candidates(pts, threshold)
    along = np.abs(arc[pairs[:, 1]] - arc[pairs[:, 0]])
    along = np.minimum(along, total - along)
    pairs = pairs[along > 3.0 * threshold]
    found: list[tuple[float, float]] = []
    seed_window = 4.0 * L / samples
    for i, j in pairs:
        if any(
            abs(ts[i] - a) < seed_window and abs(ts[j] - b) < seed_window
            for a, b in found
        ):
            continue
        res = _refine_crossing(curve, ts[i], ts[j])
        if res is None:
            continue
        t, u = res
        t %= L
        u %= L
        if t > u:
            t, u = u, t
        sep = min(u - t, L - (u - t))
        if sep < 1e-6:
            continue
        if any(abs(t - a) < 1e-8 and abs(u - b) < 1e-8 for a, b in found):
            continue
        found.append((t, u))
    crossings = []
    for t, u in sorted(found):
        p = curve.point(t)
        tr = abs(np.linalg.det(np.stack([p, curve.unit_tangent(t), curve.unit_tangent(u)])))
        if tr < 1e-6:
            raise NonGenericCurveError(
                f"non-generic curve: tangential self-intersection at (t={t:.6f}, u={u:.6f}), "
                f"transversality {tr:.2e}; perturb the spec (e.g. its rotation)"
            )
        crossings.append(Crossing(t=t, u=u, point=p, transversality=tr))
    for a in range(len(crossings)):
        for b in range(a + 1, len(crossings)):
            if np.linalg.norm(crossings[a].point - crossings[b].point) < 1e-8:
                raise NonGenericCurveError(
                    "non-generic curve: a point is visited more than twice"
                )
    return crossings


class SphericalLoop:
    """A simple closed polyline on S^2 with a calibrated inside test.

    The loop is projected stereographically from a pole away from its image;
    parity is calibrated with a reference point known to lie inside, so the
    test is correct regardless of which side of the loop the pole lands on.
    """

    def __init__(self, points: np.ndarray, inside_reference: np.ndarray, rng_seed: int = 7):
        self.points = np.asarray(points, dtype=float)
        rng = np.random.default_rng(rng_seed)
        seg = np.linalg.norm(np.diff(self.points, axis=0, append=self.points[:1]), axis=1)
        margin = 4.0 * seg.max()
        pole = -self.points.mean(axis=0)
        for attempt in range(9):
            norm = np.linalg.norm(pole)
            if norm > 1e-6:
                pole = pole / norm
                if np.min(np.linalg.norm(self.points - pole, axis=1)) > margin:
                    break
            pole = rng.normal(size=3)
        else:
            raise AnalysisError("could not find a projection pole away from the loop")
        self.pole = pole
        # rotation taking the pole to the north pole (Rodrigues)
        z = np.array([0.0, 0.0, 1.0])
        v = np.cross(pole, z)
        s, c = np.linalg.norm(v), float(np.dot(pole, z))
        if s < 1e-12:
            self.R = np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
        else:
            vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
            self.R = np.eye(3) + vx + vx @ vx * ((1 - c) / (s * s))
        planar = self._project(self.points)
        self.path = PlanarPath(np.vstack([planar, planar[:1]]), closed=True)
        ref_parity = bool(self.path.contains_point(self._project(inside_reference[None])[0]))
        self.inside_parity = ref_parity

    def _project(self, pts: np.ndarray) -> np.ndarray:
        q = pts @ self.R.T
        return q[:, :2] / (1.0 - q[:, 2])[:, None]

    def distance_to_boundary(self, pts: np.ndarray) -> np.ndarray:
        """Chordal distance from each point to the loop polyline."""
        a = self.points
        b = np.roll(a, -1, axis=0)
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        denom[denom == 0] = 1.0
        ap = pts[:, None, :] - a[None, :, :]
        tproj = np.clip(np.einsum("pij,ij->pi", ap, ab) / denom[None, :], 0.0, 1.0)
        closest = a[None, :, :] + tproj[:, :, None] * ab[None, :, :]
        d = np.linalg.norm(pts[:, None, :] - closest, axis=-1)
        return d.min(axis=1)

    def classify(self, pts: np.ndarray, boundary_tol: float = 1e-8) -> np.ndarray:
        """INSIDE / BOUNDARY / OUTSIDE for each query point."""
        pts = np.atleast_2d(pts)
        out = np.full(len(pts), OUTSIDE, dtype=int)
        parity = self.path.contains_points(self._project(pts))
        out[parity == self.inside_parity] = INSIDE
        on_boundary = self.distance_to_boundary(pts) < boundary_tol
        out[on_boundary] = BOUNDARY
        return out

    def contains(self, pts: np.ndarray, boundary_tol: float = 1e-8) -> bool:
        """True when every query point is inside or within tolerance of the loop.

        Boundary distances are only computed for the parity-outside points, so
        the common all-inside case costs one point-in-polygon pass.
        """
        pts = np.atleast_2d(pts)
        parity = self.path.contains_points(self._project(pts))
        outside = parity != self.inside_parity
        if not outside.any():
            return True
        return bool(np.all(self.distance_to_boundary(pts[outside]) < boundary_tol))


@dataclass
class Shell:
    """Sub-arc gamma|[a, b] closing up simply at a node with transversal tangents."""

    curve: object
    a: float
    b: float
    node: np.ndarray
    sign: int  # +1 positive, -1 negative
    interior_angle: float
    _samples: int = 1024
    _loop: SphericalLoop | None = field(default=None, repr=False)

    @property
    def is_positive(self) -> bool:
        return self.sign > 0

    def parameters(self, n: int | None = None, endpoint: bool = True) -> np.ndarray:
        return np.linspace(self.a, self.b, n or self._samples, endpoint=endpoint)

    def sample(self, n: int | None = None) -> np.ndarray:
        return self.curve.point(self.parameters(n, endpoint=False))

    def wedge_bisector(self) -> np.ndarray:
        u = self.curve.unit_tangent(self.a)
        w = -self.curve.unit_tangent(self.b)
        v = u + w
        return v / np.linalg.norm(v)

    def interior_reference(self) -> np.ndarray:
        """A point just inside the interior domain, offset along the node wedge."""
        bis = self.wedge_bisector()
        pts = self.sample()
        for eps in (3e-3, 1e-3, 3e-4, 1e-4):
            cand = self.node + eps * bis
            cand /= np.linalg.norm(cand)
            d = np.min(np.linalg.norm(pts - cand, axis=1))
            if d > 0.2 * eps * math.sin(0.5 * self.interior_angle):
                return cand
        raise AnalysisError("could not place an interior reference point at the node wedge")

    def loop(self) -> SphericalLoop:
        if self._loop is None:
            self._loop = SphericalLoop(self.sample(), self.interior_reference())
        return self._loop

    def curvature_range(self, n: int = 1024):
        k = self.curve.curvature(self.parameters(n))
        return float(k.min()), float(k.max())

    def recheck_simplicity(self, factor: int = 4) -> bool:
        """Re-test simplicity of the open arc at a denser polyline sampling."""
        ts = self.parameters(self._samples * factor)
        pts = self.curve.point(ts)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        threshold = 2.0 * seg.max()
        arc = np.concatenate([[0.0], np.cumsum(seg)])
        pairs = _pairwise_candidates(pts, threshold)
        keep = ~((pairs[:, 0] == 0) & (pairs[:, 1] == len(pts) - 1))
        pairs = pairs[keep]
        pairs = pairs[np.abs(arc[pairs[:, 1]] - arc[pairs[:, 0]]) > 3.0 * threshold]
        for i, j in pairs:
            res = _refine_crossing(self.curve, ts[i], ts[j])
            if res is None:
                continue
            t, u = sorted(res)
            inside = self.a + 1e-7 < t < self.b - 1e-7 and self.a + 1e-7 < u < self.b - 1e-7
            if inside and abs(t - u) > 1e-7:
                return False
        return True


def _arc_is_simple(a: float, b: float, crossings, period: float) -> bool:
    """The open arc (a, b) is simple iff no crossing has both parameters inside."""
    for c in crossings:
        inside = 0
        for p in (c.t, c.u):
            q = p
            while q <= a + 1e-12:
                q += period
            if q < b - 1e-12:
                inside += 1
        if inside == 2:
            return False
    return True


def extract_shells(curve, crossings) -> list[Shell]:
    """Shells of a generic curve: both arcs of every crossing are tested."""
    L = curve.period
    shells = []
    for c in crossings:
        for a, b in ((c.t, c.u), (c.u, c.t + L)):
            if not _arc_is_simple(a, b, crossings, L):
                continue
            ta = curve.unit_tangent(a)
            tb = curve.unit_tangent(b)
            node = curve.point(a)
            det = float(np.linalg.det(np.stack([node, ta, tb])))
            sign = 1 if det < 0 else -1
            angle = math.acos(float(np.clip(-np.dot(ta, tb), -1.0, 1.0)))
            shells.append(
                Shell(curve=curve, a=a, b=b, node=node, sign=sign, interior_angle=angle)
            )
    return shells


def interior_domain_test(shell: Shell, q: np.ndarray, boundary_tol: float = 1e-8) -> str:
    """Membership of q in the shell's interior domain: inside/outside/boundary."""
    code = shell.loop().classify(np.asarray(q, dtype=float)[None], boundary_tol)[0]
    return {INSIDE: "inside", BOUNDARY: "boundary", OUTSIDE: "outside"}[int(code)]
