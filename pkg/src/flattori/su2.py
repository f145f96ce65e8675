"""Unit quaternions as S^3 = SU(2), their Lie algebra R^3, and the bundle maps.

The basis e1, e2, e3 of the Lie algebra multiplies exactly like the quaternion
units i, j, k (e1*e2 = e3 cyclically, ei^2 = -1), so Lie-algebra vectors are
plain numpy 3-vectors with the ordinary dot and cross product, and the adjoint
action Ad(a)x = a x a^-1 is quaternion rotation.  The fibration used everywhere
downstream is

    p2(a) = (Ad(a) e3, Ad(a) e1)

onto the unit tangent bundle of S^2, a double covering with p2(a) = p2(-a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def _clamp(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return lo if x < lo else hi if x > hi else x


@dataclass(frozen=True)
class UnitQuaternion:
    """Element of S^3, renormalized on construction."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
        if n == 0.0:
            raise ValueError("zero quaternion")
        if abs(n - 1.0) > 1e-15:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @staticmethod
    def identity() -> "UnitQuaternion":
        return UnitQuaternion(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_array(a) -> "UnitQuaternion":
        return UnitQuaternion(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def conjugate(self) -> "UnitQuaternion":
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    inverse = conjugate

    def mul(self, other: "UnitQuaternion") -> "UnitQuaternion":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return UnitQuaternion(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        )

    __mul__ = mul

    def dot(self, other: "UnitQuaternion") -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def rotate(self, v: np.ndarray) -> np.ndarray:
        """Adjoint action on a Lie-algebra vector (rotation of R^3)."""
        w, x, y, z = self.w, self.x, self.y, self.z
        u = np.array([x, y, z])
        return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)

    def rotation_matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )

    def canonical_sign(self) -> "UnitQuaternion":
        """The representative of {q, -q} whose first nonzero component is >= 0."""
        for c in (self.w, self.x, self.y, self.z):
            if abs(c) > 1e-12:
                return self if c > 0 else -self
        return self


class FramedPoint(NamedTuple):
    """Point of the unit tangent bundle of S^2: base point and unit tangent."""

    x: np.ndarray
    y: np.ndarray


def qmul(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    return a.mul(b)


def adjoint(a: UnitQuaternion, v: np.ndarray) -> np.ndarray:
    return a.rotate(np.asarray(v, dtype=float))


def exp_su2(u: np.ndarray) -> UnitQuaternion:
    """Group exponential of the Lie-algebra vector u: cos|u| + sin|u| u/|u|."""
    u = np.asarray(u, dtype=float)
    theta = float(np.linalg.norm(u))
    if theta < 1e-300:
        return UnitQuaternion.identity()
    s = math.sin(theta) / theta
    return UnitQuaternion(math.cos(theta), s * u[0], s * u[1], s * u[2])


def project_p2(a: UnitQuaternion) -> FramedPoint:
    """The double covering S^3 -> US^2, a |-> (Ad(a)e3, Ad(a)e1)."""
    return FramedPoint(a.rotate(E3), a.rotate(E1))


def hopf_project(a: UnitQuaternion) -> np.ndarray:
    """Hopf fibration S^3 -> S^2 as the composite of p2 with the bundle projection."""
    return a.rotate(E3)


def quaternion_from_rotation(R: np.ndarray) -> UnitQuaternion:
    """Convert a rotation matrix to the canonical-sign quaternion (Shepperd)."""
    R = np.asarray(R, dtype=float)
    t = np.trace(R)
    if t > 0:
        r = math.sqrt(1.0 + t)
        s = 0.5 / r
        q = (0.5 * r, (R[2, 1] - R[1, 2]) * s, (R[0, 2] - R[2, 0]) * s, (R[1, 0] - R[0, 1]) * s)
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        r = math.sqrt(1.0 + R[i, i] - R[j, j] - R[k, k])
        s = 0.5 / r
        xyz = [0.0, 0.0, 0.0]
        xyz[i] = 0.5 * r
        xyz[j] = (R[j, i] + R[i, j]) * s
        xyz[k] = (R[k, i] + R[i, k]) * s
        q = ((R[k, j] - R[j, k]) * s, xyz[0], xyz[1], xyz[2])
    return UnitQuaternion(*q).canonical_sign()


def frame_to_quaternion(x: np.ndarray, t: np.ndarray, tol: float = 1e-8):
    """Both quaternions +-q over the fiber p2^-1(x, t).

    Builds the rotation with columns (t, x cross t, x) and converts it; rejects
    input frames that are not orthonormal to within ``tol``.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if (
        abs(np.linalg.norm(x) - 1.0) > tol
        or abs(np.linalg.norm(t) - 1.0) > tol
        or abs(float(np.dot(x, t))) > tol
    ):
        raise ValueError("frame_to_quaternion: input frame is not orthonormal")
    R = np.column_stack([t, np.cross(x, t), x])
    q = quaternion_from_rotation(R)
    return q, -q


def distance(a: UnitQuaternion, b: UnitQuaternion) -> float:
    """Geodesic distance on S^3 via the ambient R^4 inner product."""
    return math.acos(_clamp(a.dot(b)))


def slerp(a: UnitQuaternion, b: UnitQuaternion, alpha: float) -> UnitQuaternion:
    """Renormalized spherical-linear interpolation, taking the short arc."""
    d = a.dot(b)
    bq = b if d >= 0 else -b
    d = abs(d)
    if d > 1.0 - 1e-12:
        va = a.to_array()
        vb = bq.to_array()
        return UnitQuaternion.from_array((1 - alpha) * va + alpha * vb)
    omega = math.acos(_clamp(d))
    so = math.sin(omega)
    wa = math.sin((1 - alpha) * omega) / so
    wb = math.sin(alpha * omega) / so
    return UnitQuaternion.from_array(wa * a.to_array() + wb * bq.to_array())


# ---------------------------------------------------------------------------
# Batched operations on (n, 4) arrays, used by lifts, tori and exports.
# ---------------------------------------------------------------------------


def qarr_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qarr_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w2, x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        ],
        axis=-1,
    )


def qarr_conj(q: np.ndarray) -> np.ndarray:
    out = q.copy()
    out[..., 1:] *= -1.0
    return out


def qarr_exp(u: np.ndarray) -> np.ndarray:
    """Batched exp_su2 over an (n, 3) array of Lie-algebra vectors."""
    u = np.atleast_2d(u)
    theta = np.linalg.norm(u, axis=-1)
    s = np.ones_like(theta)
    nz = theta > 1e-300
    s[nz] = np.sin(theta[nz]) / theta[nz]
    return np.concatenate([np.cos(theta)[..., None], s[..., None] * u], axis=-1)


def qarr_rotate_e1(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [1 - 2 * (y * y + z * z), 2 * (x * y + w * z), 2 * (x * z - w * y)], axis=-1
    )


def qarr_rotate_e3(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)], axis=-1
    )
