"""Flat tori in S^3 from admissible pairs of spherical curves.

The immersion is the product formula

    f(s1, s2) = c1(0)^-1 c1(s1) c2(s2)^-1 c2(0)

built from the lifts of the two curves; it is independent of the lift sign
choices.  First and second fundamental forms have closed forms in the two
geodesic curvatures, and the extrinsic diameter is estimated by an exhaustive
coarse grid over the fundamental domain followed by pattern-search refinement.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import su2
from .curves import ParallelAdmissible, ReversedAdmissible
from .errors import AdmissibilityError, AnalysisError
from .lifting import LiftedCurve, lift_curve
from .su2 import UnitQuaternion


def check_mu_admissible(g1, g2) -> tuple[float, float]:
    """The open admissibility window (max kappa2, min kappa1); raises when empty."""
    lo, hi = g2.kappa_max, g1.kappa_min
    if not lo < hi:
        raise AdmissibilityError(
            f"not admissible: min kappa1 = {hi:.6f} does not exceed max kappa2 = {lo:.6f}"
        )
    return lo, hi


def default_mu(window: tuple[float, float]) -> float:
    """Midpoint of the positive part of the window (mu must be positive)."""
    lo, hi = window
    lo = max(lo, 0.0)
    if not lo < hi:
        raise AdmissibilityError(
            f"admissibility window ({window[0]:.6f}, {window[1]:.6f}) has no positive part"
        )
    return 0.5 * (lo + hi)


@dataclass
class AdmissiblePair:
    """Two admissible curves with min kappa1 > mu > max kappa2, mu > 0."""

    gamma1: object
    gamma2: object
    mu: float

    def __post_init__(self):
        window = check_mu_admissible(self.gamma1, self.gamma2)
        if not (window[0] < self.mu < window[1]) or self.mu <= 0:
            raise AdmissibilityError(
                f"mu = {self.mu:.6f} outside the positive admissibility window "
                f"({window[0]:.6f}, {window[1]:.6f})"
            )

    @staticmethod
    def with_default_mu(g1, g2) -> "AdmissiblePair":
        return AdmissiblePair(g1, g2, default_mu(check_mu_admissible(g1, g2)))


@dataclass
class FlatTorusImmersion:
    """Evaluator of the product immersion over [0, 2 l1) x [0, 2 l2)."""

    pair: AdmissiblePair
    lift1: LiftedCurve
    lift2: LiftedCurve
    base1: UnitQuaternion = field(init=False)
    base2: UnitQuaternion = field(init=False)

    def __post_init__(self):
        self.base1 = self.lift1.start()
        self.base2 = self.lift2.start()

    @property
    def periods(self) -> tuple[float, float]:
        """Periods of f in (s1, s2); the lifts may be anti-periodic, so 2 l."""
        return 2.0 * self.lift1.period_l, 2.0 * self.lift2.period_l

    def evaluate_batch(self, s1, s2, interp: str = "magnus") -> np.ndarray:
        s1 = np.atleast_1d(np.asarray(s1, dtype=float))
        s2 = np.atleast_1d(np.asarray(s2, dtype=float))
        c1 = self.lift1.values(s1, interp=interp)
        c2 = self.lift2.values(s2, interp=interp)
        left = su2.qarr_mul(self.base1.conjugate().to_array()[None], c1)
        right = su2.qarr_mul(su2.qarr_conj(c2), self.base2.to_array()[None])
        return su2.qarr_mul(left, right)

    def evaluate(self, s1: float, s2: float, interp: str = "magnus") -> UnitQuaternion:
        return UnitQuaternion.from_array(self.evaluate_batch(s1, s2, interp=interp)[0])

    def grid(self, n1: int, n2: int) -> np.ndarray:
        """Row-major samples over the fundamental domain, shape (n1, n2, 4)."""
        L1, L2 = self.periods
        s1 = np.repeat(np.arange(n1) * (L1 / n1), n2)
        s2 = np.tile(np.arange(n2) * (L2 / n2), n1)
        return self.evaluate_batch(s1, s2).reshape(n1, n2, 4)


def evaluate_f(T: FlatTorusImmersion, s1: float, s2: float) -> UnitQuaternion:
    return T.evaluate(s1, s2)


def build_torus(pair: AdmissiblePair, lift_steps: int = 4096) -> FlatTorusImmersion:
    return FlatTorusImmersion(
        pair=pair,
        lift1=lift_curve(pair.gamma1, lift_steps),
        lift2=lift_curve(pair.gamma2, lift_steps),
    )


# ---------------------------------------------------------------------------
# Fundamental forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticForms:
    E: float
    F: float
    G: float
    h12: float
    H: float
    omega: float


def analytic_forms(pair: AdmissiblePair, s1: float, s2: float) -> AnalyticForms:
    """Closed-form fundamental data from the two geodesic curvatures.

    In asymptotic coordinates the metric is ds1^2 + 2 cos(omega) ds1 ds2 +
    ds2^2 with omega = pi - alpha1 + alpha2, tan(alpha_i) = kappa_i, and the
    second form is 2 sin(omega) ds1 ds2; the mean curvature reduces to
    (1 + kappa1 kappa2)/(kappa1 - kappa2).
    """
    k1 = float(pair.gamma1.curvature(s1))
    k2 = float(pair.gamma2.curvature(s2))
    omega = math.pi - math.atan(k1) + math.atan(k2)
    return AnalyticForms(
        E=1.0,
        F=math.cos(omega),
        G=1.0,
        h12=math.sin(omega),
        H=(1.0 + k1 * k2) / (k1 - k2),
        omega=omega,
    )


def _cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Generalized cross product: the vector orthogonal to a, b, c with
    det(a, b, c, out) > 0."""
    out = np.empty(4)
    for i in range(4):
        idx = [j for j in range(4) if j != i]
        minor = np.stack([a[idx], b[idx], c[idx]])
        out[i] = (-1.0) ** i * np.linalg.det(minor)
    # det(a,b,c,out) expands with alternating signs; fix the orientation
    M = np.stack([a, b, c, out])
    if np.linalg.det(M) < 0:
        out = -out
    return out


@dataclass(frozen=True)
class NumericForms:
    E: float
    F: float
    G: float
    h11: float
    h12: float
    h22: float
    K: float
    H: float


def numeric_forms(T: FlatTorusImmersion, s1: float, s2: float, h: float = 1e-3) -> NumericForms:
    """Finite-difference fundamental forms, the cross-check of the closed forms.

    Central differences of the immersion embedded in R^4; the surface normal
    inside S^3 comes from the 4D cross product of (f, f_s1, f_s2) and the
    Gaussian curvature from the Gauss equation K = 1 + det h / det g.
    """
    if not 1e-5 <= h <= 1e-2:
        raise ValueError("numeric_forms: h must lie in [1e-5, 1e-2]")
    offsets = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
    a1 = np.array([s1 + i * h for i, _ in offsets])
    a2 = np.array([s2 + j * h for _, j in offsets])
    vals = T.evaluate_batch(a1, a2)
    stencil = {off: vals[k] for k, off in enumerate(offsets)}
    f = stencil[(0, 0)]
    f1 = (stencil[(1, 0)] - stencil[(-1, 0)]) / (2 * h)
    f2 = (stencil[(0, 1)] - stencil[(0, -1)]) / (2 * h)
    f11 = (stencil[(1, 0)] - 2 * f + stencil[(-1, 0)]) / (h * h)
    f22 = (stencil[(0, 1)] - 2 * f + stencil[(0, -1)]) / (h * h)
    f12 = (stencil[(1, 1)] - stencil[(1, -1)] - stencil[(-1, 1)] + stencil[(-1, -1)]) / (4 * h * h)
    E = float(f1 @ f1)
    F = float(f1 @ f2)
    G = float(f2 @ f2)
    det_g = E * G - F * F
    if det_g < 1e-8:
        raise AnalysisError(f"numeric_forms: degenerate metric, det g = {det_g:.2e}")
    nu = _cross4(f, f1, f2)
    nu /= np.linalg.norm(nu)
    h11 = float(f11 @ nu)
    h12 = float(f12 @ nu)
    h22 = float(f22 @ nu)
    K = 1.0 + (h11 * h22 - h12 * h12) / det_g
    H = (E * h22 - 2 * F * h12 + G * h11) / (2 * det_g)
    return NumericForms(E=E, F=F, G=G, h11=h11, h12=h12, h22=h22, K=K, H=H)


# ---------------------------------------------------------------------------
# Extrinsic diameter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiameterResult:
    diameter: float
    witness_p: tuple[float, float]
    witness_q: tuple[float, float]
    coarse_diameter: float
    grid_n: int
    refine_iters: int


def _max_threads() -> int:
    env = os.environ.get("FTF_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def extrinsic_diameter(T: FlatTorusImmersion, coarse_n: int = 48,
                       refine_iters: int = 40, top_k: int = 16) -> DiameterResult:
    """Lower-bound search for sup arccos <f(p), f(q)>.

    Exhaustive coarse grid over the fundamental domain (all f values are
    precomputed once, so the pair stage is pure dot products), then
    derivative-free pattern search from the best candidate pairs.  The
    reduction is deterministic: maxima tie-break on the lexicographically
    first flat index, so threaded and serial runs agree exactly.
    """
    if coarse_n < 24:
        raise ValueError("extrinsic_diameter needs coarse_n >= 24")
    L1, L2 = T.periods
    n = coarse_n
    vals = T.grid(n, n).reshape(n * n, 4)

    nthreads = _max_threads()
    block = max(256, n * n // (4 * nthreads) if nthreads > 1 else n * n)

    def scan(i0: int) -> tuple[float, int, int]:
        dots = vals[i0 : i0 + block] @ vals.T
        k = int(np.argmin(dots))
        r, c = divmod(k, n * n)
        return float(dots[r, c]), i0 + r, c

    starts = list(range(0, n * n, block))
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(scan, starts))
    else:
        results = [scan(i0) for i0 in starts]
    # deterministic reduction: smallest dot, then lexicographic (i, j)
    results.sort(key=lambda item: (item[0], item[1], item[2]))
    best_dot, bi, bj = results[0]

    h1, h2 = L1 / n, L2 / n

    def params_of(flat: int) -> tuple[float, float]:
        i, j = divmod(flat, n)
        return i * h1, j * h2

    def objective_batch(X: np.ndarray) -> np.ndarray:
        """Pairwise dots for rows (s1, s2, s1', s2')."""
        s1 = np.concatenate([X[:, 0], X[:, 2]])
        s2 = np.concatenate([X[:, 1], X[:, 3]])
        v = T.evaluate_batch(s1, s2)
        m = len(X)
        return np.einsum("ij,ij->i", v[:m], v[m:])

    # candidate pairs for refinement: best top_k distinct coarse pairs
    dots_best = vals[bi] @ vals.T
    order = np.argsort(dots_best, kind="stable")[:top_k]
    seeds = [(bi, bj)] + [(bi, int(j)) for j in order if int(j) != bj][: top_k - 1]

    X = np.array([[*params_of(si), *params_of(sj)] for si, sj in seeds])
    val = objective_batch(X)
    step = np.tile(np.array([h1, h2, h1, h2]), (len(X), 1))
    probes = np.concatenate([np.eye(4), -np.eye(4)])  # 8 one-coordinate moves
    for _ in range(refine_iters):
        cand = X[:, None, :] + probes[None, :, :] * step[:, None, :]
        flat = cand.reshape(-1, 4)
        cvals = objective_batch(flat).reshape(len(X), len(probes))
        best_idx = np.argmin(cvals, axis=1)
        best_val = cvals[np.arange(len(X)), best_idx]
        improved = best_val < val - 1e-15
        X[improved] = cand[improved, best_idx[improved]]
        val[improved] = best_val[improved]
        step[~improved] *= 0.5
    k_best = int(np.argmin(val))
    if val[k_best] < best_dot - 1e-15:
        dot, x = float(val[k_best]), X[k_best]
    else:
        dot, x = best_dot, np.array([*params_of(bi), *params_of(bj)])
    diameter = math.acos(max(-1.0, min(1.0, dot)))
    coarse = math.acos(max(-1.0, min(1.0, best_dot)))
    return DiameterResult(
        diameter=diameter,
        witness_p=(x[0] % L1, x[1] % L2),
        witness_q=(x[2] % L1, x[3] % L2),
        coarse_diameter=coarse,
        grid_n=n,
        refine_iters=refine_iters,
    )


# ---------------------------------------------------------------------------
# Pair transforms (swap/negate, parallel deformation, reversing deformation)
# ---------------------------------------------------------------------------


class _AntipodalAdmissible:
    """Pointwise negation of an admissible curve (still admissible)."""

    def __init__(self, base):
        self.base_adm = base
        self.period_l = base.period_l
        self.kappa_min = -base.kappa_max
        self.kappa_max = -base.kappa_min

    @property
    def period(self):
        return self.period_l

    def point(self, s):
        return -self.base_adm.point(s)

    def velocity(self, s):
        return -self.base_adm.velocity(s)

    def speed(self, s):
        return self.base_adm.speed(s)

    def unit_tangent(self, s):
        return -self.base_adm.unit_tangent(s)

    def normal(self, s):
        # n = gamma x gamma' / |gamma'| is invariant under gamma -> -gamma
        return self.base_adm.normal(s)

    def curvature(self, s):
        return -self.base_adm.curvature(s)

    def rotated(self, R):
        return _AntipodalAdmissible(self.base_adm.rotated(R))


def swap_negate_pair(pair: AdmissiblePair) -> AdmissiblePair:
    """(gamma1, gamma2) -> (-gamma2, -gamma1); curvatures negate and swap.

    The associated torus is congruent to the (s2, s1) reversal of the original
    (conjugation by a fixed rotation composed with inversion).
    """
    g1 = _AntipodalAdmissible(pair.gamma2)
    g2 = _AntipodalAdmissible(pair.gamma1)
    window = check_mu_admissible(g1, g2)
    mu = pair.mu if window[0] < pair.mu < window[1] and pair.mu > 0 else default_mu(window)
    return AdmissiblePair(g1, g2, mu)


def parallel_deform_pair(pair: AdmissiblePair, theta: float) -> AdmissiblePair:
    """Parallel pair (gamma1^theta, gamma2^theta); the torus conjugates by
    exp(theta e1 / 2).

    Requires cos(theta) - kappa_i sin(theta) > 0 on both curves.
    """
    for i, g in enumerate((pair.gamma1, pair.gamma2), start=1):
        s = np.linspace(0.0, g.period_l, 2048, endpoint=False)
        factor = math.cos(theta) - g.curvature(s) * math.sin(theta)
        if factor.min() <= 1e-10:
            bad = s[factor <= 1e-10]
            raise AnalysisError(
                f"parallel deformation: cos(theta) - kappa_{i} sin(theta) <= 0 "
                f"for s in [{bad.min():.6f}, {bad.max():.6f}] (theta={theta:.6f})"
            )
    if theta == 0.0:
        return pair
    g1 = ParallelAdmissible(pair.gamma1, theta)
    g2 = ParallelAdmissible(pair.gamma2, theta)
    window = check_mu_admissible(g1, g2)
    mu = pair.mu if window[0] < pair.mu < window[1] and pair.mu > 0 else default_mu(window)
    return AdmissiblePair(g1, g2, mu)


def reverse_deform_pair(pair: AdmissiblePair, theta: float) -> AdmissiblePair:
    """The mean-curvature-reversing deformation (gamma1^theta(s), gamma2^theta(-s)).

    Requires 0 < theta < pi and kappa1 > cot(theta) > kappa2 everywhere; the
    new curvatures straddle cot(theta) and the torus conjugates to the
    (s1, -s2) reflection of the original, flipping the sign of H.
    """
    if not 0.0 < theta < math.pi:
        raise AnalysisError("reverse deformation needs 0 < theta < pi")
    cot = math.cos(theta) / math.sin(theta)
    if not (pair.gamma1.kappa_min > cot > pair.gamma2.kappa_max):
        raise AnalysisError(
            f"reverse deformation: kappa1 > cot(theta) > kappa2 fails "
            f"(min kappa1 = {pair.gamma1.kappa_min:.6f}, cot = {cot:.6f}, "
            f"max kappa2 = {pair.gamma2.kappa_max:.6f})"
        )
    g1 = ParallelAdmissible(pair.gamma1, theta)
    g2 = ReversedAdmissible(ParallelAdmissible(pair.gamma2, theta))
    window = check_mu_admissible(g1, g2)
    mu = pair.mu if window[0] < pair.mu < window[1] and pair.mu > 0 else default_mu(window)
    return AdmissiblePair(g1, g2, mu)


def solve_conjugator(lhs: list[np.ndarray], rhs: list[np.ndarray]) -> UnitQuaternion:
    """Unit quaternion g with g M g^-1 = N for the probe pairs (M, N).

    gM = Ng is linear in g, so the stacked 4x4 blocks are solved by the SVD
    null vector; two generic probes pin g up to sign.
    """
    blocks = []
    for m, nn in zip(lhs, rhs):
        blocks.append(_right_mul_matrix(m) - _left_mul_matrix(nn))
    A = np.vstack(blocks)
    _, _, vt = np.linalg.svd(A)
    return UnitQuaternion.from_array(vt[-1]).canonical_sign()


def _left_mul_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]]
    )


def _right_mul_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [[w, -x, -y, -z], [x, w, z, -y], [y, -z, w, x], [z, y, -x, w]]
    )


# ---------------------------------------------------------------------------
# Mesh export
# ---------------------------------------------------------------------------


def mesh_rows(T: FlatTorusImmersion, grid_n: int):
    """Row-major (s1, s2, w, x, y, z) rows over the fundamental domain."""
    L1, L2 = T.periods
    vals = T.grid(grid_n, grid_n)
    for i in range(grid_n):
        for j in range(grid_n):
            w, x, y, z = vals[i, j]
            yield (i * L1 / grid_n, j * L2 / grid_n, w, x, y, z)
