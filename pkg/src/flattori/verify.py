"""Named property checks over the whole library, shared by CLI and tests.

Each check returns a CheckResult with the measured residual; the CLI `verify`
command runs the full registry and fails on any violation.  Randomized checks
draw from a single seeded generator so reruns are reproducible.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import bitangent, curves, lifting, su2, topology, torus
from .errors import AdmissibilityError, AnalysisError
from .su2 import UnitQuaternion

CATALOG_NAMES = ("circle", "figure_eight", "sigma_a", "lens_shell")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class VerifyContext:
    """Shared configuration and lazily built fixtures for the check registry."""

    seed: int = 1729
    samples: int = 2048
    lift_steps: int = 4096
    grid_n: int = 48
    refine_iters: int = 40
    _cache: dict = field(default_factory=dict)

    def rng(self, label: str) -> np.random.Generator:
        return np.random.default_rng((self.seed, zlib.crc32(label.encode())))

    def admissible(self, name: str):
        key = ("adm", name)
        if key not in self._cache:
            self._cache[key] = curves.admissible_from_spec(name)
        return self._cache[key]

    def lift(self, name: str):
        key = ("lift", name)
        if key not in self._cache:
            self._cache[key] = lifting.lift_curve(self.admissible(name), self.lift_steps)
        return self._cache[key]

    def crossings(self, name: str):
        key = ("crossings", name)
        if key not in self._cache:
            self._cache[key] = topology.find_crossings(self.admissible(name), self.samples)
        return self._cache[key]

    def shells(self, name: str):
        key = ("shells", name)
        if key not in self._cache:
            self._cache[key] = topology.extract_shells(self.admissible(name), self.crossings(name))
        return self._cache[key]

    def figure_eight_pair(self):
        key = "fig8pair"
        if key not in self._cache:
            g1 = self.admissible("figure_eight")
            g2 = self.admissible("figure_eight_rev")
            self._cache[key] = torus.AdmissiblePair.with_default_mu(g1, g2)
        return self._cache[key]

    def figure_eight_certificate(self):
        key = "fig8cert"
        if key not in self._cache:
            pair = self.figure_eight_pair()
            neg1 = [s for s in self.shells("figure_eight") if not s.is_positive][0]
            pos2 = [s for s in self.shells("figure_eight_rev") if s.is_positive][0]
            self._cache[key] = bitangent.rolling_search(neg1, pos2, pair.mu)
        return self._cache[key]


def random_unit_quaternion(rng) -> UnitQuaternion:
    return UnitQuaternion.from_array(rng.normal(size=4))


def random_unit_vector(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_trig_spec(rng, max_freq: int = 3, scale_range=(0.2, 0.6)) -> curves.TrigPolyPlaneSpec:
    """A random regular trig-polynomial plane spec (rejection sampled)."""
    for _ in range(64):
        n = int(rng.integers(2, max_freq + 1)) + 1
        coeffs = {}
        for name in ("x_cos", "x_sin", "y_cos", "y_sin"):
            c = rng.normal(scale=1.0, size=n)
            c[0] *= 0.3
            coeffs[name] = tuple(c * (0.5 ** np.arange(n)))
        spec = curves.TrigPolyPlaneSpec(
            scale=float(rng.uniform(*scale_range)),
            rotation=float(rng.uniform(0.0, 2 * math.pi)),
            translation=(float(rng.uniform(-0.05, 0.05)), float(rng.uniform(-0.05, 0.05))),
            **coeffs,
        )
        t = np.linspace(0, 2 * math.pi, 512, endpoint=False)
        dp = np.linalg.norm(
            np.diff(spec.plane_jet(t, 0)[..., 0], axis=0), axis=-1
        )
        if dp.min() > 0.2 * dp.max():
            try:
                curve = curves.build_spherical(spec)
            except Exception:
                continue
            return spec
    raise AnalysisError("could not sample a regular trig spec")


def random_admissible_pair(rng) -> torus.AdmissiblePair:
    """Random mu-admissible pair mixing circles and built-in trig curves."""
    for _ in range(64):
        choice = rng.integers(0, 4)
        try:
            if choice == 0:
                k1 = float(rng.uniform(0.6, 3.0))
                k2 = float(rng.uniform(-3.0, -0.3))
                g1 = curves.reparametrize_admissible(curves.circle_curve(k1))
                g2 = curves.reparametrize_admissible(curves.circle_curve(k2))
            elif choice == 1:
                a = float(rng.uniform(0.12, 0.155))
                rot = float(rng.uniform(0, 2 * math.pi))
                base = curves.curve_from_spec(
                    {**curves.builtin_spec("sigma_a", a=a), "rotation": rot}
                )
                g1 = curves.reparametrize_admissible(base)
                g2 = curves.reparametrize_admissible(base.reversed())
            elif choice == 2:
                scale = float(rng.uniform(0.3, 0.5))
                rot = float(rng.uniform(0, 2 * math.pi))
                base = curves.curve_from_spec(
                    {**curves.builtin_spec("figure_eight", scale=scale), "rotation": rot}
                )
                g1 = curves.reparametrize_admissible(base)
                g2 = curves.reparametrize_admissible(base.reversed())
            else:
                scale = float(rng.uniform(0.3, 0.45))
                base = curves.curve_from_spec(curves.builtin_spec("figure_eight", scale=scale))
                g1 = curves.reparametrize_admissible(base)
                k2 = float(rng.uniform(-2.5, -0.4))
                g2 = curves.reparametrize_admissible(curves.circle_curve(k2))
            return torus.AdmissiblePair.with_default_mu(g1, g2)
        except (AdmissibilityError, AnalysisError):
            continue
    raise AnalysisError("could not sample an admissible pair")


# ---------------------------------------------------------------------------
# Check implementations
# ---------------------------------------------------------------------------


def check_su2_bi_invariance(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("bi_invariance")
    worst = 0.0
    for _ in range(100):
        a, b, g = (random_unit_quaternion(rng) for _ in range(3))
        d = su2.distance(a, b)
        worst = max(
            worst,
            abs(su2.distance(g.mul(a), g.mul(b)) - d),
            abs(su2.distance(a.mul(g), b.mul(g)) - d),
        )
    return CheckResult("su2.bi_invariance", worst < 1e-10, worst, 1e-10)


def check_su2_adjoint_compose(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("adjoint_compose")
    worst = 0.0
    for _ in range(100):
        a, b = random_unit_quaternion(rng), random_unit_quaternion(rng)
        x = random_unit_vector(rng)
        lhs = su2.adjoint(su2.qmul(a, b), x)
        rhs = su2.adjoint(a, su2.adjoint(b, x))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return CheckResult("su2.adjoint_composition", worst < 1e-10, worst, 1e-10)


def check_su2_exp_periodic(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("exp_periodic")
    worst = 0.0
    for _ in range(100):
        u = random_unit_vector(rng)
        theta = float(rng.uniform(-6, 6))
        q1 = su2.exp_su2(theta * u)
        q2 = su2.exp_su2((theta + 2 * math.pi) * u)
        worst = max(worst, float(np.linalg.norm(q1.to_array() - q2.to_array())))
    return CheckResult("su2.exp_periodicity", worst < 1e-10, worst, 1e-10)


def check_curves_exact_derivatives(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("exact_derivatives")
    worst = 0.0
    h = 1e-5
    for _ in range(20):
        spec = random_trig_spec(rng)
        curve = curves.build_spherical(spec)
        ts = rng.uniform(0, 2 * math.pi, size=16)
        p_p = curve.point(ts + h)
        p_m = curve.point(ts - h)
        v = curve.velocity(ts)
        a = curve.accel(ts)
        fd_v = (p_p - p_m) / (2 * h)
        fd_a = (p_p - 2 * curve.point(ts) + p_m) / (h * h)
        scale_v = np.linalg.norm(v, axis=-1).max()
        scale_a = max(np.linalg.norm(a, axis=-1).max(), 1.0)
        worst = max(
            worst,
            float(np.abs(fd_v - v).max()) / scale_v,
            float(np.abs(fd_a - a).max()) / scale_a,
        )
    # second differences carry an O(h^2) truncation plus roundoff ~1e-6 relative
    return CheckResult("curves.exact_derivatives", worst < 1e-4, worst, 1e-4)


def check_curves_admissible_idempotent(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for name in CATALOG_NAMES:
        adm = ctx.admissible(name)
        s = np.linspace(0, adm.period_l, 512, endpoint=False)
        density = 0.5 * adm.speed(s) * np.sqrt(1.0 + adm.curvature(s) ** 2)
        worst = max(worst, float(np.abs(density - 1.0).max()))
    return CheckResult(
        "curves.admissible_idempotent",
        worst < 1e-8,
        worst,
        1e-8,
        "admissible-parameter density is 1, so reparametrizing again is the identity",
    )


def check_curves_parallel_formula(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("parallel_formula")
    worst = 0.0
    count = 0
    while count < 8:
        spec = random_trig_spec(rng)
        curve = curves.build_spherical(spec)
        ks = curve.curvature(np.linspace(0, 2 * math.pi, 512, endpoint=False))
        theta_max = math.atan(1.0 / max(abs(ks.min()), abs(ks.max())))
        theta = float(rng.uniform(0.1, 0.9)) * theta_max
        try:
            par = curves.parallel_curve(curve, theta)
        except AnalysisError:
            continue
        ts = np.linspace(0, 2 * math.pi, 256, endpoint=False)
        k = curve.curvature(ts)
        formula = (math.sin(theta) + k * math.cos(theta)) / np.abs(
            math.cos(theta) - k * math.sin(theta)
        )
        worst = max(worst, float(np.abs(par.curvature(ts) - formula).max()))
        count += 1
    return CheckResult("curves.parallel_curvature_formula", worst < 1e-6, worst, 1e-6)


def check_curves_parallel_normalization(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for name in ("figure_eight", "sigma_a"):
        adm = ctx.admissible(name)
        theta = 0.5 * math.atan(1.0 / adm.kappa_max)
        par = curves.ParallelAdmissible(adm, theta)
        s = np.linspace(0, par.period_l, 512, endpoint=False)
        value = par.speed(s) ** 2 * (1.0 + par.curvature(s) ** 2)
        worst = max(worst, float(np.abs(value - 4.0).max()))
    return CheckResult("curves.parallel_normalization", worst < 1e-6, worst, 1e-6)


def check_lifting_fiber_defect(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for name in CATALOG_NAMES:
        adm = ctx.admissible(name)
        start = lifting._fiber_quaternion(adm, 0.0)
        s_grid, quats = lifting._integrate(adm, 0.0, 4 * adm.period_l, start, 4 * ctx.lift_steps)
        worst = max(worst, float(lifting.fiber_defect(adm, s_grid, quats).max()))
    return CheckResult("lifting.fiber_defect_4_periods", worst < 1e-6, worst, 1e-6)


def check_lifting_parity(ctx: VerifyContext) -> CheckResult:
    expected = {"circle": 1, "figure_eight": 0, "sigma_a": 0, "lens_shell": 0}
    bad = []
    for name in CATALOG_NAMES:
        i_lift = lifting.invariant_I(ctx.lift(name))
        n_cross = len(ctx.crossings(name))
        i_parity = 0 if n_cross % 2 == 1 else 1
        if i_lift != i_parity or i_lift != expected[name]:
            bad.append(f"{name}: I={i_lift}, #={n_cross}")
    return CheckResult(
        "lifting.monodromy_parity",
        not bad,
        float(len(bad)),
        0.0,
        "; ".join(bad) or "I(gamma) equals crossing parity on the catalog",
    )


def check_lifting_sign_equivariance(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for name in ("circle", "figure_eight"):
        adm = ctx.admissible(name)
        start = lifting._fiber_quaternion(adm, 0.0)
        _, q_plus = lifting._integrate(adm, 0.0, adm.period_l, start, 1024)
        _, q_minus = lifting._integrate(adm, 0.0, adm.period_l, -start, 1024)
        worst = max(worst, float(np.abs(q_plus + q_minus).max()))
    return CheckResult("lifting.sign_equivariance", worst < 1e-9, worst, 1e-9)


def check_topology_rotation_invariance(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("rotation_invariance")
    worst = 0.0
    for name in ("figure_eight", "sigma_a"):
        adm = ctx.admissible(name)
        base_params = sorted((c.t, c.u) for c in ctx.crossings(name))
        R = random_unit_quaternion(rng).rotation_matrix()
        rotated = adm.rotated(R)
        rot_params = sorted((c.t, c.u) for c in topology.find_crossings(rotated, ctx.samples))
        if len(base_params) != len(rot_params):
            return CheckResult(
                "topology.rotation_invariance", False, math.inf, 1e-8,
                f"{name}: crossing count changed under rotation",
            )
        for (t0, u0), (t1, u1) in zip(base_params, rot_params):
            worst = max(worst, abs(t0 - t1), abs(u0 - u1))
    return CheckResult("topology.rotation_invariance", worst < 1e-8, worst, 1e-8)


def check_topology_shell_simplicity(ctx: VerifyContext) -> CheckResult:
    bad = []
    for name in ("figure_eight", "sigma_a", "lens_shell"):
        for k, shell in enumerate(ctx.shells(name)):
            if not shell.recheck_simplicity():
                bad.append(f"{name}[{k}]")
    return CheckResult(
        "topology.shell_simplicity_recheck",
        not bad,
        float(len(bad)),
        0.0,
        "; ".join(bad) or "all catalog shells pass the 4x-density recheck",
    )


def check_topology_shell_structure(ctx: VerifyContext) -> CheckResult:
    expected = {
        "circle": (0, 0),
        "figure_eight": (1, 1),
        "sigma_a": (3, 0),
        "sigma_a_rev": (0, 3),
        "figure_eight_rev": (1, 1),
    }
    bad = []
    for name, (n_pos, n_neg) in expected.items():
        shells = ctx.shells(name)
        pos = sum(1 for s in shells if s.is_positive)
        neg = sum(1 for s in shells if not s.is_positive)
        if (pos, neg) != (n_pos, n_neg):
            bad.append(f"{name}: ({pos}, {neg}) != ({n_pos}, {n_neg})")
    return CheckResult(
        "topology.shell_structure",
        not bad,
        float(len(bad)),
        0.0,
        "; ".join(bad) or "catalog shell counts and signs match",
    )


def check_torus_flatness(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("flatness")
    worst_K = worst_EG = worst_F = 0.0
    for _ in range(10):
        pair = random_admissible_pair(rng)
        T = torus.build_torus(pair, ctx.lift_steps)
        L1, L2 = T.periods
        for s1 in np.linspace(0, L1, 4, endpoint=False):
            for s2 in np.linspace(0, L2, 4, endpoint=False):
                nf = torus.numeric_forms(T, float(s1), float(s2), 1e-3)
                af = torus.analytic_forms(pair, float(s1), float(s2))
                worst_K = max(worst_K, abs(nf.K))
                worst_EG = max(worst_EG, abs(nf.E - 1.0), abs(nf.G - 1.0))
                worst_F = max(worst_F, abs(nf.F - af.F))
    worst = max(worst_K, worst_EG, worst_F)
    return CheckResult(
        "torus.flatness_chebyshev",
        worst < 1e-3,
        worst,
        1e-3,
        f"K {worst_K:.2e}, E/G {worst_EG:.2e}, F {worst_F:.2e} over 10 random pairs (4x4 grid)",
    )


def check_torus_diameter_monotonicity(ctx: VerifyContext) -> CheckResult:
    pair = ctx.figure_eight_pair()
    T = torus.build_torus(pair, ctx.lift_steps)
    d24 = torus.extrinsic_diameter(T, 24, 0).diameter
    d48 = torus.extrinsic_diameter(T, 48, 0).diameter
    ok = d48 >= d24 - 1e-12
    return CheckResult(
        "torus.diameter_monotonicity",
        ok,
        d24 - d48,
        1e-12,
        f"d(24) = {d24:.8f} <= d(48) = {d48:.8f}",
    )


def check_torus_congruence_invariance(ctx: VerifyContext) -> CheckResult:
    pair = ctx.figure_eight_pair()
    T = torus.build_torus(pair, ctx.lift_steps)
    base = torus.extrinsic_diameter(T, 32, 20).diameter
    worst = 0.0
    for transform in (
        lambda p: torus.swap_negate_pair(p),
        lambda p: torus.parallel_deform_pair(p, 0.04),
    ):
        other = torus.build_torus(transform(pair), ctx.lift_steps)
        d = torus.extrinsic_diameter(other, 32, 20).diameter
        worst = max(worst, abs(d - base))
    return CheckResult("torus.congruence_invariance", worst < 1e-6, worst, 1e-6)


def check_torus_lift_sign_independence(ctx: VerifyContext) -> CheckResult:
    pair = ctx.figure_eight_pair()
    T = torus.build_torus(pair, ctx.lift_steps)
    worst = 0.0
    s1 = np.linspace(0, T.periods[0], 13)
    s2 = np.linspace(0, T.periods[1], 13)
    ref = T.evaluate_batch(np.repeat(s1, 13), np.tile(s2, 13))
    for which in (1, 2):
        flipped = torus.FlatTorusImmersion(
            pair=pair,
            lift1=T.lift1.negated() if which == 1 else T.lift1,
            lift2=T.lift2.negated() if which == 2 else T.lift2,
        )
        vals = flipped.evaluate_batch(np.repeat(s1, 13), np.tile(s2, 13))
        worst = max(worst, float(np.abs(vals - ref).max()))
    return CheckResult("torus.lift_sign_independence", worst < 1e-9, worst, 1e-9)


def _conjugation_residual(T_new, T_old, g: UnitQuaternion, swap: bool = False,
                          negate_s2: bool = False, invert: bool = False,
                          n: int = 12) -> float:
    """max |f_new(s1,s2) - g (op f_old) g^-1| over an n x n grid."""
    L1n, L2n = T_new.periods
    worst = 0.0
    garr = g.to_array()
    ginv = g.conjugate().to_array()
    s1s = np.linspace(0, L1n, n, endpoint=False)
    s2s = np.linspace(0, L2n, n, endpoint=False)
    S1 = np.repeat(s1s, n)
    S2 = np.tile(s2s, n)
    new_vals = T_new.evaluate_batch(S1, S2)
    o1, o2 = (S2, S1) if swap else (S1, S2)
    if negate_s2:
        o2 = -o2
    old_vals = T_old.evaluate_batch(o1, o2)
    if invert:
        old_vals = su2.qarr_conj(old_vals)
    transformed = su2.qarr_mul(su2.qarr_mul(garr[None], old_vals), ginv[None])
    # f is defined up to a global sign through the lifts of the transformed pair
    diff = np.minimum(
        np.abs(transformed - new_vals).max(axis=-1),
        np.abs(transformed + new_vals).max(axis=-1),
    )
    return float(diff.max())


def check_torus_swap_negate(ctx: VerifyContext) -> CheckResult:
    pair = ctx.figure_eight_pair()
    newpair = torus.swap_negate_pair(pair)
    s = np.linspace(0, pair.gamma2.period_l, 64, endpoint=False)
    k_res = float(np.abs(newpair.gamma1.curvature(s) + pair.gamma2.curvature(s)).max())
    twice = torus.swap_negate_pair(newpair)
    inv_res = float(np.abs(twice.gamma1.point(s) - pair.gamma1.point(s)).max())
    T_old = torus.build_torus(pair, ctx.lift_steps)
    T_new = torus.build_torus(newpair, ctx.lift_steps)
    # g with Ad(g): e1 -> -e1, e2 -> e2, e3 -> -e3 is the rotation by pi about e2
    g = UnitQuaternion(0.0, 0.0, 1.0, 0.0)
    conj_res = _conjugation_residual(T_new, T_old, g, swap=True, invert=True)
    worst = max(k_res, inv_res, conj_res)
    return CheckResult(
        "torus.swap_negate_pair",
        k_res < 1e-10 and inv_res < 1e-10 and conj_res < 1e-5,
        worst,
        1e-5,
        f"curvature swap {k_res:.2e}, involution {inv_res:.2e}, conjugation {conj_res:.2e}",
    )


def check_torus_parallel_deform(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("parallel_deform")
    pair = ctx.figure_eight_pair()
    T_old = torus.build_torus(pair, ctx.lift_steps)
    worst = 0.0
    for _ in range(3):
        theta = float(rng.uniform(0.01, 0.08))
        newpair = torus.parallel_deform_pair(pair, theta)
        if not newpair.gamma1.kappa_min > newpair.gamma2.kappa_max:
            return CheckResult("torus.parallel_deform_pair", False, math.inf, 1e-5,
                               "admissibility lost")
        T_new = torus.build_torus(newpair, ctx.lift_steps)
        g = su2.exp_su2(np.array([0.5 * theta, 0.0, 0.0]))
        worst = max(worst, _conjugation_residual(T_new, T_old, g))
    return CheckResult("torus.parallel_deform_pair", worst < 1e-5, worst, 1e-5)


def check_torus_reverse_deform(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("reverse_deform")
    pair = ctx.figure_eight_pair()
    T_old = torus.build_torus(pair, ctx.lift_steps)
    worst_conj = worst_kappa = worst_H = 0.0
    for _ in range(3):
        cot_lo = max(pair.gamma2.kappa_max, 0.05)
        cot_hi = pair.gamma1.kappa_min
        cot = float(rng.uniform(cot_lo + 0.1 * (cot_hi - cot_lo), cot_hi - 0.1 * (cot_hi - cot_lo)))
        theta = math.atan2(1.0, cot)
        newpair = torus.reverse_deform_pair(pair, theta)
        s = np.linspace(0, pair.gamma1.period_l, 64, endpoint=False)
        k1 = pair.gamma1.curvature(s)
        expected = cot + 1.0 / ((k1 - cot) * math.sin(theta) ** 2)
        worst_kappa = max(worst_kappa, float(np.abs(newpair.gamma1.curvature(s) - expected).max()))
        # H flips sign: H_new(s1, s2) = -H_old(s1, -s2) via the closed forms
        for s1 in np.linspace(0, newpair.gamma1.period_l, 12, endpoint=False):
            for s2 in np.linspace(0, newpair.gamma2.period_l, 12, endpoint=False):
                H_new = torus.analytic_forms(newpair, float(s1), float(s2)).H
                H_old = torus.analytic_forms(pair, float(s1), float(-s2)).H
                worst_H = max(worst_H, abs(H_new + H_old))
        T_new = torus.build_torus(newpair, ctx.lift_steps)
        g = su2.exp_su2(np.array([0.5 * theta, 0.0, 0.0]))
        h = UnitQuaternion(0.0, 0.0, 0.0, 1.0)  # rotation by pi about e3
        a = h.conjugate().mul(g)
        worst_conj = max(
            worst_conj, _conjugation_residual(T_new, T_old, a, negate_s2=True)
        )
    worst = max(worst_conj, worst_kappa, worst_H)
    return CheckResult(
        "torus.reverse_deform_pair",
        worst_conj < 1e-5 and worst_kappa < 1e-8 and worst_H < 2e-3,
        worst,
        1e-5,
        f"conjugation {worst_conj:.2e}, curvature law {worst_kappa:.2e}, H flip {worst_H:.2e}",
    )


def _positive_shell_mus(shell, count: int = 5):
    k_max = shell.curvature_range()[1]
    base = abs(k_max) + 1.0
    return [k_max + f * base for f in (0.05, 0.15, 0.4, 1.0, 2.5)][:count]


def check_bitangent_keym_angle(ctx: VerifyContext) -> CheckResult:
    worst = math.inf
    detail = []
    for name in ("figure_eight", "figure_eight_rev", "sigma_a", "lens_shell"):
        for shell in ctx.shells(name):
            if not shell.is_positive:
                continue
            for mu in _positive_shell_mus(shell):
                res = bitangent.inscribed_bitangent_circle(shell, mu)
                gap = res.angle_theta - math.pi
                worst = min(worst, gap)
                detail.append(f"{name}@mu={mu:.2f}: {res.angle_theta:.4f}")
    return CheckResult(
        "bitangent.keym_angle_at_least_pi",
        worst > -1e-6,
        worst,
        -1e-6,
        f"min(angle - pi) = {worst:.3e} over catalog positive shells x 5 mu",
    )


def check_bitangent_lemma51(ctx: VerifyContext) -> CheckResult:
    bad = []
    for name in ("figure_eight", "lens_shell"):
        for shell in ctx.shells(name):
            if shell.is_positive:
                continue
            k_min = shell.curvature_range()[0]
            if k_min <= 0:
                continue
            for frac in (0.25, 0.5, 0.75):
                mu = frac * k_min
                res = bitangent.circumscribed_bitangent_circle(shell, mu)
                if len(res.contact_params) != 2:
                    bad.append(f"{name}@mu={mu:.3f}: {len(res.contact_params)} contacts")
    return CheckResult(
        "bitangent.lemma51_two_contacts",
        not bad,
        float(len(bad)),
        0.0,
        "; ".join(bad) or "circumscribed circles touch exactly twice",
    )


def check_bitangent_ku1(ctx: VerifyContext) -> CheckResult:
    rng = ctx.rng("ku1")
    adm = ctx.admissible("figure_eight")
    L = adm.period_l
    k_min = adm.kappa_min
    passed = 0
    trials = 0
    failures = 0
    while passed + failures < 200 and trials < 4000:
        trials += 1
        mu = float(rng.uniform(0.15, 0.9)) * k_min
        s0 = float(rng.uniform(0, L))
        span = float(rng.uniform(0.05, 0.45)) * L
        s1 = s0 + span
        p, q = adm.point(s0), adm.point(s1)
        try:
            mid = adm.point(0.5 * (s0 + s1))
            C = bitangent.circle_through_points(p, q, mu, mid)
        except AnalysisError:
            continue
        interior = adm.point(np.linspace(s0, s1, 64)[1:-1])
        if np.any(interior @ C.center <= math.cos(C.radius_r)):
            continue  # arc not inside the disk
        # arc must be simple: reject arcs containing a crossing
        if not topology._arc_is_simple(s0 % L, (s0 % L) + span, ctx.crossings("figure_eight"), L):
            continue
        if bitangent.past_part_predicate(C, p, q):
            passed += 1
        else:
            failures += 1
    ok = failures == 0 and passed >= 200
    return CheckResult(
        "bitangent.ku1_past_part",
        ok,
        float(failures),
        0.0,
        f"{passed} arcs in the past part, {failures} violations ({trials} trials)",
    )


def check_bitangent_rolling_stability(ctx: VerifyContext) -> CheckResult:
    pair = ctx.figure_eight_pair()
    neg1 = [s for s in ctx.shells("figure_eight") if not s.is_positive][0]
    pos2 = [s for s in ctx.shells("figure_eight_rev") if s.is_positive][0]
    cert_a = ctx.figure_eight_certificate()
    cert_b = bitangent.rolling_search(neg1, pos2, pair.mu, arc_samples=1024, scan_points=192)
    moves = [
        abs(cert_a.tau - cert_b.tau),
        abs(cert_a.c1_prime - cert_b.c1_prime),
        abs(cert_a.c2_prime - cert_b.c2_prime),
        abs(cert_a.c2 - cert_b.c2),
    ]
    worst = max(moves)
    return CheckResult(
        "bitangent.rolling_stability",
        worst < 1e-4 and cert_b.kind == cert_a.kind,
        worst,
        1e-4,
        f"certificate parameter drift under doubled densities: {worst:.2e}",
    )


def check_bitangent_certificate_diameter(ctx: VerifyContext) -> CheckResult:
    cert = ctx.figure_eight_certificate()
    if cert.kind != "second":
        return CheckResult("bitangent.certificate_diameter", False, math.inf, 1e-2,
                           "expected a second-kind certificate")
    pair = ctx.figure_eight_pair()
    T = torus.build_torus(pair, ctx.lift_steps)
    d = torus.extrinsic_diameter(T, ctx.grid_n, ctx.refine_iters).diameter
    gap = math.pi - d
    return CheckResult(
        "bitangent.certificate_diameter",
        gap < 1e-2,
        gap,
        1e-2,
        f"kind=second and extrinsic diameter {d:.6f} >= pi - 1e-2",
    )


ALL_CHECKS = [
    check_su2_bi_invariance,
    check_su2_adjoint_compose,
    check_su2_exp_periodic,
    check_curves_exact_derivatives,
    check_curves_admissible_idempotent,
    check_curves_parallel_formula,
    check_curves_parallel_normalization,
    check_lifting_fiber_defect,
    check_lifting_parity,
    check_lifting_sign_equivariance,
    check_topology_rotation_invariance,
    check_topology_shell_simplicity,
    check_topology_shell_structure,
    check_torus_flatness,
    check_torus_diameter_monotonicity,
    check_torus_congruence_invariance,
    check_torus_lift_sign_independence,
    check_torus_swap_negate,
    check_torus_parallel_deform,
    check_torus_reverse_deform,
    check_bitangent_keym_angle,
    check_bitangent_lemma51,
    check_bitangent_ku1,
    check_bitangent_rolling_stability,
    check_bitangent_certificate_diameter,
]


def run_all(ctx: VerifyContext | None = None, names: list[str] | None = None):
    """Run the registry (optionally a name subset); returns CheckResults."""
    ctx = ctx or VerifyContext()
    results = []
    for fn in ALL_CHECKS:
        label = fn.__name__.replace("check_", "", 1)
        if names and not any(n in label for n in names):
            continue
        try:
            results.append(fn(ctx))
        except Exception as exc:  # a crashed check is a failed check
            results.append(
                CheckResult(label, False, math.inf, 0.0, f"{type(exc).__name__}: {exc}")
            )
    return results
