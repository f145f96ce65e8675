"""Matplotlib figures rendered next to the delimited report outputs."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SHELL_COLORS = {1: "tab:green", -1: "tab:red"}


def _plane_projector(*point_arrays):
    """Stereographic projection recentered so the data sits away from the pole."""
    allpts = np.vstack([np.atleast_2d(p) for p in point_arrays])
    center = allpts.mean(axis=0)
    norm = np.linalg.norm(center)
    center = center / norm if norm > 1e-9 else np.array([0.0, 0.0, -1.0])
    target = np.array([0.0, 0.0, -1.0])
    v = np.cross(center, target)
    s, c = np.linalg.norm(v), float(center @ target)
    if s < 1e-12:
        R = np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    else:
        vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
        R = np.eye(3) + vx + vx @ vx * ((1 - c) / (s * s))

    def project(pts):
        q = np.atleast_2d(pts) @ R.T
        denom = np.maximum(1.0 - q[:, 2], 1e-9)
        return q[:, :2] / denom[:, None]

    return project


def _curve_points(curve, n: int = 1024) -> np.ndarray:
    s = np.linspace(0.0, curve.period, n + 1)
    return curve.point(s)


def save_curve_figure(path, curve, crossings=(), shells=()):
    """Stereographic-plane view of a curve with crossings and shells marked."""
    poly = _curve_points(curve)
    project = _plane_projector(poly)
    fig, ax = plt.subplots(figsize=(6, 6))
    uv = project(poly)
    ax.plot(uv[:, 0], uv[:, 1], color="0.3", lw=1.2, zorder=1)
    for shell in shells:
        pts = project(curve.point(np.linspace(shell.a, shell.b, 400)))
        label = "positive shell" if shell.is_positive else "negative shell"
        ax.plot(pts[:, 0], pts[:, 1], color=_SHELL_COLORS[shell.sign], lw=2.4,
                alpha=0.7, zorder=2, label=label)
    for c in crossings:
        p = project(c.point[None])[0]
        ax.plot(p[0], p[1], "o", color="tab:blue", ms=6, zorder=3)
    handles, labels = ax.get_legend_handles_labels()
    uniq = dict(zip(labels, handles))
    if uniq:
        ax.legend(uniq.values(), uniq.keys(), loc="best", fontsize=8)
    ax.set_aspect("equal")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    ax.set_title("stereographic plane")
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def save_pair_figure(path, pair):
    fig, axes = plt.subplots(1, 2, figsize=(10, 5))
    for ax, curve, name in ((axes[0], pair.gamma1, "gamma1"), (axes[1], pair.gamma2, "gamma2")):
        poly = _curve_points(curve)
        uv = _plane_projector(poly)(poly)
        ax.plot(uv[:, 0], uv[:, 1], color="0.3", lw=1.2)
        ax.set_aspect("equal")
        ax.set_title(name)
        ax.set_xlabel("u")
        ax.set_ylabel("v")
    fig.suptitle(f"mu = {pair.mu:.6f}")
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def save_torus_figure(path, T, n: int = 96):
    """Mean curvature and asymptotic angle over the fundamental domain."""
    pair = T.pair
    L1, L2 = T.periods
    s1 = np.linspace(0, L1, n, endpoint=False)
    s2 = np.linspace(0, L2, n, endpoint=False)
    k1 = pair.gamma1.curvature(s1)
    k2 = pair.gamma2.curvature(s2)
    H = (1.0 + np.outer(k1, k2)) / (k1[:, None] - k2[None, :])
    omega = math.pi - np.arctan(k1)[:, None] + np.arctan(k2)[None, :]
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.6))
    for ax, data, label in ((axes[0], H, "mean curvature H"), (axes[1], omega, "angle omega")):
        im = ax.pcolormesh(s2, s1, data, shading="auto", cmap="RdBu_r")
        fig.colorbar(im, ax=ax)
        ax.set_xlabel("s2")
        ax.set_ylabel("s1")
        ax.set_title(label)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def save_diameter_figure(path, T, result, n: int = 96):
    """Distance field from the witness point with both witnesses marked."""
    L1, L2 = T.periods
    s1 = np.linspace(0, L1, n, endpoint=False)
    s2 = np.linspace(0, L2, n, endpoint=False)
    vals = T.grid(n, n).reshape(n * n, 4)
    wp = T.evaluate_batch(np.array([result.witness_p[0]]), np.array([result.witness_p[1]]))[0]
    dist = np.arccos(np.clip(vals @ wp, -1.0, 1.0)).reshape(n, n)
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    im = ax.pcolormesh(s2, s1, dist, shading="auto", cmap="viridis")
    fig.colorbar(im, ax=ax, label="distance to f(p*)")
    ax.plot(result.witness_p[1] % L2, result.witness_p[0] % L1, "w*", ms=12, mec="k")
    ax.plot(result.witness_q[1] % L2, result.witness_q[0] % L1, "r*", ms=12, mec="k")
    ax.set_xlabel("s2")
    ax.set_ylabel("s1")
    ax.set_title(f"diameter lower bound {result.diameter:.6f}")
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def save_bitangent_figure(path, shell1, shell2, cert, circle=None):
    """The rolled configuration in the stereographic plane."""
    R = cert.isometry_phi.rotation_matrix()
    placed = shell1.curve.rotated(R)
    curve2 = shell2.curve
    poly2 = _curve_points(curve2)
    arc1 = placed.point(np.linspace(shell1.a, shell1.b, 700))
    arc2 = curve2.point(np.linspace(shell2.a, shell2.b, 700))
    extras = [poly2, arc1, arc2]
    if circle is not None:
        extras.append(circle.sample(512))
    project = _plane_projector(*extras)
    fig, ax = plt.subplots(figsize=(6.5, 6.5))
    uv = project(poly2)
    ax.plot(uv[:, 0], uv[:, 1], color="0.35", lw=1.2, label="gamma2")
    uv = project(arc1)
    ax.plot(uv[:, 0], uv[:, 1], color="tab:purple", lw=1.8, label="placed shell of gamma1")
    uv = project(arc2)
    ax.plot(uv[:, 0], uv[:, 1], color="tab:green", lw=2.2, alpha=0.65, label="shell of gamma2")
    if circle is not None:
        uv = project(circle.sample(512))
        ax.plot(uv[:, 0], uv[:, 1], color="tab:orange", lw=1.0, ls="--", label="mu-circle")
    for point, name in ((cert.P, "P"), (cert.P_prime, "P'")):
        uv = project(np.asarray(point)[None])[0]
        ax.plot(uv[0], uv[1], "o", color="tab:blue", ms=7)
        ax.annotate(name, uv, textcoords="offset points", xytext=(6, 6))
    ax.set_aspect("equal")
    ax.legend(fontsize=8, loc="best")
    ax.set_title(f"bi-tangent of the {cert.kind} kind (mu = {cert.mu:.4f})")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)


def save_verify_figure(path, results):
    """One bar per check: measured residual, green for pass."""
    names = [r.name for r in results]
    residuals = [max(abs(r.residual), 1e-18) if math.isfinite(r.residual) else 1.0 for r in results]
    colors = ["tab:green" if r.passed else "tab:red" for r in results]
    fig, ax = plt.subplots(figsize=(8, 0.34 * len(names) + 1.2))
    ax.barh(range(len(names)), residuals, color=colors)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xscale("log")
    ax.set_xlabel("measured residual")
    ax.invert_yaxis()
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
