"""Command-line front end.

Commands: analyze-curve, build-torus, diameter, bitangent, verify, catalog,
export.  Reports are JSON on stdout; with --out DIR the same report is written
to disk together with delimited data files and matplotlib figures.  Exit
codes: 0 success, 1 spec parse, 2 analysis, 3 admissibility, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import bitangent, curves, lifting, report, topology, torus, verify
from .errors import AdmissibilityError, AnalysisError, FlattoriError, SpecError

TOLERANCE_RANGES = {
    # name: (default, low, high)
    "pi_tol": (1e-2, 1e-9, 0.1),
    "boundary": (1e-7, 1e-9, 1e-4),
    "residual": (1e-6, 1e-12, 1e-3),
}


@dataclass
class RunConfig:
    command: str = ""
    samples: int = 2048
    lift_steps: int = 4096
    grid_n: int = 48
    refine_iters: int = 40
    seed: int = 1729
    out: str | None = None
    figures: bool = True
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if min(self.samples, self.lift_steps, self.grid_n) <= 0 or self.refine_iters < 0:
            raise SpecError("all counts must be positive")
        for key, value in self.tolerances.items():
            if key not in TOLERANCE_RANGES:
                raise SpecError(f"unknown tolerance {key!r} (have {sorted(TOLERANCE_RANGES)})")
            _, lo, hi = TOLERANCE_RANGES[key]
            if not lo <= value <= hi:
                raise SpecError(f"tolerance {key}={value} outside [{lo}, {hi}]")

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, TOLERANCE_RANGES[name][0])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argument errors are spec-parse errors (exit code 1)
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_json_or_name(text: str):
    """A curve/pair argument: inline JSON, a file path, or a builtin name."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"malformed inline JSON: {exc}") from exc
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpecError(f"malformed spec file {text}: {exc}") from exc
    return text  # builtin name, possibly with parameters


def _curve_from_arg(arg: str, config: RunConfig):
    return curves.admissible_from_spec(_load_json_or_name(arg))


def _pair_from_arg(arg: str, config: RunConfig) -> torus.AdmissiblePair:
    spec = _load_json_or_name(arg)
    if isinstance(spec, str):
        if ":" not in spec:
            raise SpecError(
                "pair argument must be a JSON file/object or 'curve1:curve2[:mu]'"
            )
        parts = spec.split(":")
        gamma1, gamma2 = parts[0], parts[1]
        mu = float(parts[2]) if len(parts) > 2 else None
        spec = {"gamma1": gamma1, "gamma2": gamma2}
        if mu is not None:
            spec["mu"] = mu
    if not isinstance(spec, dict) or "gamma1" not in spec or "gamma2" not in spec:
        raise SpecError("pair spec needs 'gamma1' and 'gamma2'")
    g1 = curves.admissible_from_spec(spec["gamma1"])
    g2 = curves.admissible_from_spec(spec["gamma2"])
    if "mu" in spec and spec["mu"] is not None:
        return torus.AdmissiblePair(g1, g2, float(spec["mu"]))
    return torus.AdmissiblePair.with_default_mu(g1, g2)


def _emit(config: RunConfig, payload: dict, name: str = "report.json"):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        with open(os.path.join(config.out, name), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _outpath(config: RunConfig, name: str) -> str:
    os.makedirs(config.out, exist_ok=True)
    return os.path.join(config.out, name)


def _write_csv(path: str, header: str, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def _curve_report(config: RunConfig, adm, spec_echo):
    crossings = topology.find_crossings(adm, config.samples)
    shells = topology.extract_shells(adm, crossings)
    lift = lifting.lift_curve(adm, config.lift_steps)
    inv = lifting.invariant_I(lift)
    parity = 0 if len(crossings) % 2 == 1 else 1
    payload = {
        "curve": spec_echo,
        "period_l": adm.period_l,
        "kappa_min": adm.kappa_min,
        "kappa_max": adm.kappa_max,
        "crossing_count": len(crossings),
        "crossings": [
            {
                "t": c.t,
                "u": c.u,
                "point": list(c.point),
                "transversality": c.transversality,
            }
            for c in crossings
        ],
        "shells": [
            {
                "a": s.a,
                "b": s.b,
                "sign": "positive" if s.is_positive else "negative",
                "interior_angle": s.interior_angle,
                "node": list(s.node),
            }
            for s in shells
        ],
        "positive_shells": sum(1 for s in shells if s.is_positive),
        "negative_shells": sum(1 for s in shells if not s.is_positive),
        "I": inv,
        "max_fiber_defect": lift.max_fiber_defect,
        "parity_consistent": inv == parity,
    }
    return payload, crossings, shells


def cmd_analyze_curve(args, config: RunConfig) -> int:
    adm = _curve_from_arg(args.curve, config)
    payload, crossings, shells = _curve_report(config, adm, _spec_echo(args.curve))
    _emit(config, payload)
    if config.out and config.figures:
        report.save_curve_figure(_outpath(config, "curve.png"), adm, crossings, shells)
    return 0


def _spec_echo(arg: str):
    spec = _load_json_or_name(arg)
    return spec if isinstance(spec, (dict, str)) else str(spec)


def cmd_build_torus(args, config: RunConfig) -> int:
    pair = _pair_from_arg(args.pair, config)
    T = torus.build_torus(pair, config.lift_steps)
    L1, L2 = T.periods
    origin = T.evaluate(0.0, 0.0).to_array()
    probe = T.evaluate_batch(
        np.array([0.37 * L1, 0.37 * L1 + L1, 0.37 * L1]),
        np.array([0.61 * L2, 0.61 * L2, 0.61 * L2 + L2]),
    )
    rng = np.random.default_rng(config.seed)
    worst_forms = 0.0
    for _ in range(6):
        s1 = float(rng.uniform(0, L1))
        s2 = float(rng.uniform(0, L2))
        nf = torus.numeric_forms(T, s1, s2, 1e-3)
        af = torus.analytic_forms(pair, s1, s2)
        worst_forms = max(worst_forms, abs(nf.H - af.H), abs(nf.F - af.F), abs(nf.K))
    payload = {
        "mu": pair.mu,
        "periods": [L1, L2],
        "I": [lifting.invariant_I(T.lift1), lifting.invariant_I(T.lift2)],
        "max_fiber_defect": [T.lift1.max_fiber_defect, T.lift2.max_fiber_defect],
        "origin_defect": float(np.linalg.norm(origin - np.array([1.0, 0, 0, 0]))),
        "double_periodicity_defect": float(
            max(np.abs(probe[0] - probe[1]).max(), np.abs(probe[0] - probe[2]).max())
        ),
        "forms_residual": worst_forms,
    }
    _emit(config, payload)
    if config.out and config.figures:
        report.save_pair_figure(_outpath(config, "pair.png"), pair)
        report.save_torus_figure(_outpath(config, "torus.png"), T)
    return 0


def cmd_diameter(args, config: RunConfig) -> int:
    pair = _pair_from_arg(args.pair, config)
    T = torus.build_torus(pair, config.lift_steps)
    t0 = time.perf_counter()
    result = torus.extrinsic_diameter(T, config.grid_n, config.refine_iters)
    wall = time.perf_counter() - t0
    tol = config.tol("pi_tol")
    payload = {
        "diameter_lower_bound": result.diameter,
        "witness_p": list(result.witness_p),
        "witness_q": list(result.witness_q),
        "coarse_diameter": result.coarse_diameter,
        "grid_n": result.grid_n,
        "refine_iters": result.refine_iters,
        "pi_within_tol": result.diameter >= math.pi - tol,
        "pi_tol": tol,
        "wall_time_s": wall,
        "mu": pair.mu,
    }
    _emit(config, payload)
    if config.out and config.figures:
        report.save_diameter_figure(_outpath(config, "diameter.png"), T, result)
    return 0


def _select_rolling_shells(pair, config: RunConfig):
    cross1 = topology.find_crossings(pair.gamma1, config.samples)
    cross2 = topology.find_crossings(pair.gamma2, config.samples)
    neg1 = [s for s in topology.extract_shells(pair.gamma1, cross1) if not s.is_positive]
    pos2 = [s for s in topology.extract_shells(pair.gamma2, cross2) if s.is_positive]
    if not neg1 or not pos2:
        raise AnalysisError(
            "hypothesis violated: need a negative shell on gamma1 and a positive "
            f"shell on gamma2 (found {len(neg1)} negative / {len(pos2)} positive)"
        )
    return neg1[0], pos2[0]


def cmd_bitangent(args, config: RunConfig) -> int:
    pair = _pair_from_arg(args.pair, config)
    shell1, shell2 = _select_rolling_shells(pair, config)
    cert = bitangent.rolling_search(shell1, shell2, pair.mu)
    payload = cert.to_json()
    payload["shell1"] = {"a": shell1.a, "b": shell1.b}
    payload["shell2"] = {"a": shell2.a, "b": shell2.b}
    _emit(config, payload, "certificate.json")
    if config.out and config.figures:
        ins = bitangent.inscribed_bitangent_circle(shell2, pair.mu)
        report.save_bitangent_figure(
            _outpath(config, "bitangent.png"), shell1, shell2, cert, ins.circle
        )
    return 0


def cmd_verify(args, config: RunConfig) -> int:
    ctx = verify.VerifyContext(
        seed=config.seed,
        samples=config.samples,
        lift_steps=config.lift_steps,
        grid_n=config.grid_n,
        refine_iters=config.refine_iters,
    )
    results = verify.run_all(ctx, names=args.only or None)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: residual {r.residual:.3e} (tol {r.tolerance:.1e}) {r.detail}")
    payload = {"checks": [r.to_json() for r in results], "all_passed": all(r.passed for r in results)}
    _emit(config, payload, "verify.json")
    if config.out and config.figures:
        report.save_verify_figure(_outpath(config, "verify.png"), results)
    return 0 if payload["all_passed"] else 2


def cmd_catalog(args, config: RunConfig) -> int:
    payload = {
        "curves": curves.catalog(),
        "reversed_suffix": "_rev",
        "notes": "names accept parameters, e.g. circle(kappa=2), sigma_a(a=0.142857)",
    }
    _emit(config, payload, "catalog.json")
    return 0


def cmd_export(args, config: RunConfig) -> int:
    if not config.out:
        raise SpecError("export requires --out DIR")
    pair = _pair_from_arg(args.pair, config)
    T = torus.build_torus(pair, config.lift_steps)
    _write_csv(
        _outpath(config, "mesh.csv"),
        "s1,s2,w,x,y,z",
        torus.mesh_rows(T, config.grid_n),
    )
    for idx, (g, lift) in enumerate(((pair.gamma1, T.lift1), (pair.gamma2, T.lift2)), start=1):
        s = np.linspace(0.0, g.period_l, config.samples, endpoint=False)
        pts = g.point(s)
        plane = pts[:, :2] / (1.0 - pts[:, 2])[:, None]
        _write_csv(
            _outpath(config, f"curve{idx}_plane.csv"),
            "s,u,v",
            np.column_stack([s, plane]),
        )
        quats = lift.values(s)
        _write_csv(
            _outpath(config, f"curve{idx}_lift.csv"),
            "s,w,x,y,z",
            np.column_stack([s, quats]),
        )
    try:
        shell1, shell2 = _select_rolling_shells(pair, config)
        cert = bitangent.rolling_search(shell1, shell2, pair.mu)
        cert_payload = {"available": True, **cert.to_json()}
    except (AnalysisError, AdmissibilityError) as exc:
        cert_payload = {"available": False, "reason": str(exc)}
    with open(_outpath(config, "certificate.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(cert_payload, indent=2, sort_keys=True) + "\n")
    if config.figures:
        report.save_pair_figure(_outpath(config, "pair.png"), pair)
        report.save_torus_figure(_outpath(config, "torus.png"), T)
    print(json.dumps({"written": sorted(os.listdir(config.out))}, indent=2))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="flattori", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--samples", type=int, default=2048, help="curve sampling density")
        p.add_argument("--lift-steps", type=int, default=4096, help="lift ODE steps per period")
        p.add_argument("--grid", type=int, default=48, help="diameter/mesh grid size")
        p.add_argument("--refine", type=int, default=40, help="diameter refinement iterations")
        p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                       help="tolerance override (pi_tol, boundary, residual)")
        p.add_argument("--seed", type=int, default=1729, help="seed for randomized suites")
        p.add_argument("--out", default=None, help="output directory for files and figures")
        p.add_argument("--no-figures", dest="figures", action="store_false",
                       help="skip figure rendering")

    p = sub.add_parser("analyze-curve", help="crossings, shells, lift invariant of one curve")
    p.add_argument("curve", help="curve spec: JSON file/object or builtin name")
    common(p)
    p.set_defaults(fn=cmd_analyze_curve)

    p = sub.add_parser("build-torus", help="construct the immersion and report invariants")
    p.add_argument("pair", help="pair spec: JSON file/object or 'curve1:curve2[:mu]'")
    common(p)
    p.set_defaults(fn=cmd_build_torus)

    p = sub.add_parser("diameter", help="extrinsic diameter lower bound")
    p.add_argument("pair")
    common(p)
    p.set_defaults(fn=cmd_diameter)

    p = sub.add_parser("bitangent", help="rolling search for a second-kind bi-tangent")
    p.add_argument("pair")
    common(p)
    p.set_defaults(fn=cmd_bitangent)

    p = sub.add_parser("verify", help="run the whole property suite")
    p.add_argument("--only", action="append", default=[], metavar="SUBSTRING",
                   help="run only checks whose name contains SUBSTRING")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("catalog", help="emit the built-in curve specs")
    common(p)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("export", help="mesh CSV, curve polylines, certificate JSON")
    p.add_argument("pair")
    common(p)
    p.set_defaults(fn=cmd_export)
    return parser


def _config_from_args(args) -> RunConfig:
    tolerances = {}
    for item in args.tol:
        if "=" not in item:
            raise SpecError(f"malformed --tol {item!r}, expected NAME=VALUE")
        key, value = item.split("=", 1)
        try:
            tolerances[key.strip()] = float(value)
        except ValueError as exc:
            raise SpecError(f"non-numeric tolerance {item!r}") from exc
    return RunConfig(
        command=args.command,
        samples=args.samples,
        lift_steps=args.lift_steps,
        grid_n=args.grid,
        refine_iters=args.refine,
        seed=args.seed,
        out=args.out,
        figures=args.figures,
        tolerances=tolerances,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        return args.fn(args, config)
    except SystemExit as exc:
        return int(exc.code or 0)
    except FlattoriError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
