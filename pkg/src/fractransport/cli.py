"""Command-line interface: ``fractransport {simulate,validate,sweep,mellin}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    SWEEP_SCHEMA,
    ConfigError,
    RunManifest,
    config_to_dict,
    default_workers,
    format_float,
    load_config,
    sim_config_from_sections,
    write_csv,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CODES = {
    "completed": 0,
    "blowup_detected": 10,
    "resolution_lost": 11,
    "boundary_contaminated": 12,
}

DIAGNOSTICS_HEADER = (
    "time", "sup_norm", "l1_norm", "lp_norm", "gradient_sup", "drift_criterion_integrand",
    "remark_criterion_integrand", "weighted_a", "modulus_ratio", "spectral_tail",
    "boundary_fraction", "min_positive_side", "dt", "gradient_l2_sq",
)
SNAPSHOT_HEADER = ("x", "u", "riesz")
CRITERION_HEADER = ("time", "drift", "remark")
MELLIN_HEADER = ("lambda", "re_f", "im_f", "normalized_re")


def _err(msg):
    print(f"fractransport: error: {msg}", file=sys.stderr)


def cmd_simulate(args) -> int:
    from .diagnostics import continuation_criterion_integral, riccati_check
    from .fractional import frac_laplacian
    from .solver import run
    from .spectral import Field

    try:
        sections = load_config(args.config)
        cfg = sim_config_from_sections(sections, Path(args.config).parent)
    except (ConfigError, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    keep = sections["output"].get("keep_snapshots", True)
    res = run(cfg, keep_snapshots=keep, max_steps=sections["solver"].get("max_steps", 10_000_000))
    rec = res.record
    paths = []
    cols = [rec.times] + [getattr(rec, name) for name in DIAGNOSTICS_HEADER[1:]]
    paths.append(write_csv(out / "diagnostics.csv", DIAGNOSTICS_HEADER, cols))
    paths.append(write_csv(out / "criterion_steps.csv", CRITERION_HEADER,
                           [rec.step_times, rec.step_drift, rec.step_remark]))
    echo = config_to_dict(cfg)
    snap_dir = out / "snapshots"
    if res.snapshots:
        snap_dir.mkdir(exist_ok=True)
    for i, (t, vals) in enumerate(res.snapshots):
        f = Field(cfg.grid, vals)
        riesz = frac_laplacian(f, -cfg.alpha).values if cfg.alpha > 0 else vals
        csv_path = write_csv(snap_dir / f"snapshot_{i:05d}.csv", SNAPSHOT_HEADER, [cfg.grid.x, vals, riesz])
        side = {"time": t, "index": i, "config": echo, "calibrated_constants": res.calibrated_constants,
                "verdict": res.verdict}
        side_path = csv_path.with_suffix(".json")
        side_path.write_text(json.dumps(side, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        paths += [csv_path, side_path]
    certificates = {
        "continuation_integral_drift": continuation_criterion_integral(rec, "drift"),
        "continuation_integral_remark": continuation_criterion_integral(rec, "remark"),
        "raw_verdict": res.raw_verdict,
    }
    if res.verdict == "blowup_detected":
        try:
            rep = riccati_check(rec, float(rec.l1_norm[0]))
            certificates["riccati"] = {"c_certified": rep.c_certified, "c_fit": rep.c_fit,
                                       "k_fit": rep.k_fit, "holds": rep.holds}
        except ValueError as exc:
            certificates["riccati"] = {"error": str(exc)}
    cert_path = out / "certificates.json"
    cert_path.write_text(json.dumps(certificates, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths.append(cert_path)
    manifest = RunManifest(echo, res.calibrated_constants, res.verdict, res.blowup_time_estimate,
                           [str(p.relative_to(out)) for p in paths], __version__, res.wall_time)
    manifest.write(out)
    print(f"verdict: {res.verdict}")
    if res.blowup_time_estimate is not None:
        print(f"blowup_time_estimate: {format_float(res.blowup_time_estimate)}")
    return EXIT_CODES[res.verdict]


def cmd_validate(args) -> int:
    from .gamma_mellin import corrupted_lanczos
    from .validation import run_checks

    if args.inject_gamma_fault:
        with corrupted_lanczos(1.01):
            results = run_checks(args.level)
    else:
        results = run_checks(args.level)
    report = {
        "level": args.level,
        "tool_version": __version__,
        "passed": all(r.passed for r in results),
        "checks": [{"name": r.name, "passed": r.passed, "seconds": r.seconds, "details": r.details}
                   for r in results],
    }
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.out:
        path = Path(args.out)
        if path.suffix != ".json":
            path.mkdir(parents=True, exist_ok=True)
            path = path / "validation_report.json"
        path.write_text(text + "\n", encoding="utf-8")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.2f} s)")
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def cmd_sweep(args) -> int:
    from .sweep import run_sweep, write_sweep

    try:
        sections = load_config(args.config, SWEEP_SCHEMA)
        workers = args.workers if args.workers is not None else default_workers()
    except (ConfigError, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    if workers < 1:
        _err("--workers must be at least 1")
        return EXIT_USAGE
    try:
        result = run_sweep(sections, Path(args.config).parent, workers)
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    write_sweep(result, args.out)
    for label, value in result.boundary_estimate.items():
        print(f"boundary {label}: {'none' if value is None else format_float(value)}")
    failed = sum(c["verdict"] == "failed" for c in result.cells)
    return EXIT_FAILURE if failed else EXIT_OK


def cmd_mellin(args) -> int:
    from .gamma_mellin import mellin_symbol

    if not 0.0 < args.alpha < 1.0 or not 0.0 < args.theta < 1.0 - args.alpha:
        _err(f"need 0 < alpha < 1 and 0 < theta < 1 - alpha, got alpha={args.alpha}, theta={args.theta}")
        return EXIT_USAGE
    if not args.lambda_max > 0 or args.points < 2:
        _err("need lambda_max > 0 and at least 2 points")
        return EXIT_USAGE
    pos = np.linspace(0.0, args.lambda_max, args.points)
    lam = np.concatenate((-pos[:0:-1], pos))
    vals = mellin_symbol(args.alpha, args.theta, lam)
    norm = vals.real / (1.0 + np.abs(lam) ** args.alpha)
    write_csv(args.out, MELLIN_HEADER, [lam, vals.real, vals.imag, norm])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractransport",
                                     description="Nonlocal transport equation with fractional dissipation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run the certification suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--out", help="report path (.json) or directory")
    p.add_argument("--inject-gamma-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="parameter sweep with phase-boundary bisection")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $FRACTRANSPORT_WORKERS or the CPU count)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mellin", help="tabulate the Mellin symbol F")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--lambda-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=501, help="samples on [0, lambda_max]")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mellin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
