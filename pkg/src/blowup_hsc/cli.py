"""Command-line driver for the verification suites.

Exit codes: 0 when every case passes, 1 when any verification fails, 2 for
usage, configuration or output errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from . import engine
from .engine import DiffScheme
from .metrics import blowup_metric
from .report import (
    ConfigError,
    SweepConfig,
    VerificationReport,
    dumps,
    report_document,
    run_sweep,
    summary,
    to_csv,
    write_text,
)

log = logging.getLogger("blowup_hsc")

OUT_ENV = "BLOWUP_HSC_OUT"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, action="append", help="dimension (repeatable)")
    common.add_argument("--t", type=float, action="append", help="Fubini-Study scale t (repeatable)")
    common.add_argument("--c", type=float, action="append", help="base curvature H_h(e_n) (repeatable)")
    common.add_argument("--step", type=float, help="finite-difference step")
    common.add_argument("--order", type=int, choices=(2, 4), help="stencil order")
    common.add_argument("--richardson", type=_on_off, metavar="{on|off}", help="one Richardson pass")
    common.add_argument("--tolerance", type=float, help="absolute pass/fail tolerance")
    common.add_argument("--grid", type=int, help="grid intervals for hsc-scan")
    common.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or .)")
    common.add_argument("--format", choices=("json", "csv", "both"), help="output format")
    common.add_argument("--config", type=Path, help="JSON config file; flags override it")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="blowup-hsc",
        description="Check curvature of mu^*h + t b on a point blowup against closed forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify-curvature", "finite-difference curvature tensor vs closed form"),
        ("hsc-scan", "tabulate the HSC numerator and quotient over |a_n|^2"),
        ("threshold", "negativity threshold t*(c)"),
        ("ricci", "Ricci tensor, numeric vs closed form"),
        ("scalar", "scalar curvature, numeric vs closed form"),
        ("gauss", "Gauss equation and second fundamental form checks"),
        ("report", "run every suite over the sweep and write JSON/CSV"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def load_settings(args: argparse.Namespace) -> dict:
    """Merge config file values with flags; flags win."""
    settings: dict = {}
    if args.config is not None:
        try:
            settings.update(json.loads(args.config.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        for key in ("n", "t", "c"):
            if key in settings:
                settings[f"{key}_values"] = settings.pop(key)
    for flag, key in (("n", "n_values"), ("t", "t_values"), ("c", "c_values")):
        if getattr(args, flag) is not None:
            settings[key] = getattr(args, flag)
    for key in ("step", "order", "richardson", "tolerance", "grid", "format"):
        if getattr(args, key) is not None:
            settings[key] = getattr(args, key)
    if args.out is not None:
        settings["out"] = str(args.out)
    return settings


def _as_bool(value) -> bool:
    if isinstance(value, str):
        return _on_off(value)
    return bool(value)


def make_config(settings: dict) -> SweepConfig:
    defaults = SweepConfig()
    try:
        scheme = DiffScheme(
            step=float(settings.get("step", defaults.scheme.step)),
            order=int(settings.get("order", defaults.scheme.order)),
            richardson=_as_bool(settings.get("richardson", defaults.scheme.richardson)),
        )
        return SweepConfig(
            n_values=tuple(int(v) for v in settings.get("n_values", defaults.n_values)),
            t_values=tuple(float(v) for v in settings.get("t_values", defaults.t_values)),
            c_values=tuple(float(v) for v in settings.get("c_values", defaults.c_values)),
            scheme=scheme,
            tolerance=float(settings.get("tolerance", defaults.tolerance)),
        )
    except (ValueError, TypeError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc


def out_dir(settings: dict) -> Path | None:
    if "out" in settings:
        return Path(settings["out"])
    return None


def _emit(command: str, settings: dict, document: dict, csv_text: str | None, default_dir: bool = False) -> None:
    fmt = settings.get("format", "both" if default_dir else "json")
    directory = out_dir(settings)
    if directory is None and default_dir:
        directory = Path(os.environ.get(OUT_ENV, "."))
    json_text = dumps(document) + "\n"
    if directory is None:
        if fmt in ("json", "both"):
            sys.stdout.write(json_text)
        if fmt in ("csv", "both") and csv_text is not None:
            sys.stdout.write(csv_text)
        return
    try:
        directory.mkdir(parents=True, exist_ok=True)
        if fmt in ("json", "both"):
            write_text(directory / f"{command}.json", json_text)
        if fmt in ("csv", "both") and csv_text is not None:
            write_text(directory / f"{command}.csv", csv_text)
    except OSError as exc:
        raise UsageError(f"cannot write output to {directory}: {exc}") from exc
    log.info("wrote %s output to %s", command, directory)


def _rows_status(rows: list[VerificationReport]) -> int:
    for r in rows:
        if not r.passed:
            log.warning("FAIL %s: %s", r.id, r.error or f"abs_error={r.abs_error:.3e}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def _sweep_command(command: str, suites: tuple[str, ...], settings: dict, jobs: int, default_dir: bool = False) -> int:
    config = make_config(settings)
    rows = run_sweep(config, suites, jobs=jobs)
    _emit(command, settings, report_document(config, rows), to_csv(rows), default_dir)
    s = summary(rows)
    log.info("%s: %d cases, %d passed, %d failed", command, s["total"], s["passed"], s["failed"])
    return _rows_status(rows)


def cmd_verify_curvature(settings: dict, jobs: int = 1) -> int:
    return _sweep_command("verify-curvature", ("curvature",), settings, jobs)


def cmd_ricci(settings: dict, jobs: int = 1) -> int:
    return _sweep_command("ricci", ("ricci",), settings, jobs)


def cmd_scalar(settings: dict, jobs: int = 1) -> int:
    return _sweep_command("scalar", ("scalar",), settings, jobs)


def cmd_gauss(settings: dict, jobs: int = 1) -> int:
    return _sweep_command("gauss", ("gauss", "sigma"), settings, jobs)


def cmd_report(settings: dict, jobs: int = 1) -> int:
    return _sweep_command("report", ("curvature", "hsc", "ricci", "scalar", "gauss", "sigma", "threshold"),
                          settings, jobs, default_dir=True)


def hsc_scan(p: cf.BlowupParams, grid: int, scheme: DiffScheme = engine.DEFAULT_SCHEME) -> dict:
    """Tabulate p_t(x) and the HSC of unit directions with |a_n|^2 = x on a grid."""
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    xs = np.linspace(0.0, 1.0, grid + 1)
    rows = [{"x": float(x), "p": cf.p_poly(p, float(x)), "hsc": cf.hsc_closed_form(p, cf.unit_direction(p.n, float(x)))}
            for x in xs]
    i_p = int(np.argmin([r["p"] for r in rows]))
    i_h = int(np.argmin([r["hsc"] for r in rows]))
    crit = cf.p_critical(p)
    spot_dir = cf.unit_direction(p.n, crit.argmin)
    curv = engine.chern_curvature(blowup_metric(p.n, p.t, p.c).induced_metric, None, scheme)
    spot_num = engine.hsc_numeric(curv, spot_dir)
    spot_closed = cf.hsc_closed_form(p, spot_dir)
    return {
        "params": {"n": p.n, "t": p.t, "c": p.c},
        "grid": grid,
        "grid_min_p": rows[i_p]["p"],
        "grid_argmin_p": rows[i_p]["x"],
        "grid_min_hsc": rows[i_h]["hsc"],
        "grid_argmin_hsc": rows[i_h]["x"],
        "analytic": {"x_t": crit.x, "value": crit.value, "interior": crit.interior,
                     "argmin": crit.argmin, "minimum": crit.minimum},
        "spot_check": {"x": crit.argmin, "numeric": spot_num, "closed_form": spot_closed,
                       "abs_error": abs(spot_num - spot_closed), "est_error": curv.est_error},
        "negative": rows[i_p]["p"] < 0,
        "rows": rows,
    }


def cmd_hsc_scan(settings: dict, tolerance: float | None = None) -> int:
    config = make_config(settings)
    grid = int(settings.get("grid", 1000))
    p = cf.BlowupParams(config.n_values[0], config.t_values[0], config.c_values[0])
    try:
        result = hsc_scan(p, grid, config.scheme)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = ["x,p,hsc"] + [f"{r['x']:.17g},{r['p']:.17g},{r['hsc']:.17g}" for r in result["rows"]]
    _emit("hsc-scan", settings, result, "\n".join(lines) + "\n")
    log.info("grid minimum of p_t: %.6g at x=%.4f (negative: %s)", result["grid_min_p"], result["grid_argmin_p"],
             result["negative"])
    tol = config.tolerance if tolerance is None else tolerance
    return EXIT_OK if result["spot_check"]["abs_error"] <= tol else EXIT_FAIL


def threshold_table(c_values) -> list[dict]:
    rows = []
    for c in c_values:
        th = cf.negativity_threshold(c)
        rows.append({"c": th.c, "t_star": th.t_star, "bisection": th.bisection,
                     "always_negative": th.always_negative, "reason": th.reason})
    return rows


def cmd_threshold(settings: dict) -> int:
    c_values = settings.get("c_values", [0.0, 1.0, 2.0])
    rows = threshold_table(c_values)

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        return f'"{v}"' if isinstance(v, str) else f"{v:.17g}"

    lines = ["c,t_star,bisection,always_negative,reason"] + [",".join(cell(r[k]) for k in r) for r in rows]
    _emit("threshold", settings, {"version": "1", "thresholds": rows}, "\n".join(lines) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        settings = load_settings(args)
        if args.command == "hsc-scan":
            return cmd_hsc_scan(settings)
        if args.command == "threshold":
            return cmd_threshold(settings)
        handler = {
            "verify-curvature": cmd_verify_curvature,
            "ricci": cmd_ricci,
            "scalar": cmd_scalar,
            "gauss": cmd_gauss,
            "report": cmd_report,
        }[args.command]
        return handler(settings, jobs=args.jobs)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
