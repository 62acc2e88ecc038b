"""Verification suites: numeric engine vs closed forms, collected as report rows."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from . import closed_forms as cf
from . import engine
from .engine import DiffScheme
from .metrics import blowup_metric
from .tensors import basis

SCHEMA_VERSION = "1"
CSV_COLUMNS = ["n", "t", "c", "suite", "case", "numeric", "closed_form", "abs_error", "rel_error", "est_error", "pass"]
SUITES = ("curvature", "hsc", "ricci", "scalar", "gauss", "sigma", "threshold")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...] = (2, 3, 4)
    t_values: tuple[float, ...] = (0.01, 0.05, 0.1, 0.25, 0.5)
    c_values: tuple[float, ...] = (-1.0, 0.0, 1.0, 2.0)
    scheme: DiffScheme = field(default_factory=DiffScheme)
    tolerance: float = 1e-5

    def __post_init__(self):
        for name in ("n_values", "t_values", "c_values"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name} must not be empty")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")

    def triples(self) -> list[tuple[int, float, float]]:
        return [(n, t, c) for n in self.n_values for t in self.t_values for c in self.c_values]

    def as_dict(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "t_values": list(self.t_values),
            "c_values": list(self.c_values),
            "step": self.scheme.step,
            "order": self.scheme.order,
            "richardson": self.scheme.richardson,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    case: str
    n: int | None
    t: float | None
    c: float | None
    numeric: float | None
    closed_form: float | None
    abs_error: float | None
    est_error: float
    tolerance: float
    numeric_op: str
    closed_form_op: str
    direction: tuple[complex, ...] | None = None
    error: str | None = None

    @property
    def id(self) -> str:
        return f"{self.suite}/n={self.n}/t={self.t!r}/c={self.c!r}/{self.case}"

    @property
    def rel_error(self) -> float | None:
        if self.abs_error is None or self.closed_form is None or self.closed_form == 0:
            return None
        return self.abs_error / abs(self.closed_form)

    @property
    def passed(self) -> bool:
        if self.error is not None or self.abs_error is None or not math.isfinite(self.abs_error):
            return False
        return self.abs_error <= max(self.tolerance, 10 * self.est_error)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "suite": self.suite,
            "case": self.case,
            "n": self.n,
            "t": self.t,
            "c": self.c,
            "direction": None if self.direction is None else [[z.real, z.imag] for z in self.direction],
            "numeric": self.numeric,
            "closed_form": self.closed_form,
            "abs_error": self.abs_error,
            "rel_error": self.rel_error,
            "est_error": self.est_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "numeric_op": self.numeric_op,
            "closed_form_op": self.closed_form_op,
            "error": self.error,
        }


def _compare(suite, case, params, numeric, closed, est, tol, numeric_op, closed_op, direction=None):
    """Row for a scalar or array comparison; arrays report their worst entry."""
    numeric = np.asarray(numeric, dtype=complex)
    closed = np.asarray(closed, dtype=complex)
    diff = np.abs(numeric - closed)
    i = np.unravel_index(int(np.argmax(diff)), diff.shape) if diff.ndim else ()
    n, t, c = params
    if diff.ndim:
        case = f"{case}[{','.join(str(k + 1) for k in i)}]"
    return VerificationReport(
        suite, case, n, t, c,
        float(numeric[i].real), float(closed[i].real), float(diff[i]),
        float(est), tol, numeric_op, closed_op,
        None if direction is None else tuple(complex(z) for z in direction),
    )


def _failure(suite, params, tol, numeric_op, closed_op, exc: Exception) -> VerificationReport:
    n, t, c = params
    return VerificationReport(suite, "error", n, t, c, None, None, None, 0.0, tol, numeric_op, closed_op, error=f"{type(exc).__name__}: {exc}")


class TripleContext:
    """Lazily computed engine results for one ``(n, t, c)``, shared across suites."""

    def __init__(self, n: int, t: float, c: float, scheme: DiffScheme):
        self.n, self.t, self.c, self.scheme = n, t, c, scheme
        self._chart = None
        self._curv = None

    @property
    def params(self) -> cf.BlowupParams:
        return cf.BlowupParams(self.n, self.t, self.c)

    @property
    def chart(self):
        if self._chart is None:
            self._chart = blowup_metric(self.n, self.t, self.c)
        return self._chart

    @property
    def curvature(self) -> engine.CurvatureResult:
        if self._curv is None:
            self._curv = engine.chern_curvature(self.chart.induced_metric, None, self.scheme)
        return self._curv


def suite_curvature(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    r = ctx.curvature
    return [_compare("curvature", "R", (ctx.n, ctx.t, ctx.c), r.tensor, cf.curvature_closed_form(ctx.params),
                     r.est_error, tol, "engine.chern_curvature", "closed_forms.curvature_closed_form")]


def hsc_directions(p: cf.BlowupParams) -> list[tuple[str, np.ndarray]]:
    dirs = [("e_n", basis(p.n, p.n - 1)), ("e_1", basis(p.n, 0)), ("x=1/2", cf.unit_direction(p.n, 0.5, 0.7))]
    crit = cf.p_critical(p)
    if crit.interior:
        dirs.append(("x=x_t", cf.unit_direction(p.n, crit.x)))
    return dirs


def suite_hsc(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    r, p = ctx.curvature, ctx.params
    # HSC carries up to 1/t^2 from the frame norms
    est = r.est_error / min(p.t, 1.0) ** 2
    return [
        _compare("hsc", name, (ctx.n, ctx.t, ctx.c), engine.hsc_numeric(r, v), cf.hsc_closed_form(p, v),
                 est, tol, "engine.hsc_numeric", "closed_forms.hsc_closed_form", direction=v)
        for name, v in hsc_directions(p)
    ]


def suite_ricci(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    r, p = ctx.curvature, ctx.params
    n = p.n
    key = (ctx.n, ctx.t, ctx.c)
    est = r.est_error / min(p.t, 1.0)
    num, closed = engine.ricci_matrix(r), cf.ricci_matrix_closed_form(p)
    rows = [_compare("ricci", "r", key, num, closed, est, tol, "engine.ricci_numeric", "closed_forms.ricci_closed_form")]
    en, e1 = basis(n, n - 1), basis(n, 0)
    for name, a, b in (("r(xi_n,xi_n)", en, en), ("r(xi_1,xi_1)", e1, e1), ("r(xi_1,xi_n)", e1, en)):
        rows.append(_compare("ricci", name, key, engine.ricci_numeric(r, a, b), cf.ricci_closed_form(p, a, b),
                             est, tol, "engine.ricci_numeric", "closed_forms.ricci_closed_form"))
    return rows


def suite_scalar(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    r, p = ctx.curvature, ctx.params
    est = r.est_error / min(p.t, 1.0) ** 2
    return [_compare("scalar", "s", (ctx.n, ctx.t, ctx.c), engine.scalar_numeric(r), cf.scalar_closed_form(p),
                     est, tol, "engine.scalar_numeric", "closed_forms.scalar_closed_form")]


def suite_gauss(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    rep = engine.gauss_check(ctx.n, ctx.t, ctx.c, ctx.scheme, chart=ctx.chart, induced=ctx.curvature)
    return [_compare("gauss", "R_vs_assembled", (ctx.n, ctx.t, ctx.c), rep.induced, rep.assembled, rep.est_error, tol,
                     "engine.chern_curvature", "engine.gauss_check")]


def suite_sigma(ctx: TripleContext, tol: float) -> list[VerificationReport]:
    sff = engine.second_fundamental_form(ctx.chart, ctx.scheme)
    n, p = ctx.n, ctx.params
    eye = np.eye(n)
    num = np.array([[sff(eye[i], eye[k]) for k in range(n)] for i in range(n)])
    closed = np.array([[cf.sigma_closed_form(p, eye[i], eye[k]) for k in range(n)] for i in range(n)])
    return [_compare("sigma", "sigma", (ctx.n, ctx.t, ctx.c), num, closed, 0.0, tol,
                     "engine.second_fundamental_form_numeric", "closed_forms.sigma_closed_form")]


TRIPLE_SUITES: dict[str, Callable[[TripleContext, float], list[VerificationReport]]] = {
    "curvature": suite_curvature,
    "hsc": suite_hsc,
    "ricci": suite_ricci,
    "scalar": suite_scalar,
    "gauss": suite_gauss,
    "sigma": suite_sigma,
}


def run_triple(n: int, t: float, c: float, scheme: DiffScheme, tol: float, suites: Iterable[str]) -> list[VerificationReport]:
    """Run the requested suites for one parameter triple; engine errors become failure rows."""
    ctx = TripleContext(n, t, c, scheme)
    rows = []
    for name in suites:
        try:
            rows.extend(TRIPLE_SUITES[name](ctx, tol))
        except Exception as exc:  # captured per case, never aborts a sweep
            rows.append(_failure(name, (n, t, c), tol, f"suite:{name}", f"suite:{name}", exc))
    return rows


def threshold_rows(c_values: Iterable[float], tol: float) -> list[VerificationReport]:
    rows = []
    for c in c_values:
        th = cf.negativity_threshold(c)
        if th.always_negative:
            continue
        rows.append(VerificationReport("threshold", "t_star", None, None, float(c), th.bisection, th.t_star,
                                       abs(th.bisection - th.t_star), 0.0, tol,
                                       "scipy.optimize.bisect(p_critical)", "closed_forms.negativity_threshold"))
    return rows


def _sort_key(r: VerificationReport):
    none_last = lambda v: (1, 0.0) if v is None else (0, v)  # noqa: E731
    return (r.suite, none_last(r.n), none_last(r.t), none_last(r.c))


def _star(args):
    return run_triple(*args)


def run_sweep(config: SweepConfig, suites: Iterable[str] = SUITES, jobs: int = 1) -> list[VerificationReport]:
    suites = [s for s in suites if s != "threshold"] + (["threshold"] if "threshold" in suites else [])
    triple_suites = [s for s in suites if s != "threshold"]
    rows: list[VerificationReport] = []
    if triple_suites:
        tasks = [(n, t, c, config.scheme, config.tolerance, triple_suites) for n, t, c in config.triples()]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for part in pool.map(_star, tasks):
                    rows.extend(part)
        else:
            for task in tasks:
                rows.extend(_star(task))
    if "threshold" in suites:
        rows.extend(threshold_rows(config.c_values, config.tolerance))
    return sorted(rows, key=_sort_key)


# --- serialisation ---------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; key order is preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def summary(rows: list[VerificationReport]) -> dict:
    passed = sum(r.passed for r in rows)
    return {"total": len(rows), "passed": passed, "failed": len(rows) - passed}


def report_document(config: SweepConfig, rows: list[VerificationReport]) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "config": config.as_dict(),
        "cases": [r.as_dict() for r in rows],
        "summary": summary(rows),
    }


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v) if math.isfinite(v) else ""
    return str(v)


def to_csv(rows: list[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.as_dict()
        writer.writerow([_csv_cell(d[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
