"""Solver-by-problem benchmarking grid and Dolan-More performance profiles.

``run_suite`` solves every (problem, solver) pair, optionally across a
process pool, and returns records in a deterministic (problem, solver)
ordering regardless of execution order. ``performance_profile`` turns the
records into cumulative distributions of per-problem cost ratios relative
to the best solver; failed runs carry infinite cost and problems failed by
every solver are dropped from the denominator.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from math import inf, isfinite, log2
from multiprocessing import get_context

from .problems import Problem, make_problem
from .solver import RunResult, TrustRegionConfig, solve

__all__ = [
    "RunRecord",
    "ProfileCurve",
    "run_suite",
    "performance_profile",
    "export_csv",
    "export_records_csv",
    "export_curves_csv",
    "load_records_csv",
    "export_svg",
]

PROFILE_INDEXES = ("fevals", "iters", "time")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one solver on one problem."""

    problem: str
    dim: int
    solver: str
    status: str
    iters: int
    fevals: int
    wall_time: float
    result: RunResult = None  # full result incl. trace when requested

    @property
    def failed(self) -> bool:
        return self.status != "converged"


@dataclass(frozen=True)
class ProfileCurve:
    solver: str
    points: tuple  # ((tau, rho), ...) with tau >= 1, rho nondecreasing


def _normalize_solvers(solvers):
    out = []
    for item in solvers:
        if isinstance(item, TrustRegionConfig):
            out.append((item.policy.value, item))
        else:
            label, cfg = item
            out.append((str(label), cfg))
    labels = [label for label, _ in out]
    if len(set(labels)) != len(labels):
        raise ValueError("solver labels must be unique")
    return out


def _normalize_problems(problems):
    out = []
    for item in problems:
        if isinstance(item, Problem):
            out.append(item)
        else:
            name, dim = item
            out.append(make_problem(name, dim))
    return out


def _run_task(task):
    problem, label, cfg, collect_trace, warmup = task
    if warmup:
        solve(problem, cfg)
    res = solve(problem, cfg, collect_trace=collect_trace)
    return RunRecord(problem.name, problem.dim, label, res.status,
                     res.iters, res.fevals, res.wall_time,
                     res if collect_trace else None)


def run_suite(problems, solvers, parallelism: int = 1,
              max_iters: int = None, max_fevals: int = None,
              collect_traces: bool = False, warmup: bool = False):
    """Solve every (problem, solver) pair and return sorted ``RunRecord``s.

    ``problems`` holds ``Problem`` objects or ``(name, dim)`` pairs;
    ``solvers`` holds ``TrustRegionConfig``s or ``(label, config)`` pairs.
    ``max_iters`` / ``max_fevals`` override the budgets of every config.
    Individual run failures are recorded, never raised.
    """
    probs = _normalize_problems(problems)
    solvs = _normalize_solvers(solvers)
    if not probs or not solvs:
        raise ValueError("problems and solvers must be nonempty")
    overrides = {}
    if max_iters is not None:
        overrides["max_iters"] = max_iters
    if max_fevals is not None:
        overrides["max_fevals"] = max_fevals
    tasks = []
    for problem in probs:
        for label, cfg in solvs:
            run_cfg = replace(cfg, **overrides) if overrides else cfg
            tasks.append((problem, label, run_cfg, collect_traces, warmup))

    if parallelism <= 1:
        records = [_run_task(t) for t in tasks]
    else:
        # spawned workers re-import numpy, so the BLAS threading environment
        # set before pool creation applies to them
        os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
        os.environ.setdefault("OMP_NUM_THREADS", "1")
        with ProcessPoolExecutor(max_workers=parallelism,
                                 mp_context=get_context("spawn")) as pool:
            records = list(pool.map(_run_task, tasks))
    return sorted(records, key=lambda r: (r.problem, r.dim, r.solver))


def _cost(record: RunRecord, index: str) -> float:
    if record.failed:
        return inf
    if index == "fevals":
        return float(record.fevals)
    if index == "iters":
        return float(record.iters)
    if index == "time":
        return float(record.wall_time)
    raise ValueError(f"unknown index {index!r}; expected one of {PROFILE_INDEXES}")


def performance_profile(records, index: str = "fevals"):
    """Dolan-More profile curves for one cost index.

    Every (problem, solver) pair must appear exactly once. Ratios are
    ``cost / min cost over solvers``; a solver's curve value at ``tau`` is
    the fraction of retained problems solved within ``tau`` times the best
    cost. Curves share step points at the pooled distinct finite ratios.
    With a single solver the comparison is against itself, so failures stay
    in the denominator (infinite ratios) and the curve tops out at the
    solved fraction.
    """
    solvers = sorted({r.solver for r in records})
    problems = sorted({(r.problem, r.dim) for r in records})
    table = {}
    for r in records:
        key = ((r.problem, r.dim), r.solver)
        if key in table:
            raise ValueError(f"duplicate record for {key}")
        table[key] = _cost(r, index)
    missing = [(p, s) for p in problems for s in solvers
               if (p, s) not in table]
    if missing:
        raise ValueError(f"missing records for {missing[:3]}")

    if len(solvers) == 1:
        retained = list(problems)
    else:
        retained = [p for p in problems
                    if any(isfinite(table[(p, s)]) for s in solvers)]
    if not retained or all(not isfinite(table[(p, s)])
                           for p in retained for s in solvers):
        return [ProfileCurve(s, ()) for s in solvers]

    ratios = {}
    for p in retained:
        best = min(table[(p, s)] for s in solvers)
        for s in solvers:
            cost = table[(p, s)]
            if not isfinite(best):
                ratios[(p, s)] = inf
            elif best == 0.0:
                ratios[(p, s)] = 1.0 if cost == 0.0 else inf
            else:
                ratios[(p, s)] = cost / best

    taus = sorted({r for r in ratios.values() if isfinite(r)})
    denom = float(len(retained))
    curves = []
    for s in solvers:
        mine = sorted(ratios[(p, s)] for p in retained)
        points = []
        for tau in taus:
            count = sum(1 for r in mine if r <= tau)
            points.append((tau, count / denom))
        curves.append(ProfileCurve(s, tuple(points)))
    return curves


# -- flat-file output --------------------------------------------------------

RECORDS_HEADER = ("problem", "dim", "solver", "status",
                  "iters", "fevals", "time_s")
CURVES_HEADER = ("solver", "tau", "rho")


def _open_out(path):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def export_records_csv(records, path):
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORDS_HEADER)
        for r in records:
            w.writerow([r.problem, r.dim, r.solver, r.status,
                        r.iters, r.fevals, repr(float(r.wall_time))])


def load_records_csv(path):
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(RunRecord(
                row["problem"], int(row["dim"]), row["solver"], row["status"],
                int(row["iters"]), int(row["fevals"]), float(row["time_s"])))
    return records


def export_curves_csv(curves, path):
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVES_HEADER)
        for c in curves:
            for tau, rho in c.points:
                w.writerow([c.solver, repr(float(tau)), repr(float(rho))])


def export_csv(items, path):
    """Write records or curves depending on the element type."""
    items = list(items)
    if items and isinstance(items[0], RunRecord):
        export_records_csv(items, path)
    else:
        export_curves_csv(items, path)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def export_svg(curves, path, log2_axis: bool = False,
               width: int = 720, height: int = 480):
    """Self-contained SVG step-line chart of profile curves with a legend."""
    ml, mr, mt, mb = 60, 30, 30, 50
    pw, ph = width - ml - mr, height - mt - mb

    taus = [t for c in curves for t, _ in c.points]
    t_max = max(taus) if taus else 2.0
    if log2_axis:
        x_hi = max(log2(t_max), 1e-9)
        to_x = lambda t: ml + pw * (log2(t) / x_hi if x_hi > 0 else 0.0)
        x_label = "log2(tau)"
    else:
        x_hi = max(t_max - 1.0, 1e-9)
        to_x = lambda t: ml + pw * ((t - 1.0) / x_hi)
        x_label = "tau"
    to_y = lambda rho: mt + ph * (1.0 - rho)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = to_y(frac)
        parts.append(f'<line x1="{ml - 4}" y1="{y:.2f}" x2="{ml}" '
                     f'y2="{y:.2f}" stroke="#333"/>')
        parts.append(f'<text x="{ml - 8}" y="{y + 4:.2f}" font-size="12" '
                     f'text-anchor="end" font-family="sans-serif">'
                     f'{frac:g}</text>')
    n_xticks = 5
    for j in range(n_xticks + 1):
        if log2_axis:
            val = x_hi * j / n_xticks
            x = ml + pw * (j / n_xticks)
            lab = f"{val:.2g}"
        else:
            val = 1.0 + x_hi * j / n_xticks
            x = ml + pw * (j / n_xticks)
            lab = f"{val:.3g}"
        parts.append(f'<line x1="{x:.2f}" y1="{mt + ph}" x2="{x:.2f}" '
                     f'y2="{mt + ph + 4}" stroke="#333"/>')
        parts.append(f'<text x="{x:.2f}" y="{mt + ph + 18}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif">'
                     f'{lab}</text>')
    parts.append(f'<text x="{ml + pw / 2:.2f}" y="{height - 12}" '
                 f'font-size="13" text-anchor="middle" '
                 f'font-family="sans-serif">{x_label}</text>')
    parts.append(f'<text x="16" y="{mt + ph / 2:.2f}" font-size="13" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'transform="rotate(-90 16 {mt + ph / 2:.2f})">rho</text>')

    for idx, curve in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = []
        prev_rho = None
        for tau, rho in curve.points:
            x = to_x(tau)
            if prev_rho is not None:
                pts.append(f"{x:.2f},{to_y(prev_rho):.2f}")
            pts.append(f"{x:.2f},{to_y(rho):.2f}")
            prev_rho = rho
        if prev_rho is not None:
            pts.append(f"{ml + pw},{to_y(prev_rho):.2f}")
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.8" points="{" ".join(pts)}"/>')
        ly = mt + 16 + 18 * idx
        parts.append(f'<line x1="{ml + 12}" y1="{ly - 4}" '
                     f'x2="{ml + 40}" y2="{ly - 4}" stroke="{color}" '
                     f'stroke-width="1.8"/>')
        parts.append(f'<text x="{ml + 46}" y="{ly}" font-size="12" '
                     f'font-family="sans-serif">{curve.solver}</text>')
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc
