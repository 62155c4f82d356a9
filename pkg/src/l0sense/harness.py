"""Cost sweeps across N and strategies, CSV output and a small SVG chart."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from html import escape

from .bounds import PackingParams, exact_min_binary_cost, noisy_lower_bound
from .errors import ConfigError, InfeasibleError
from .matrices import (
    baseline_matrix,
    bisection_plan,
    grid_packing,
    l0_cost,
    min_cost_binary,
)

__all__ = [
    "STRATEGIES",
    "CSV_HEADER",
    "SweepConfig",
    "SweepRow",
    "measurement_count",
    "powers_of_two",
    "run_sweep",
    "rows_to_csv",
    "read_sweep_csv",
    "render_chart",
]

STRATEGIES = ("bisection", "gaussian", "grid-packing", "min-binary")
CSV_HEADER = (
    "n",
    "m",
    "strategy",
    "l0_cost",
    "measurements",
    "cost_over_nlogn",
    "lower_bound",
    "status",
    "seed",
)


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple
    t_factor: float = 1.0
    strategies: tuple = ("bisection", "min-binary")
    packing: PackingParams | None = None
    seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if not self.n_values:
            raise ConfigError("n_values must not be empty")
        if any(int(n) != n or n < 2 for n in self.n_values):
            raise ConfigError(f"every n must be an integer >= 2, got {list(self.n_values)}")
        if not self.t_factor >= 1:
            raise ConfigError(f"t_factor must be >= 1, got {self.t_factor}")
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ConfigError(f"unknown strategies: {sorted(unknown)}")
        if "grid-packing" in self.strategies and self.packing is None:
            raise ConfigError("grid-packing needs packing parameters (tau, eps, mu)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class SweepRow:
    n: int
    m: int
    strategy: str
    l0_cost: int | None
    measurements: int | None
    cost_over_nlogn: float | None
    lower_bound: int | float | None
    status: str
    seed: int


def measurement_count(n: int, t_factor: float) -> int:
    """M = ceil(t log2 n), ignoring float noise below 1e-9."""
    return math.ceil(t_factor * math.log2(n) - 1e-9)


def powers_of_two(n_min: int, n_max: int):
    out = []
    k = max(1, (n_min - 1).bit_length())
    while 2**k <= n_max:
        out.append(2**k)
        k += 1
    return out


def _row(n, m, strategy, cost, measurements, lower, seed, status="ok"):
    ratio = None if cost is None else cost / (n * math.log2(n))
    return SweepRow(n, m, strategy, cost, measurements, ratio, lower, status, seed)


def _cell(n, strategy, cfg):
    m = measurement_count(n, cfg.t_factor)
    seed = cfg.seed
    if strategy == "bisection":
        plan = bisection_plan(n)
        return _row(n, plan.step_count, strategy, plan.total_cost, plan.step_count, None, seed)
    if strategy == "gaussian":
        cost = l0_cost(baseline_matrix("gaussian", n, m, seed))
        return _row(n, m, strategy, cost, m, None, seed)
    if strategy == "min-binary":
        # ceil(log2 n) is one short of feasible when n is a power of two.
        m = max(m, n.bit_length())
        cost = l0_cost(min_cost_binary(n, m))
        return _row(n, m, strategy, cost, m, exact_min_binary_cost(n, m).lower_bound, seed)
    if strategy == "grid-packing":
        p = cfg.packing
        try:
            cost = l0_cost(grid_packing(n, m, p.tau, p.d))
            lower = noisy_lower_bound(n, m, p).lower_bound
        except InfeasibleError:
            return _row(n, m, strategy, None, None, None, seed, status="infeasible")
        return _row(n, m, strategy, cost, m, lower, seed)
    raise ConfigError(f"unknown strategy {strategy!r}")


def run_sweep(cfg: SweepConfig):
    """One row per (n, strategy), sorted by n then strategy name.

    When ``cfg.output_path`` is set the rows are also written there as CSV.
    """
    rows = [_cell(int(n), s, cfg) for n in sorted(set(cfg.n_values)) for s in sorted(set(cfg.strategies))]
    if cfg.output_path is not None:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def read_sweep_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ConfigError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return list(reader)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def render_chart(records, width: int = 640, height: int = 400) -> str:
    """SVG line chart of cost_over_nlogn against log2 n, one line per strategy.

    ``records`` are dicts as returned by :func:`read_sweep_csv`; rows without
    a cost are skipped.
    """
    series = {}
    for rec in records:
        if not rec["cost_over_nlogn"]:
            continue
        x = math.log2(int(rec["n"]))
        series.setdefault(rec["strategy"], []).append((x, float(rec["cost_over_nlogn"])))
    margin = 50
    points = [p for pts in series.values() for p in pts]
    if points:
        x_lo, x_hi = min(p[0] for p in points), max(p[0] for p in points)
        y_hi = max(p[1] for p in points)
    else:
        x_lo, x_hi, y_hi = 0.0, 1.0, 1.0
    x_span = (x_hi - x_lo) or 1.0
    y_hi = y_hi or 1.0

    def sx(x):
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y):
        return height - margin - y / y_hi * (height - 2 * margin)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">log2 N</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.1f})">l0 cost / (N log2 N)</text>',
    ]
    for k, (name, pts) in enumerate(sorted(series.items())):
        colour = _PALETTE[k % len(_PALETTE)]
        pts = sorted(pts)
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{path}"/>')
        out.append(
            f'<text x="{width - margin + 4}" y="{margin + 14 * k}" font-size="11" '
            f'fill="{colour}">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
