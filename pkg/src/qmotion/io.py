"""CSV/JSON tables and deterministic SVG line plots.

CSV files start with a block of ``# key: value`` lines carrying the run
provenance, followed by a comma-separated header and data rows. Numbers are
written with 12 significant digits; ``nan`` marks samples that are
undefined (singular rates, failed sweep points).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from html import escape

import numpy as np

from . import __version__


def fmt(value: float) -> str:
    """Fixed 12-significant-digit scientific notation."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.11e}"


@dataclass
class Table:
    """Column-oriented numeric table plus ordered provenance metadata."""

    columns: list
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.size and self.data.shape[1] != len(self.columns):
            raise ValueError("column count does not match data width")

    def column(self, name):
        return self.data[:, self.columns.index(name)]


def to_csv(table: Table) -> str:
    lines = [f"# qmotion {__version__}"]
    lines += [f"# {key}: {value}" for key, value in table.meta.items()]
    lines.append(",".join(table.columns))
    lines += [",".join(fmt(v) for v in row) for row in table.data]
    return "\n".join(lines) + "\n"


def _json_number(value):
    value = float(value)
    return None if not math.isfinite(value) else float(fmt(value))


def to_json(table: Table) -> str:
    meta = dict(table.meta)
    x_name = table.columns[0]
    doc = {
        "version": __version__,
        "params": meta.pop("params", ""),
        "grid": {"x": x_name, "values": [_json_number(v) for v in table.data[:, 0]],
                 "spec": meta.pop("grid", "")},
        "series": [{"name": name, "values": [_json_number(v) for v in table.data[:, i]]}
                   for i, name in enumerate(table.columns) if i > 0],
        "meta": meta,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_csv(text: str) -> Table:
    """Inverse of :func:`to_csv`.

    Raises
    ------
    ValueError
        On an empty table or malformed rows.
    """
    meta, header, rows = {}, None, []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body and header is None:
                key, value = body.split(":", 1)
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field") from None
    if header is None or not rows:
        raise ValueError("no data rows found")
    return Table(header, np.array(rows), meta)


# ---------------------------------------------------------------- plotting

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 760, 460
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 190, 40, 60


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def _label(v):
    return f"{v:.4g}"


def _series_from(table: Table):
    """(x, [(name, y)]) pairs; long tables with a ``group`` key are pivoted."""
    group = table.meta.get("group")
    x_name = table.columns[0]
    if group:
        value_name = table.meta.get("value", table.columns[-1])
        g = table.column(group)
        out = []
        for key in dict.fromkeys(g.tolist()):
            mask = g == key
            out.append((f"{value_name} {group}={key:.4g}",
                        table.column(x_name)[mask], table.column(value_name)[mask]))
        return x_name, out
    x = table.data[:, 0]
    return x_name, [(name, x, table.data[:, i]) for i, name in enumerate(table.columns) if i > 0]


def _segments(x, y, log):
    """Split a curve into drawable runs: breaks at NaN and, on log axes, sign flips."""
    runs, current, current_neg = [], [], None
    for xi, yi in zip(x, y):
        ok = math.isfinite(yi) and math.isfinite(xi) and (not log or yi != 0)
        neg = yi < 0 if ok else None
        if not ok or (log and current and neg != current_neg):
            if len(current) > 0:
                runs.append((current, bool(current_neg)))
            current = []
        if ok:
            current.append((xi, math.log10(abs(yi)) if log else yi))
            current_neg = neg
    if current:
        runs.append((current, bool(current_neg)))
    return runs


def render_svg(table: Table, log=None) -> str:
    """Render a table as a standalone SVG line plot.

    Same table in, byte-identical SVG out. NaN samples leave gaps. On a log
    axis ``|y|`` is drawn and stretches where ``y < 0`` are dashed.
    """
    if table.data.size == 0:
        raise ValueError("cannot plot an empty table")
    log = table.meta.get("yscale") == "log" if log is None else log
    x_name, series = _series_from(table)
    curves = [(name, _segments(x, y, log)) for name, x, y in series]
    pts = [p for _, runs in curves for run, _ in runs for p in run]
    if not pts:
        raise ValueError("no finite samples to plot")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(v):
        return _LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return _TOP + ph - (v - y0) / (y1 - y0) * ph

    ylabel = table.meta.get("ylabel", "value")
    if log:
        ylabel = f"log10 |{ylabel}|"
    title = table.meta.get("title", table.meta.get("command", ""))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        X = sx(v)
        out.append(f'<line x1="{X:.2f}" y1="{_TOP + ph}" x2="{X:.2f}" y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{_label(v)}</text>')
    for v in _ticks(y0, y1):
        Y = sy(v)
        out.append(f'<line x1="{_LEFT - 5}" y1="{Y:.2f}" x2="{_LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_label(v)}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{_H - 15}" text-anchor="middle">{escape(x_name)}</text>')
    out.append(f'<text x="18" y="{_TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {_TOP + ph / 2:.2f})">{escape(ylabel)}</text>')
    for k, (name, runs) in enumerate(curves):
        colour = _PALETTE[k % len(_PALETTE)]
        for run, negative in runs:
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in run)
            dash = ' stroke-dasharray="4 3"' if negative else ""
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2"{dash} points="{path}"/>')
        ly = _TOP + 14 + 18 * k
        out.append(f'<line x1="{_W - _RIGHT + 12}" y1="{ly}" x2="{_W - _RIGHT + 36}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{_W - _RIGHT + 42}" y="{ly + 4}">{escape(name)}</text>')
    if log:
        ly = _TOP + 14 + 18 * len(curves)
        out.append(f'<text x="{_W - _RIGHT + 12}" y="{ly + 4}">dashed: negative values</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
