"""CSV tables with a config-hash comment row, and line-chart SVGs rebuilt
from CSV text alone."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def write_csv(columns: Sequence[str], rows: Iterable[Sequence], config_hash: str) -> str:
    """RFC-4180 text: ``# config_sha256=...`` row, header row, data rows."""
    buf = io.StringIO()
    buf.write(f"# config_sha256={config_hash}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match the header")
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[str | None, list[dict[str, str]]]:
    """Config hash (if present) and rows as dicts of strings."""
    lines = text.splitlines()
    digest = None
    if lines and lines[0].startswith("#"):
        head = lines.pop(0)
        if "config_sha256=" in head:
            digest = head.split("config_sha256=", 1)[1].strip()
    return digest, list(csv.DictReader(lines))


def _float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        return math.nan


# ---------------------------------------------------------------------------
# SVG

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=170, top=30, bottom=50)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def line_chart(title: str, xlabel: str, ylabel: str, series: list[tuple[str, list[float], list[float]]],
               hlines: Sequence[tuple[str, float]] = (), vlines: Sequence[tuple[str, float]] = ()) -> str:
    """Minimal SVG line chart; non-finite points are dropped."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    xs_all = [p[0] for p in pts] + [v for _, v in vlines if math.isfinite(v)]
    ys_all = [p[1] for p in pts] + [v for _, v in hlines if math.isfinite(v)]
    x0, x1 = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    y0, y1 = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2:.2f}" y="18" text-anchor="middle" font-size="13">{_esc(title)}</text>',
           f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{MARGIN["top"] + ph}" x2="{sx(t):.2f}" '
                   f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{sy(t):.2f}" x2="{MARGIN["left"]}" '
                   f'y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.2f})">{_esc(ylabel)}</text>')

    legend = []
    for i, (label, value) in enumerate(hlines):
        if math.isfinite(value) and y0 <= value <= y1:
            color = PALETTE[i % len(PALETTE)]
            out.append(f'<line x1="{MARGIN["left"]}" y1="{sy(value):.2f}" x2="{MARGIN["left"] + pw}" '
                       f'y2="{sy(value):.2f}" stroke="{color}" stroke-dasharray="5,4" opacity="0.7"/>')
            legend.append((label, color, True))
    for label, value in vlines:
        if math.isfinite(value) and x0 <= value <= x1:
            out.append(f'<line x1="{sx(value):.2f}" y1="{MARGIN["top"]}" x2="{sx(value):.2f}" '
                       f'y2="{MARGIN["top"] + ph}" stroke="gray" stroke-dasharray="2,3"/>')
            out.append(f'<text x="{sx(value) + 3:.2f}" y="{MARGIN["top"] + 12}" fill="gray">{_esc(label)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = [f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        if coords:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(coords)}"/>')
            for c in coords:
                cx, cy = c.split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>')
        legend.append((label, color, False))
    for i, (label, color, dashed) in enumerate(legend):
        y = MARGIN["top"] + 10 + 16 * i
        lx = WIDTH - MARGIN["right"] + 12
        dash = ' stroke-dasharray="5,4"' if dashed else ""
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 20}" y2="{y}" stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 26}" y="{y + 4}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def sweep_svgs(csv_text: str) -> dict[str, str]:
    """Figures for a threshold-sweep table, computed only from its text.

    ``rates``: finite-``n`` rate against ``n`` for each ``R``, dashed at the
    limiting rates. ``radius``: finite-``n`` rate against ``R`` at the largest
    ``n``, with the threshold radii marked.
    """
    _, rows = read_csv(csv_text)
    if not rows:
        raise ValueError("empty sweep table")
    hyper = "rate_tail_bound" in rows[0]
    fin_col = "rate_tail_bound" if hyper else "rate_le"
    lim_col = "upper_rate" if hyper else "vor_rate"
    Rs = sorted({r["R"] for r in rows}, key=_float)
    ns = sorted({int(r["n"]) for r in rows})
    series, hlines = [], []
    for R in Rs:
        sub = sorted((r for r in rows if r["R"] == R), key=lambda r: int(r["n"]))
        series.append((f"R={_float(R):.4g}", [float(r["n"]) for r in sub], [_float(r[fin_col]) for r in sub]))
        hlines.append((f"limit R={_float(R):.4g}", _float(sub[-1][lim_col])))
    what = "(1/n) ln tail bound" if hyper else "(1/n) ln P(|Y| <= r)"
    rates = line_chart(f"finite-n rate: {what}", "n", "rate", series, hlines)

    top = sorted((r for r in rows if int(r["n"]) == ns[-1]), key=lambda r: _float(r["R"]))
    xs = [_float(r["R"]) for r in top]
    rad_series = [(f"n={ns[-1]}", xs, [_float(r[fin_col]) for r in top]),
                  ("limit", xs, [_float(r[lim_col]) for r in top])]
    if hyper:
        rad_series.append(("small-ball bound, n=%d" % ns[-1], xs, [_float(r["rate_smallball_bound"]) for r in top]))
        vlines = [("R_l", _float(top[0]["R_lower"])), ("R_u", _float(top[0]["R_upper"]))]
    else:
        vlines = [("threshold", _float(top[0]["threshold"]))]
    radius = line_chart(f"rate against R at n={ns[-1]}", "R", "rate", rad_series, vlines=vlines)
    return {"threshold_sweep_rates.svg": rates, "threshold_sweep_radius.svg": radius}
