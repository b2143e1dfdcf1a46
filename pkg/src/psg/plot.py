"""Bare-bones SVG line charts for sweep results."""

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")
LOG_FLOOR = 1e-10

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart(series, title="", xlabel="k", ylabel="", log_y=False):
    """Render ``{label: (xs, ys)}`` as an SVG string.

    With ``log_y`` values are floored at 1e-10 before taking logs, so zero
    rates still show up at the bottom of the axis.
    """
    pts = {}
    for label, (xs, ys) in series.items():
        clean = [(float(x), float(y)) for x, y in zip(xs, ys) if y is not None and math.isfinite(float(y))]
        if log_y:
            clean = [(x, math.log10(max(y, LOG_FLOOR))) for x, y in clean]
        if clean:
            pts[label] = clean
    all_x = [x for p in pts.values() for x, _ in p] or [0.0, 1.0]
    all_y = [y for p in pts.values() for _, y in p] or [0.0, 1.0]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(all_y), max(all_y)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    if y0 == y1:
        y0, y1 = y0 - 1, y1 + 1

    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{LEFT + pw / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for x in _ticks(x0, x1):
        out.append(f'<text x="{sx(x):.1f}" y="{TOP + ph + 18}" text-anchor="middle" font-size="11">{x:.4g}</text>')
    for y in _ticks(y0, y1):
        label = f"1e{y:.1f}" if log_y else f"{y:.4g}"
        out.append(f'<text x="{LEFT - 6}" y="{sy(y) + 4:.1f}" text-anchor="end" font-size="11">{label}</text>')
        out.append(f'<line x1="{LEFT}" y1="{sy(y):.1f}" x2="{LEFT + pw}" y2="{sy(y):.1f}" stroke="#eee"/>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{H - 12}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    ylab = escape(ylabel + (" (log10)" if log_y else ""))
    out.append(
        f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {TOP + ph / 2})">{ylab}</text>'
    )
    for i, (label, p) in enumerate(pts.items()):
        color = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(p))
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in p:
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
        ly = TOP + 14 + 18 * i
        out.append(f'<line x1="{W - RIGHT + 12}" y1="{ly}" x2="{W - RIGHT + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT + 38}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def rows_chart(rows, log_y=False):
    """Chart success rate (or mean error for CSS rows) against k."""
    series = {}
    metric = "mean_error" if rows and rows[0].experiment == "css" else "success_rate"
    for row in rows:
        if row.experiment == "recovery":
            # eps = beta/k changes with k; one line per beta
            label = f"{row.method} beta={(1 - row.theory_lower) / 2:.4g}"
        elif row.parameter is None or row.experiment == "restricted":
            label = row.method
        else:
            label = f"{row.method} {row.parameter:.4g}"
        xs, ys = series.setdefault(label, ([], []))
        xs.append(row.k)
        ys.append(getattr(row, metric))
    title = rows[0].experiment if rows else ""
    return line_chart(series, title=title, xlabel="k", ylabel=metric.replace("_", " "), log_y=log_y)
