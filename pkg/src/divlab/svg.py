"""Static SVG line charts of an aggregates series.

Output is a pure function of the input numbers: fixed canvas, fixed
decimal formatting, no timestamps.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .experiments import AggregateSeries, read_aggregates

WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 90, 170, 40, 60

SERIES = {
    "delta_r": ("Δ_R", "#1f77b4"),
    "delta_w": ("Δ_W", "#d62728"),
    "d_r": ("d_R", "#2ca02c"),
    "d_w": ("d_W", "#9467bd"),
}
FIGURES = {
    "figure1": (("delta_r", "delta_w", "d_r", "d_w"), True, "Comparison of Δ_R, Δ_W, d_R and d_W"),
    "figure2": (("d_w",), False, "d_W"),
}


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt_num(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e5 or abs(v) < 1e-2:
        return f"{v:.1e}"
    return f"{v:g}"


def render_svg_text(series: AggregateSeries, kind: str = "figure1") -> str:
    if kind not in FIGURES:
        raise ValueError(f"unknown figure kind {kind!r}")
    names, log_x, title = FIGURES[kind]
    xs = series.checkpoints
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    if xs:
        x_lo, x_hi = min(xs), max(xs)
        values = [v for name in names for v in getattr(series, name)]
        y_lo, y_hi = min(0.0, min(values)), max(0.0, max(values))
    else:
        x_lo, x_hi, y_lo, y_hi = 1, 10, 0.0, 1.0
    if log_x:
        x_lo, x_hi = math.log10(x_lo), math.log10(x_hi)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1

    def px(n):
        v = math.log10(n) if log_x else n
        return LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return TOP + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<g id="axes" stroke="black" fill="none">'
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}"/>'
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}"/></g>',
    ]

    ticks = []
    if log_x:
        for e in range(math.ceil(x_lo - 1e-12), math.floor(x_hi + 1e-12) + 1):
            ticks.append((LEFT + (e - x_lo) / (x_hi - x_lo) * pw, f"1e{e}"))
    else:
        for t in _nice_ticks(x_lo, x_hi):
            ticks.append((px(t), _fmt_num(t)))
    for x, label in ticks:
        out.append(
            f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>'
            f'<text x="{x:.2f}" y="{TOP + ph + 20}" text-anchor="middle">{label}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        y = py(t)
        out.append(
            f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>'
            f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt_num(t)}</text>'
        )
    out.append(
        f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">'
        f'N{" (log scale)" if log_x else ""}</text>'
    )

    if xs:
        for name in names:
            label, colour = SERIES[name]
            pts = " ".join(f"{px(n):.6f},{py(v):.6f}" for n, v in zip(xs, getattr(series, name)))
            out.append(
                f'<polyline id="{name}" fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>'
            )

    lx, ly = LEFT + pw + 20, TOP + 10
    out.append('<g id="legend">')
    for i, name in enumerate(names):
        label, colour = SERIES[name]
        y = ly + 20 * i
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 24}" y2="{y}" stroke="{colour}" stroke-width="2"/>'
            f'<text x="{lx + 30}" y="{y + 4}">{escape(label)}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(aggregates_path, kind: str, output_path) -> None:
    """Render an aggregates CSV as figure1 (four series, log N) or figure2 (d_W)."""
    text = render_svg_text(read_aggregates(aggregates_path), kind)
    try:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {output_path}: {exc.strerror}") from exc
