"""Minimal static SVG log-log plot (one scatter series plus a fitted line)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 30, 40, 60


def _decades(lo: float, hi: float) -> tuple[int, int]:
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if a == b:
        b += 1
    return a, b


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(e: int) -> str:
    if -3 <= e <= 3:
        return f"{10.0**e:g}"
    return f"1e{e}"


def loglog_svg(x, y, slope: float | None = None, intercept: float | None = None,
               title: str = "", xlabel: str = "x", ylabel: str = "y") -> str:
    """Render points ``(x, y)`` with positive coordinates on log axes.

    If ``slope`` and ``intercept`` are given, the line
    ``log y = slope log x + intercept`` is drawn across the data range.
    """
    pts = [(float(a), float(b)) for a, b in zip(x, y) if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{escape(title)}</text>',
    ]
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B
    if not pts:
        lines.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
                     'font-family="sans-serif" font-size="13">no positive data</text>')
        lines.append("</svg>")
        return "\n".join(lines) + "\n"
    xa, xb = _decades(min(p[0] for p in pts), max(p[0] for p in pts))
    ya, yb = _decades(min(p[1] for p in pts), max(p[1] for p in pts))

    def sx(v: float) -> float:
        return MARGIN_L + (math.log10(v) - xa) / (xb - xa) * pw

    def sy(v: float) -> float:
        return MARGIN_T + ph - (math.log10(v) - ya) / (yb - ya) * ph

    lines.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for e in range(xa, xb + 1):
        px = _fmt(sx(10.0**e))
        lines.append(f'<line x1="{px}" y1="{MARGIN_T}" x2="{px}" y2="{MARGIN_T + ph}" stroke="#dddddd"/>')
        lines.append(f'<text x="{px}" y="{MARGIN_T + ph + 18}" text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{_tick_label(e)}</text>')
    for e in range(ya, yb + 1):
        py = _fmt(sy(10.0**e))
        lines.append(f'<line x1="{MARGIN_L}" y1="{py}" x2="{MARGIN_L + pw}" y2="{py}" stroke="#dddddd"/>')
        lines.append(f'<text x="{MARGIN_L - 8}" y="{py}" text-anchor="end" dominant-baseline="middle" '
                     f'font-family="sans-serif" font-size="11">{_tick_label(e)}</text>')
    lines.append(f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 16}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{escape(xlabel)}</text>')
    lines.append(f'<text x="18" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
                 f'font-size="13" transform="rotate(-90 18 {MARGIN_T + ph / 2:.0f})">{escape(ylabel)}</text>')
    for a, b in pts:
        lines.append(f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="3" fill="#1f77b4"/>')
    if slope is not None and intercept is not None and math.isfinite(slope) and math.isfinite(intercept):
        lo, hi = min(p[0] for p in pts), max(p[0] for p in pts)
        seg = []
        for v in (lo, hi):
            w = math.exp(slope * math.log(v) + intercept)
            # clip to the plotting box
            w = min(max(w, 10.0**ya), 10.0**yb)
            seg.append(f"{_fmt(sx(v))},{_fmt(sy(w))}")
        lines.append(f'<polyline points="{" ".join(seg)}" fill="none" stroke="#d62728" stroke-width="1.5"/>')
        lines.append(f'<text x="{MARGIN_L + pw - 6}" y="{MARGIN_T + 16}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="12" fill="#d62728">slope {slope:.4f}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
