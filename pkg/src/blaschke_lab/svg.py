"""Minimal static SVG line charts with byte-deterministic output."""

from __future__ import annotations

import math

__all__ = ["line_chart"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick(x: float) -> str:
    return f"{x:.4g}"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def line_chart(
    series: dict,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
    logy: bool = False,
) -> str:
    """Render ``{label: (xs, ys)}`` as polylines on shared axes.

    Non-finite points, and nonpositive points on a log axis, are dropped.
    """
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(v)) if logy else (lambda v: v)

    def keep(x, y):
        ok = math.isfinite(x) and math.isfinite(y)
        return ok and (not logx or x > 0) and (not logy or y > 0)

    pts = {
        label: [(tx(float(x)), ty(float(y))) for x, y in zip(xs, ys) if keep(float(x), float(y))]
        for label, (xs, ys) in series.items()
    }
    allx = [p[0] for v in pts.values() for p in v] or [0.0, 1.0]
    ally = [p[1] for v in pts.values() for p in v] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(v):
        return _ML + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return _MT + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="22" text-anchor="middle" font-size="14">{_escape(title)}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        lx = 10**fx if logx else fx
        ly = 10**fy if logy else fy
        out.append(
            f'<text x="{_fmt(sx(fx))}" y="{_MT + ph + 16}" text-anchor="middle">{_tick(lx)}</text>'
        )
        out.append(
            f'<text x="{_ML - 6}" y="{_fmt(sy(fy) + 4)}" text-anchor="end">{_tick(ly)}</text>'
        )
    out.append(
        f'<text x="{_ML + pw // 2}" y="{_H - 10}" text-anchor="middle">{_escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{_MT + ph // 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + ph // 2})">{_escape(ylabel)}</text>'
    )
    for idx, (label, p) in enumerate(pts.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        if p:
            coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in p)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = _MT + 14 + 14 * idx
        out.append(f'<text x="{_ML + pw - 8}" y="{ly}" text-anchor="end" fill="{color}">{_escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
