"""Minimal SVG rendering of ROC panels (no plotting library needed)."""

from __future__ import annotations

from math import log10
from xml.sax.saxutils import escape

import numpy as np

from .evaluation import RocCurve

# EC detectors solid, Gaussian counterparts dashed in the same color
STYLE = {
    "ec-2spade": ("#d62728", None),
    "2spade": ("#d62728", "6,4"),
    "ec-ftmf": ("#1f77b4", None),
    "ftmf": ("#1f77b4", "6,4"),
    "ec-amf": ("#2ca02c", None),
    "amf": ("#2ca02c", "6,4"),
    "clairvoyant": ("#000000", None),
    "clairvoyant-gauss": ("#000000", "6,4"),
}

WIDTH, HEIGHT = 420, 360
LEFT, RIGHT, TOP, BOTTOM = 60, 130, 30, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def roc_panel(curves: dict[str, list[RocCurve]], title: str = "",
              log_pfa: bool = True, pfa_min: float = 1e-4) -> str:
    """One panel: a curve per detector, every trial of that detector overlaid."""
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM
    lo = log10(pfa_min)

    def sx(p):
        if log_pfa:
            frac = (np.log10(np.maximum(p, pfa_min)) - lo) / -lo
        else:
            frac = np.asarray(p)
        return LEFT + pw * frac

    def sy(p):
        return TOP + ph * (1 - np.asarray(p))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    if title:
        out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{TOP - 10}" text-anchor="middle" '
                   f'font-size="13">{escape(title)}</text>')
    if log_pfa:
        ticks = [10.0 ** k for k in range(int(lo), 1)]
        labels = [f"1e{int(round(log10(v)))}" if v < 1 else "1" for v in ticks]
    else:
        ticks = [0.0, 0.25, 0.5, 0.75, 1.0]
        labels = [f"{v:g}" for v in ticks]
    for v, lab in zip(ticks, labels):
        x = float(sx(v))
        out.append(f'<line x1="{_fmt(x)}" y1="{TOP + ph}" x2="{_fmt(x)}" y2="{TOP + ph + 4}" '
                   f'stroke="#444"/>')
        out.append(f'<text x="{_fmt(x)}" y="{TOP + ph + 16}" text-anchor="middle">{lab}</text>')
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = float(sy(v))
        out.append(f'<line x1="{LEFT - 4}" y1="{_fmt(y)}" x2="{LEFT}" y2="{_fmt(y)}" stroke="#444"/>')
        out.append(f'<text x="{LEFT - 7}" y="{_fmt(y + 4)}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'false alarm rate</text>')
    out.append(f'<text x="15" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {TOP + ph / 2:.1f})">detection rate</text>')

    for k, (name, trials) in enumerate(curves.items()):
        color, dash = STYLE.get(name, ("#7f7f7f", None))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for curve in trials:
            keep = curve.pfa >= (pfa_min if log_pfa else 0.0)
            xs, ys = sx(curve.pfa[keep]), sy(curve.pd[keep])
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                       f'stroke-width="1.2"{dash_attr}/>')
        ly = TOP + 12 + 16 * k
        lx = LEFT + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 27}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
