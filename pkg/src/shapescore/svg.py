"""SVG rendering of a pipeline report."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import DimensionError
from .pipeline import curve_from_record

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")
SAMPLES_PER_LOOP = 256


def _fmt(x):
    return f"{x:.6g}"


def render_svg(report, width=800, height=800, margin=20) -> str:
    """SVG text showing boundary vertices, fitted loops and cluster scores."""
    if report.get("dim", 2) != 2:
        raise DimensionError("SVG output supports 2D reports only")
    groups = []
    all_pts = []
    for c in report.get("clusters", []):
        loops = []
        for lp in c.get("loops", []):
            pts = np.asarray(lp.get("coords", []), dtype=float).reshape(-1, 2)
            curve = None
            if lp.get("fitted"):
                t = np.linspace(0.0, 1.0, SAMPLES_PER_LOOP, endpoint=False)
                curve = curve_from_record(lp)(t)
                all_pts.append(curve)
            all_pts.append(pts)
            loops.append((pts, curve))
        groups.append((c, loops))

    if all_pts:
        xy = np.vstack(all_pts)
        lo, hi = xy.min(axis=0), xy.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    s = min((width - 2 * margin) / span[0], (height - 2 * margin) / span[1])

    def tx(p):
        return margin + (p[:, 0] - lo[0]) * s, height - margin - (p[:, 1] - lo[1]) * s

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>']
    for c, loops in groups:
        color = PALETTE[c["id"] % len(PALETTE)]
        out.append(f'<g id="cluster-{c["id"]}" class="cluster" stroke="{color}" fill="none">')
        label_at = None
        for pts, curve in loops:
            if curve is not None:
                x, y = tx(curve)
                d = "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in zip(x, y)) + " Z"
                out.append(f'<path d="{d}" stroke-width="1.5"/>')
            if len(pts):
                x, y = tx(pts)
                for a, b in zip(x, y):
                    out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="1.5" fill="{color}" stroke="none"/>')
                if label_at is None:
                    label_at = (x.max(), y.min())
        if label_at is not None and "score" in c:
            text = escape(f"cluster {c['id']}: {c['score']:.4g}")
            out.append(f'<text x="{_fmt(label_at[0])}" y="{_fmt(label_at[1])}" fill="{color}" '
                       f'stroke="none" font-size="12">{text}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(report, path):
    Path(path).write_text(render_svg(report), encoding="utf-8")
    return path
