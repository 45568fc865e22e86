"""Minimal SVG polyline plots (no plotting dependency)."""
from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["polyline_svg"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def polyline_svg(series: Sequence[np.ndarray], path: str, size: int = 640,
                 labels: Sequence[str] | None = None) -> None:
    """Write 2D polylines (each an (n, 2) array) with an auto-fit viewBox.

    The y axis is flipped so the plot reads in the usual math orientation.
    """
    pts = [np.asarray(s, dtype=float).reshape(-1, 2) for s in series if len(s)]
    if not pts:
        raise ValueError("nothing to plot")
    allp = np.vstack(pts)
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.05 * float(span.max())
    lo = lo - pad
    hi = hi + pad
    width = hi[0] - lo[0]
    height = hi[1] - lo[1]
    stroke = 0.004 * max(width, height)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{int(size * height / width)}" '
        f'viewBox="{lo[0]:.6g} {-hi[1]:.6g} {width:.6g} {height:.6g}">',
        f'<rect x="{lo[0]:.6g}" y="{-hi[1]:.6g}" width="{width:.6g}" '
        f'height="{height:.6g}" fill="white"/>',
    ]
    for i, p in enumerate(pts):
        coords = " ".join(f"{x:.6g},{-y:.6g}" for x, y in p)
        color = _COLORS[i % len(_COLORS)]
        lines.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="{stroke:.6g}"/>')
    if labels:
        fs = 0.04 * max(width, height)
        for i, lab in enumerate(labels):
            color = _COLORS[i % len(_COLORS)]
            lines.append(f'<text x="{lo[0] + pad:.6g}" '
                         f'y="{-hi[1] + pad + (i + 1) * fs:.6g}" '
                         f'font-size="{fs:.6g}" fill="{color}">{lab}</text>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
