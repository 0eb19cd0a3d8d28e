"""Static SVG figures: (x, xi) heatmaps, per-row line overlays, support scatter.

Output is plain text with fixed number formatting, so identical data gives
identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .results import MOMENTS_FINAL, SUPPORT_FINAL, RunFormatError, read_moments, read_support

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=90, top=30, bottom=50)
# viridis anchor colors, interpolated linearly
_CMAP = np.array([
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
], dtype=float)
_LINE_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _color(t: float) -> str:
    t = min(max(float(t), 0.0), 1.0) * (len(_CMAP) - 1)
    k = min(int(t), len(_CMAP) - 2)
    c = _CMAP[k] + (t - k) * (_CMAP[k + 1] - _CMAP[k])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def _n(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Maps data coordinates to the plotting area."""

    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y0 + 0.5
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _open(title, desc):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{title}</title>",
        f"<desc>{desc}</desc>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]


def _axes(fr: _Frame, xlabel, ylabel):
    out = [
        f'<rect x="{_n(fr.left)}" y="{_n(fr.top)}" width="{_n(fr.right - fr.left)}" '
        f'height="{_n(fr.bottom - fr.top)}" fill="none" stroke="#000000"/>'
    ]
    for k in range(5):
        xv = fr.x0 + k * (fr.x1 - fr.x0) / 4
        yv = fr.y0 + k * (fr.y1 - fr.y0) / 4
        out.append(f'<text x="{_n(fr.px(xv))}" y="{_n(fr.bottom + 18)}" font-size="12" '
                   f'text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{_n(fr.left - 6)}" y="{_n(fr.py(yv) + 4)}" font-size="12" '
                   f'text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{_n((fr.left + fr.right) / 2)}" y="{HEIGHT - 12}" font-size="14" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="18" y="{_n((fr.top + fr.bottom) / 2)}" font-size="14" '
               f'text-anchor="middle" transform="rotate(-90 18 {_n((fr.top + fr.bottom) / 2)})">'
               f"{ylabel}</text>")
    return out


def heatmap_svg(values, x, xi, title="", label="u") -> str:
    """Top view of ``values[i, j]`` over ``(x_j, xi_i)``.

    The color scale spans the data minimum and maximum, which are recorded
    in the ``desc`` element and on the colorbar.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise RunFormatError("nothing to plot")
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin if vmax > vmin else 1.0
    dx = (x[-1] - x[0]) / (len(x) - 1) if len(x) > 1 else 1.0
    dxi = (xi[-1] - xi[0]) / (len(xi) - 1) if len(xi) > 1 else 1.0
    fr = _Frame((x[0] - dx / 2, x[-1] + dx / 2), (xi[0] - dxi / 2, xi[-1] + dxi / 2))
    out = _open(title, f"{label} heatmap; color scale min={vmin!r} max={vmax!r}")
    w = fr.px(x[0] + dx / 2) - fr.px(x[0] - dx / 2)
    h = fr.py(xi[0] - dxi / 2) - fr.py(xi[0] + dxi / 2)
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            out.append(
                f'<rect x="{_n(fr.px(x[j] - dx / 2))}" y="{_n(fr.py(xi[i] + dxi / 2))}" '
                f'width="{_n(w)}" height="{_n(h)}" fill="{_color((values[i, j] - vmin) / span)}"/>'
            )
    # colorbar
    bx, by, bh = WIDTH - MARGIN["right"] + 20, fr.top, fr.bottom - fr.top
    for k in range(50):
        out.append(f'<rect x="{bx}" y="{_n(by + bh * (49 - k) / 50)}" width="16" '
                   f'height="{_n(bh / 50 + 0.5)}" fill="{_color(k / 49)}"/>')
    out.append(f'<text x="{bx}" y="{_n(by - 6)}" font-size="11">{vmax:.4g}</text>')
    out.append(f'<text x="{bx}" y="{_n(by + bh + 14)}" font-size="11">{vmin:.4g}</text>')
    out += _axes(fr, "x", "xi")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def lines_svg(values, x, xi, title="", label="u") -> str:
    """One polyline over ``x`` per parameter row."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise RunFormatError("nothing to plot")
    vmin, vmax = float(values.min()), float(values.max())
    pad = 0.05 * (vmax - vmin) if vmax > vmin else 0.5
    fr = _Frame((x[0], x[-1]), (vmin - pad, vmax + pad))
    out = _open(title, f"{label} over x, one line per xi; min={vmin!r} max={vmax!r}")
    for i in range(values.shape[0]):
        pts = " ".join(f"{_n(fr.px(a))},{_n(fr.py(b))}" for a, b in zip(x, values[i]))
        color = _LINE_COLORS[i % len(_LINE_COLORS)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5">'
                   f"<title>xi={xi[i]!r}</title></polyline>")
    out += _axes(fr, "x", label)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def support_svg(x, u, weights, title="", label="u") -> str:
    """Scatter of support points ``(x, u)``, opacity scaled by weight."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if x.size == 0:
        raise RunFormatError("empty support")
    wmax = float(weights.max()) if weights.max() > 0 else 1.0
    fr = _Frame((x.min(), x.max()), (u.min(), u.max()))
    out = _open(title, f"measure support over (x, {label}); max weight={wmax!r}")
    for a, b, w in zip(x, u, weights):
        out.append(f'<circle cx="{_n(fr.px(a))}" cy="{_n(fr.py(b))}" r="2.5" fill="#08306b" '
                   f'fill-opacity="{0.15 + 0.85 * w / wmax:.3f}"/>')
    out += _axes(fr, "x", label)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(run_dir, row: int = 0) -> list[Path]:
    """Write SVG figures for a finished run directory; returns the paths.

    Produces one heatmap and one line overlay per component from
    ``moments_final.csv`` and, when present, a support scatter of row
    ``row`` per component from ``support_final.csv``.
    """
    run_dir = Path(run_dir)
    u, xi, x = read_moments(run_dir / MOMENTS_FINAL)
    out_dir = run_dir / "plots"
    out_dir.mkdir(exist_ok=True)
    written = []
    for k in range(u.shape[-1]):
        name = f"u{k + 1}"
        p = out_dir / f"heatmap_{name}.svg"
        p.write_text(heatmap_svg(u[..., k], x, xi, f"{name} at final time", name), encoding="utf-8")
        written.append(p)
        p = out_dir / f"lines_{name}.svg"
        p.write_text(lines_svg(u[..., k], x, xi, f"{name} at final time", name), encoding="utf-8")
        written.append(p)
    sup = run_dir / SUPPORT_FINAL
    if sup.is_file():
        cols = read_support(sup)
        sel = cols["i"] == row
        for k in range(u.shape[-1]):
            name = f"u{k + 1}"
            p = out_dir / f"support_{name}.svg"
            p.write_text(
                support_svg(cols["x"][sel], cols[name][sel], cols["weight"][sel],
                            f"measure support, row {row}", name),
                encoding="utf-8",
            )
            written.append(p)
    return written
