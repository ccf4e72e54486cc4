"""Static SVG emission for experiment summaries.

Self-contained SVG with no external assets and deterministic bytes: all
coordinates are rendered with a fixed format, colors come from a fixed
palette, and input order is canonicalized. One recovery-rate figure plus one
error figure per noise level, mirroring the usual presentation of recovery
experiments (rate vs k; log-scale error vs k with interquartile bands).
"""

from __future__ import annotations

import math
from pathlib import Path

__all__ = ["emit_plots"]

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 64, 20, 36, 52
_PALETTE = ["#1f6fb4", "#d95f02", "#2a9d4e", "#7b4fa6", "#c52233", "#6b6b6b"]

_ERR_FLOOR, _ERR_CEIL = 1e-17, 1e1


def _fmt(v):
    return f"{v:.2f}"


def _polyline(points, color, dashed=False):
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} '
            f'points="{pts}"/>')


def _band(upper, lower, color):
    pts = upper + lower[::-1]
    d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
    return f'<polygon fill="{color}" fill-opacity="0.18" stroke="none" points="{d}"/>'


def _text(x, y, s, size=12, anchor="middle", rotate=None):
    tr = f' transform="rotate(-90 {_fmt(x)} {_fmt(y)})"' if rotate else ""
    return (f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
            f'font-size="{size}" text-anchor="{anchor}"{tr}>{s}</text>')


class _Axes:
    """Linear x; linear or log10 y, mapped onto the fixed canvas."""

    def __init__(self, x_range, y_range, log_y=False):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.log_y = log_y
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1

    def x(self, v):
        frac = (v - self.x0) / (self.x1 - self.x0)
        return _ML + frac * (_W - _ML - _MR)

    def y(self, v):
        if self.log_y:
            v = math.log10(min(max(v, _ERR_FLOOR), _ERR_CEIL))
            y0, y1 = math.log10(self.y0), math.log10(self.y1)
        else:
            y0, y1 = self.y0, self.y1
        frac = (v - y0) / (y1 - y0) if y1 != y0 else 0.5
        return _H - _MB - frac * (_H - _MT - _MB)

    def frame(self, title, xlabel, ylabel, x_ticks, y_ticks, y_tick_labels):
        parts = [
            f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
            f'height="{_H - _MT - _MB}" fill="none" stroke="#333" stroke-width="1"/>',
            _text(_W / 2, 20, title, size=14),
            _text(_W / 2, _H - 14, xlabel),
            _text(18, (_MT + _H - _MB) / 2, ylabel, rotate=True),
        ]
        for tx in x_ticks:
            px = self.x(tx)
            parts.append(f'<line x1="{_fmt(px)}" y1="{_H - _MB}" x2="{_fmt(px)}" '
                         f'y2="{_H - _MB + 5}" stroke="#333"/>')
            parts.append(_text(px, _H - _MB + 18, str(tx), size=11))
        for tv, lbl in zip(y_ticks, y_tick_labels):
            py = self.y(tv)
            parts.append(f'<line x1="{_ML - 5}" y1="{_fmt(py)}" x2="{_ML}" '
                         f'y2="{_fmt(py)}" stroke="#333"/>')
            parts.append(_text(_ML - 9, py + 4, lbl, size=11, anchor="end"))
            parts.append(f'<line x1="{_ML}" y1="{_fmt(py)}" x2="{_W - _MR}" '
                         f'y2="{_fmt(py)}" stroke="#ddd" stroke-width="0.6"/>')
        return parts


def _svg(parts):
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n{body}\n</svg>\n')


def _legend(entries):
    parts = []
    x = _ML + 10
    y = _MT + 16
    for i, (label, color) in enumerate(entries):
        yy = y + 16 * i
        parts.append(f'<line x1="{x}" y1="{yy - 4}" x2="{x + 22}" y2="{yy - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(_text(x + 28, yy, label, size=11, anchor="start"))
    return parts


def _sigma_tag(sigma):
    return "0" if sigma == 0 else f"{sigma:.0e}"


def emit_plots(summary, outdir, prefix="") -> list:
    """Write recovery-rate and error figures for an aggregated summary.

    ``summary`` is the list of per-cell summaries from
    :func:`algphase.harness.aggregate`. Returns the written paths:
    ``recovery_rate.svg`` plus ``error_sigma_<level>.svg`` for each noise
    level present. Output bytes depend only on the summary contents.
    """
    if not summary:
        raise ValueError("empty summary")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    solvers = sorted({c.solver for c in summary})
    sigmas = sorted({c.sigma for c in summary})
    ks = sorted({c.k for c in summary})
    written = []

    # recovery rate vs k, one curve per (solver, sigma)
    ax = _Axes((min(ks), max(ks)), (0.0, 1.0))
    parts = ax.frame("recovery rate", "measurements k", "success rate",
                     ks, [0, 0.25, 0.5, 0.75, 1.0],
                     ["0", "0.25", "0.5", "0.75", "1"])
    entries = []
    ci = 0
    for solver in solvers:
        for sigma in sigmas:
            cells = sorted((c for c in summary
                            if c.solver == solver and c.sigma == sigma),
                           key=lambda c: c.k)
            if not cells:
                continue
            color = _PALETTE[ci % len(_PALETTE)]
            ci += 1
            pts = [(ax.x(c.k), ax.y(c.success_rate)) for c in cells]
            parts.append(_polyline(pts, color, dashed=(sigma > 0)))
            entries.append((f"{solver}, sigma={_sigma_tag(sigma)}", color))
    parts.extend(_legend(entries))
    path = outdir / f"{prefix}recovery_rate.svg"
    path.write_text(_svg(parts))
    written.append(path)

    # per-sigma error panels: median with interquartile band, log scale
    for sigma in sigmas:
        cells_sigma = [c for c in summary if c.sigma == sigma]
        if not cells_sigma:
            continue
        finite = [v for c in cells_sigma
                  for v in (c.err_q1, c.err_median, c.err_q3)
                  if v == v]
        if not finite:
            continue
        lo = 10 ** math.floor(math.log10(max(min(finite), _ERR_FLOOR)))
        hi = 10 ** math.ceil(math.log10(max(max(finite), lo * 10)))
        decades = range(int(math.log10(lo)), int(math.log10(hi)) + 1)
        ticks = [10.0 ** d for d in decades]
        labels = [f"1e{d:+03d}" for d in decades]
        if len(ticks) > 8:
            ticks, labels = ticks[::2], labels[::2]
        ax = _Axes((min(ks), max(ks)), (lo, hi), log_y=True)
        parts = ax.frame(f"relative error, sigma={_sigma_tag(sigma)}",
                         "measurements k", "relative error",
                         ks, ticks, labels)
        entries = []
        for si, solver in enumerate(solvers):
            cells = sorted((c for c in cells_sigma if c.solver == solver),
                           key=lambda c: c.k)
            if not cells:
                continue
            color = _PALETTE[si % len(_PALETTE)]
            upper = [(ax.x(c.k), ax.y(c.err_q3)) for c in cells if c.err_q3 == c.err_q3]
            lower = [(ax.x(c.k), ax.y(c.err_q1)) for c in cells if c.err_q1 == c.err_q1]
            if upper and lower:
                parts.append(_band(upper, lower, color))
            med = [(ax.x(c.k), ax.y(c.err_median)) for c in cells
                   if c.err_median == c.err_median]
            if med:
                parts.append(_polyline(med, color))
            entries.append((solver, color))
        parts.extend(_legend(entries))
        path = outdir / f"{prefix}error_sigma_{_sigma_tag(sigma)}.svg"
        path.write_text(_svg(parts))
        written.append(path)
    return written
