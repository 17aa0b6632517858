"""Deterministic SVG rendering of fitted curves and coefficient spectra.

Pure string templating with fixed float formatting: identical inputs give
byte-identical documents.
"""

from __future__ import annotations

import numpy as np

from . import spectral
from .kinematics import CurveState, eval_state


def _fmt(v):
    return f"{v:.2f}"


def _curve_samples(curve, n_samples):
    if isinstance(curve, CurveState):
        L, closed = curve.L, curve.closed
        t = np.linspace(0.0, L, n_samples, endpoint=not closed)
        return eval_state(curve, t), closed
    L, closed = curve.L, curve.closed
    t = np.linspace(0.0, L, n_samples, endpoint=not closed)
    x = spectral.eval_series(curve.basis, curve.x_coefs, L, t)
    y = spectral.eval_series(curve.basis, curve.y_coefs, L, t)
    return np.column_stack([x, y]), closed


def _spectrum_data(curve):
    if isinstance(curve, CurveState):
        xs = spectral.forward(curve.x, curve.L, curve.basis)
        ys = spectral.forward(curve.y, curve.L, curve.basis)
        xc, yc = xs.coeffs, ys.coeffs
        basis = curve.basis
    else:
        xc, yc, basis = curve.x_coefs, curve.y_coefs, curve.basis
    if basis == spectral.CHEBYSHEV:
        k = np.arange(len(xc))
        return k, np.abs(xc), np.abs(yc)
    half = len(xc) // 2
    return np.arange(half), np.abs(xc[half:]), np.abs(yc[half:])


def render_svg(
    curve,
    points=None,
    width=800,
    height=600,
    n_samples=1024,
    spectrum=False,
    guides=(),
    n_coefs_guide=None,
):
    """Render a curve (FitResult, CurveFile or CurveState) to an SVG document.

    points, when given, are drawn as red dots.  With spectrum=True a
    log-scale coefficient-magnitude panel is added below the curve;
    `guides` holds (label, level) horizontal lines (e.g. the noise floors)
    and n_coefs_guide a vertical line at the retained coefficient count.
    """
    samples, closed = _curve_samples(curve, n_samples)
    pts = None if points is None else np.asarray(points, float)

    all_xy = samples if pts is None else np.vstack([samples, pts])
    lo = all_xy.min(axis=0)
    hi = all_xy.max(axis=0)
    span = np.maximum(hi - lo, 1e-30)

    margin = 20.0
    panel_h = 0.38 * height if spectrum else 0.0
    plot_w = width - 2 * margin
    plot_h = height - panel_h - 2 * margin
    scale = min(plot_w / span[0], plot_h / span[1])
    offx = margin + (plot_w - scale * span[0]) / 2.0
    offy = margin + (plot_h - scale * span[1]) / 2.0

    def to_px(p):
        # flip y so the positive axis points up
        return offx + scale * (p[:, 0] - lo[0]), offy + scale * (hi[1] - p[:, 1])

    sx, sy = to_px(samples)
    path = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in zip(sx, sy))
    if closed:
        path += " Z"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<path d="{path}" fill="none" stroke="black" stroke-width="1.2"/>',
    ]
    if pts is not None:
        px, py = to_px(pts)
        for x, y in zip(px, py):
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="red"/>')

    if spectrum:
        k, xm, ym = _spectrum_data(curve)
        top = height - panel_h + 10.0
        bot = height - margin
        left = margin
        right = width - margin
        floor = 1e-18
        logs = [np.log10(np.maximum(m, floor)) for m in (xm, ym)]
        lo_v = min(l.min() for l in logs)
        hi_v = max(l.max() for l in logs)
        vspan = max(hi_v - lo_v, 1e-12)
        kmax = max(int(k[-1]), 1)

        def spec_px(kk, vv):
            x = left + (right - left) * kk / kmax
            y = bot - (bot - top) * (vv - lo_v) / vspan
            return x, y

        parts.append(
            f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" '
            f'height="{_fmt(bot - top)}" fill="none" stroke="gray" stroke-width="0.5"/>'
        )
        for logm, color in zip(logs, ("black", "steelblue")):
            pl = " ".join(
                f"{_fmt(x)},{_fmt(y)}" for x, y in (spec_px(kk, vv) for kk, vv in zip(k, logm))
            )
            parts.append(
                f'<polyline points="{pl}" fill="none" stroke="{color}" stroke-width="0.8"/>'
            )
        for label, level in guides:
            if level <= 0:
                continue
            _, y = spec_px(0, np.log10(max(level, floor)))
            parts.append(
                f'<line x1="{_fmt(left)}" y1="{_fmt(y)}" x2="{_fmt(right)}" y2="{_fmt(y)}" '
                f'stroke="crimson" stroke-width="0.6" stroke-dasharray="4 3"/>'
            )
            parts.append(
                f'<text x="{_fmt(left + 4)}" y="{_fmt(y - 3)}" font-size="9" '
                f'fill="crimson">{label}</text>'
            )
        if n_coefs_guide is not None and 0 < n_coefs_guide <= kmax:
            x, _ = spec_px(n_coefs_guide, lo_v)
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(top)}" x2="{_fmt(x)}" y2="{_fmt(bot)}" '
                f'stroke="gray" stroke-width="0.6" stroke-dasharray="2 3"/>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
