"""Static SVG renderings of run artifacts.

Hand-written SVG keeps the output byte-deterministic and dependency-free:
the same inputs always produce the same file.
"""
from __future__ import annotations

import math

import numpy as np

_POSTURE_SIZE = 640
_CONV_W, _CONV_H = 640, 420
_MARGIN = 56


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _polyline(points, color: str, width: float = 2.5) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return (
        f'<polyline points="{coords}" fill="none" stroke="{color}" '
        f'stroke-width="{width}" stroke-linejoin="round" stroke-linecap="round"/>'
    )


def _circle(x: float, y: float, r: float, color: str) -> str:
    return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{color}"/>'


def _text(x: float, y: float, s: str, color: str = "#333", size: int = 13,
          anchor: str = "start") -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" fill="{color}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}">{s}</text>'
    )


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def posture_svg(initial_points, final_points, target_xy) -> str:
    """Chain postures: initial polyline in blue, final in magenta, target dot
    in green. Axis scaling is equal in x and y."""
    initial_points = np.asarray(initial_points, dtype=float)
    final_points = np.asarray(final_points, dtype=float)
    tx, ty = float(target_xy[0]), float(target_xy[1])
    everything = np.vstack([initial_points, final_points, [[tx, ty]]])
    lo = everything.min(axis=0)
    hi = everything.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9) * 1.1
    center = (lo + hi) / 2.0
    size = _POSTURE_SIZE
    scale = (size - 2 * _MARGIN) / span

    def to_px(p):
        x = size / 2 + (p[0] - center[0]) * scale
        y = size / 2 - (p[1] - center[1]) * scale
        return x, y

    parts = _header(size, size)
    parts.append(
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{size - 2 * _MARGIN}" '
        f'height="{size - 2 * _MARGIN}" fill="none" stroke="#ccc"/>'
    )
    # origin crosshair, if the base is in view
    ox, oy = to_px((0.0, 0.0))
    if _MARGIN <= ox <= size - _MARGIN and _MARGIN <= oy <= size - _MARGIN:
        parts.append(
            f'<path d="M {_fmt(ox - 6)} {_fmt(oy)} H {_fmt(ox + 6)} '
            f'M {_fmt(ox)} {_fmt(oy - 6)} V {_fmt(oy + 6)}" stroke="#999"/>'
        )
    for points, color in ((initial_points, "blue"), (final_points, "magenta")):
        px = [to_px(p) for p in points]
        parts.append(_polyline(px, color))
        for x, y in px:
            parts.append(_circle(x, y, 3.0, color))
    gx, gy = to_px((tx, ty))
    parts.append(_circle(gx, gy, 5.0, "green"))
    parts.append(_text(_MARGIN, _MARGIN - 10, "initial", "blue"))
    parts.append(_text(_MARGIN + 60, _MARGIN - 10, "final", "magenta"))
    parts.append(_text(_MARGIN + 110, _MARGIN - 10, "target", "green"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def convergence_svg(iterations, losses) -> str:
    """Loss versus iteration on a log-scale vertical axis."""
    iterations = np.asarray(iterations, dtype=float)
    losses = np.maximum(np.asarray(losses, dtype=float), 1e-300)
    if iterations.shape != losses.shape or iterations.size == 0:
        raise ValueError("iterations and losses must be equal-length and non-empty")
    logs = np.log10(losses)
    y_lo = math.floor(logs.min())
    y_hi = math.ceil(logs.max())
    if y_hi == y_lo:
        y_hi += 1
    x_hi = max(float(iterations.max()), 1.0)

    w, h = _CONV_W, _CONV_H
    plot_w = w - 2 * _MARGIN
    plot_h = h - 2 * _MARGIN

    def to_px(it, lg):
        x = _MARGIN + it / x_hi * plot_w
        y = h - _MARGIN - (lg - y_lo) / (y_hi - y_lo) * plot_h
        return x, y

    parts = _header(w, h)
    parts.append(
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#ccc"/>'
    )
    decade_step = max(1, math.ceil((y_hi - y_lo) / 8))
    for e in range(y_lo, y_hi + 1, decade_step):
        _, y = to_px(0, e)
        parts.append(
            f'<line x1="{_MARGIN}" y1="{_fmt(y)}" x2="{w - _MARGIN}" '
            f'y2="{_fmt(y)}" stroke="#eee"/>'
        )
        parts.append(_text(_MARGIN - 8, y + 4, f"1e{e}", anchor="end"))
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        it = frac * x_hi
        x, _ = to_px(it, y_lo)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{h - _MARGIN}" x2="{_fmt(x)}" '
            f'y2="{h - _MARGIN + 5}" stroke="#999"/>'
        )
        parts.append(_text(x, h - _MARGIN + 20, f"{it:.0f}", anchor="middle"))
    pts = [to_px(it, lg) for it, lg in zip(iterations, logs)]
    parts.append(_polyline(pts, "blue", width=1.5))
    parts.append(_text(w / 2, h - 12, "iteration", anchor="middle"))
    parts.append(_text(14, _MARGIN - 10, "loss"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
