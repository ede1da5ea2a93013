"""Standalone SVG rendering of aggregated regret curves.

Each series draws its mean log-regret as a polyline with a translucent band
whose half-width is exactly the standard-error column, plus a dashed vertical
marker between the last design evaluation and the first model-guided one.
The writer emits plain SVG 1.1 with no external dependencies, and all
coordinates are formatted to fixed precision so output is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .experiments import Aggregate

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH = 720
_HEIGHT = 480
_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 40
_MARGIN_B = 50


@dataclass
class PlotSeries:
    """One curve: label, iteration axis, mean, and standard error."""

    label: str
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    init_boundary: int = 0

    @classmethod
    def from_aggregate(cls, label: str, agg: Aggregate) -> "PlotSeries":
        return cls(
            label=label,
            x=np.asarray(agg.iters, dtype=float),
            mean=np.asarray(agg.mean, dtype=float),
            stderr=np.asarray(agg.stderr, dtype=float),
            init_boundary=agg.init_boundary,
        )

    def band_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Data-space band edges: (mean + stderr, mean - stderr)."""
        return self.mean + self.stderr, self.mean - self.stderr


@dataclass
class Frame:
    """Affine data-to-pixel mapping of the plot area."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def px(self, x: np.ndarray) -> np.ndarray:
        span = self.x_max - self.x_min or 1.0
        return _MARGIN_L + (np.asarray(x) - self.x_min) / span * (
            _WIDTH - _MARGIN_L - _MARGIN_R
        )

    def py(self, y: np.ndarray) -> np.ndarray:
        span = self.y_max - self.y_min or 1.0
        return _HEIGHT - _MARGIN_B - (np.asarray(y) - self.y_min) / span * (
            _HEIGHT - _MARGIN_T - _MARGIN_B
        )


def build_frame(series: list[PlotSeries]) -> Frame:
    xs = np.concatenate([s.x for s in series])
    tops = np.concatenate([s.band_bounds()[0] for s in series])
    bots = np.concatenate([s.band_bounds()[1] for s in series])
    finite_y = np.concatenate([tops[np.isfinite(tops)], bots[np.isfinite(bots)]])
    if finite_y.size == 0:
        finite_y = np.array([0.0, 1.0])
    y_lo, y_hi = float(np.min(finite_y)), float(np.max(finite_y))
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    return Frame(
        x_min=float(np.min(xs)),
        x_max=float(np.max(xs)),
        y_min=y_lo - pad,
        y_max=y_hi + pad,
    )


def _f(v: float) -> str:
    return f"{v:.2f}"


def _tick_values(lo: float, hi: float, target: int = 5) -> np.ndarray:
    span = hi - lo
    if span <= 0:
        return np.array([lo])
    raw = span / max(target - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def _polyline(xs: np.ndarray, ys: np.ndarray, color: str, width: float = 1.8) -> str:
    pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in zip(xs, ys))
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
        f'points="{pts}" />'
    )


def _band(xs: np.ndarray, top: np.ndarray, bottom: np.ndarray, color: str) -> str:
    fwd = [f"{_f(a)},{_f(b)}" for a, b in zip(xs, top)]
    back = [f"{_f(a)},{_f(b)}" for a, b in zip(xs[::-1], bottom[::-1])]
    return (
        f'<polygon fill="{color}" fill-opacity="0.2" stroke="none" '
        f'points="{" ".join(fwd + back)}" />'
    )


def render_regret_curves(
    series: list[PlotSeries],
    title: str = "simple regret",
    y_label: str = "mean log10(regret + 1e-12)",
) -> str:
    """Render aggregated curves as an SVG 1.1 document string."""
    if not series:
        raise ConfigError("nothing to plot")
    frame = build_frame(series)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
        '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff" />',
    ]
    # Axes.
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#000000" />'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000000" />'
    )
    for tx in _tick_values(frame.x_min, frame.x_max):
        px = float(frame.px(tx))
        parts.append(
            f'<line x1="{_f(px)}" y1="{y0}" x2="{_f(px)}" y2="{y0 + 5}" stroke="#000000" />'
        )
        parts.append(
            f'<text x="{_f(px)}" y="{y0 + 20}" font-size="12" text-anchor="middle">'
            f"{tx:g}</text>"
        )
    for ty in _tick_values(frame.y_min, frame.y_max):
        py = float(frame.py(ty))
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_f(py)}" x2="{x0}" y2="{_f(py)}" stroke="#000000" />'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_f(py + 4)}" font-size="12" text-anchor="end">'
            f"{ty:g}</text>"
        )
    parts.append(
        f'<text x="{(x0 + x1) // 2}" y="{_HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle">iteration</text>'
    )
    parts.append(
        f'<text x="18" y="{(y0 + y1) // 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 18 {(y0 + y1) // 2})">{y_label}</text>'
    )
    parts.append(
        f'<text x="{(x0 + x1) // 2}" y="24" font-size="15" text-anchor="middle">'
        f"{title}</text>"
    )
    # Design/optimization boundary markers (one per distinct boundary).
    for boundary in sorted({s.init_boundary for s in series if s.init_boundary > 0}):
        bx = float(frame.px(boundary + 0.5))
        parts.append(
            f'<line x1="{_f(bx)}" y1="{y0}" x2="{_f(bx)}" y2="{y1}" '
            f'stroke="#888888" stroke-dasharray="5,4" />'
        )
    # Bands first, then lines on top.
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        top, bottom = s.band_bounds()
        if s.x.size > 1 and np.all(np.isfinite(top)) and np.all(np.isfinite(bottom)):
            if np.any(s.stderr > 0):
                parts.append(_band(frame.px(s.x), frame.py(top), frame.py(bottom), color))
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        keep = np.isfinite(s.mean)
        parts.append(_polyline(frame.px(s.x[keep]), frame.py(s.mean[keep]), color))
        ly = _MARGIN_T + 16 + 16 * i
        parts.append(
            f'<line x1="{x1 - 150}" y1="{ly - 4}" x2="{x1 - 125}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="3" />'
        )
        parts.append(
            f'<text x="{x1 - 118}" y="{ly}" font-size="12">{_escape(s.label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def write_svg(path, series: list[PlotSeries], **kwargs) -> None:
    from pathlib import Path

    Path(path).write_text(render_regret_curves(series, **kwargs))
