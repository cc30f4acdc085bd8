"""
Static SVG line plots written by hand.

Output bytes depend only on the data: fixed canvas, fixed number formatting
and no timestamps.
"""

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .errors import NoDataError

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 50, 70
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")

PREAMBLE = (
    '<?xml version="1.0" standalone="no"?>\n'
    '<svg version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" xmlns="http://www.w3.org/2000/svg">\n'
    '<rect x="0" y="0" width="{w}" height="{h}" style="fill:#ffffff"/>\n'
)


class PlotKind(str, Enum):
    SOLUTION_PROFILE = "solution-profile"
    PROBE_VS_R = "probe-vs-R"
    FAMILY_OVERLAY = "family-overlay"


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class SvgCanvas:
    def __init__(self) -> None:
        self.commands: List[str] = []

    def polyline(self, points: Sequence[Tuple[float, float]], color: str, width: float = 1.5) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.commands.append(f'<polyline points="{coords}" style="fill:none;stroke:{color};stroke-width:{width:.1f}"/>')

    def line(self, x1: float, y1: float, x2: float, y2: float, color: str = "#000000") -> None:
        self.commands.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" style="stroke:{color};stroke-width:1"/>'
        )

    def text(self, x: float, y: float, string: str, anchor: str = "middle", size: int = 13, rotate: bool = False) -> None:
        transform = f' transform="rotate(-90 {x:.2f} {y:.2f})"' if rotate else ""
        self.commands.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{transform}>{_escape(string)}</text>'
        )

    def render(self) -> str:
        return PREAMBLE.format(w=WIDTH, h=HEIGHT) + "\n".join(self.commands) + "\n</svg>\n"


def _linear_ticks(lo: float, hi: float, count: int = 6) -> List[float]:
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def _padded(lo: float, hi: float) -> Tuple[float, float]:
    if hi == lo:
        span = max(abs(lo), 1.0)
        return lo - span, hi + span
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_plot(series: Sequence[Series], title: str, xlabel: str, ylabel: str, log_y: bool = False) -> str:
    if not series or all(len(s.x) == 0 for s in series):
        raise NoDataError(f"nothing to plot for {title!r}")
    xs = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s.y, dtype=float) for s in series])
    if log_y:
        ys = np.log10(ys)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    if x_hi == x_lo:
        x_lo, x_hi = _padded(x_lo, x_hi)
    y_lo, y_hi = _padded(float(ys.min()), float(ys.max()))

    plot_w, plot_h = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x: float) -> float:
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    canvas = SvgCanvas()
    canvas.line(LEFT, TOP + plot_h, LEFT + plot_w, TOP + plot_h)
    canvas.line(LEFT, TOP, LEFT, TOP + plot_h)
    for tick in _linear_ticks(x_lo, x_hi):
        canvas.line(px(tick), TOP + plot_h, px(tick), TOP + plot_h + 5)
        canvas.text(px(tick), TOP + plot_h + 20, f"{tick:.3g}")
    if log_y:
        y_ticks = [float(d) for d in range(math.ceil(y_lo), math.floor(y_hi) + 1)] or [y_lo, y_hi]
        step = max(1, len(y_ticks) // 8)
        for tick in y_ticks[::step]:
            canvas.line(LEFT - 5, py(tick), LEFT, py(tick))
            canvas.text(LEFT - 8, py(tick) + 4, f"1e{tick:.0f}", anchor="end")
    else:
        for tick in _linear_ticks(y_lo, y_hi):
            canvas.line(LEFT - 5, py(tick), LEFT, py(tick))
            canvas.text(LEFT - 8, py(tick) + 4, f"{tick:.3g}", anchor="end")

    canvas.text(WIDTH / 2, 28, title, size=15)
    canvas.text(LEFT + plot_w / 2, HEIGHT - 20, xlabel)
    canvas.text(22, TOP + plot_h / 2, ylabel, rotate=True)

    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        y = np.log10(np.asarray(s.y, dtype=float)) if log_y else np.asarray(s.y, dtype=float)
        canvas.polyline([(px(a), py(b)) for a, b in zip(np.asarray(s.x, dtype=float), y)], color)
        if len(series) > 1:
            canvas.text(LEFT + plot_w - 10, TOP + 18 * (k + 1), s.label, anchor="end", size=12)
            canvas.line(LEFT + plot_w - 8, TOP + 18 * (k + 1) - 4, LEFT + plot_w, TOP + 18 * (k + 1) - 4, color)
    return canvas.render()


def write_plot(
    path: Path, series: Sequence[Series], title: str, xlabel: str, ylabel: str, log_y: bool = False
) -> Path:
    path.write_text(render_plot(series, title, xlabel, ylabel, log_y), encoding="utf-8")
    return path


def positive(values: Sequence[float]) -> bool:
    return len(values) > 0 and all(v > 0 for v in values)
