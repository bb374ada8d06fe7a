"""Deterministic SVG rendering of a figure at a view state.

Output depends only on (spec, view, options): coordinates are printed with a
fixed precision and elements are emitted in trace order, so identical inputs
give byte-identical documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from vizstate.colors import Color
from vizstate.spec_model import FigureSpec, Trace, category_label, resolve_defaults
from vizstate.view_state import ViewState, axis_position

MAX_TICKS = 8
BAR_WIDTH = 0.8
DASHES = {
    "solid": None,
    "dot": "2,3",
    "dash": "6,4",
    "longdash": "10,5",
    "dashdot": "6,3,2,3",
    "longdashdot": "10,4,2,4",
}


@dataclass(frozen=True)
class RenderOptions:
    width_px: int = 700
    height_px: int = 450
    font_size_px: int = 12

    def __post_init__(self):
        if min(self.width_px, self.height_px, self.font_size_px) <= 0:
            raise ValueError("render options must be positive")


def nice_ticks(lo: float, hi: float, max_ticks: int = MAX_TICKS) -> list[float]:
    """Tick values at multiples of the smallest {1, 2, 5} x 10^k step giving at most ``max_ticks``."""
    if not hi > lo:
        return []
    k = math.floor(math.log10(hi - lo)) - 2
    while True:
        for m in (1, 2, 5):
            step = m * 10.0**k
            first = math.ceil(lo / step - 1e-9)
            last = math.floor(hi / step + 1e-9)
            if last - first + 1 <= max_ticks:
                digits = max(0, -math.floor(math.log10(step)) + 1)
                return [round(i * step, digits) + 0.0 for i in range(first, last + 1)]
        k += 1


def tick_label(value: float, ticks: list[float]) -> str:
    if len(ticks) > 1:
        step = ticks[1] - ticks[0]
        digits = max(0, -math.floor(math.log10(step) + 1e-9))
    else:
        digits = 2
    text = f"{value:.{digits}f}"
    return "0" if text.lstrip("-").strip("0.") == "" else text


def pie_wedge_angles(values) -> list[float]:
    """Sweep of each wedge in degrees, proportional to its value."""
    total = float(sum(values))
    return [360.0 * v / total for v in values]


def _n(v: float) -> str:
    text = f"{v:.2f}"
    return "0.00" if text == "-0.00" else text


def _clip_segment(p0, p1, x0, x1, y0, y1):
    """Liang-Barsky clip of a data-space segment to the view box."""
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, p0[0] - x0), (dx, x1 - p0[0]), (-dy, p0[1] - y0), (dy, y1 - p0[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return ((p0[0] + t0 * dx, p0[1] + t0 * dy), (p0[0] + t1 * dx, p0[1] + t1 * dy))


class _Frame:
    def __init__(self, opts: RenderOptions, view: ViewState, legend: bool):
        self.left = 70.0
        self.right = opts.width_px - (160.0 if legend else 20.0)
        self.top = 50.0
        self.bottom = opts.height_px - 55.0
        self.view = view

    def px(self, x: float) -> float:
        x0, x1 = self.view.x_range
        return self.left + (x - x0) / (x1 - x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        y0, y1 = self.view.y_range
        return self.bottom - (y - y0) / (y1 - y0) * (self.bottom - self.top)


def _fill(color: Color | tuple[Color, ...], i: int = 0) -> str:
    if isinstance(color, tuple):
        return color[i % len(color)].hex
    return color.hex


def _trace_label(trace: Trace, index: int) -> str:
    return trace.name if trace.name else f"trace {index}"


def render(spec: FigureSpec, view: ViewState, opts: RenderOptions = RenderOptions()) -> str:
    spec = resolve_defaults(spec)
    fs = opts.font_size_px
    legend = spec.layout.legend_visible
    out: list[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{opts.width_px}" '
        f'height="{opts.height_px}" viewBox="0 0 {opts.width_px} {opts.height_px}" '
        f'font-family="sans-serif" font-size="{fs}">',
        f'<rect width="{opts.width_px}" height="{opts.height_px}" fill="#ffffff"/>',
    ]
    frame = _Frame(opts, view, legend)
    if spec.layout.title:
        out.append(
            f'<text class="title" x="{_n(opts.width_px / 2)}" y="{_n(30)}" text-anchor="middle" '
            f'font-size="{fs + 4}">{escape(spec.layout.title)}</text>'
        )
    if spec.has_cartesian and view.x_range and view.y_range:
        out.extend(_axes(spec, view, frame, fs))
        for c, trace in enumerate(spec.traces):
            if trace.trace_type == "pie" or view.visibility[c] != "visible":
                continue
            if trace.trace_type == "scatter":
                out.extend(_scatter(spec, trace, c, frame))
            else:
                out.extend(_bars(spec, trace, c, frame))
    for c, trace in enumerate(spec.traces):
        if trace.trace_type == "pie" and view.visibility[c] == "visible":
            out.extend(_pie(trace, c, frame))
    for k, text in enumerate(a for a in spec.layout.annotations if a):
        out.append(
            f'<text class="annotation" x="{_n(frame.left + 6)}" y="{_n(frame.top + fs + 4 + k * (fs + 4))}">'
            f"{escape(text)}</text>"
        )
    if legend:
        out.extend(_legend(spec, view, frame, opts, fs))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _axis_ticks(axis, rng) -> list[tuple[float, str]]:
    lo, hi = rng
    if axis.axis_kind == "categorical":
        return [(float(i), cat) for i, cat in enumerate(axis.categories) if lo <= i <= hi]
    ticks = nice_ticks(lo, hi)
    return [(t, tick_label(t, ticks)) for t in ticks]


def _axes(spec: FigureSpec, view: ViewState, frame: _Frame, fs: int) -> list[str]:
    layout = spec.layout
    out = [
        f'<rect class="frame" x="{_n(frame.left)}" y="{_n(frame.top)}" width="{_n(frame.right - frame.left)}" '
        f'height="{_n(frame.bottom - frame.top)}" fill="#e5ecf6" stroke="#444444" stroke-width="1"/>'
    ]
    for value, label in _axis_ticks(layout.x_axis, view.x_range):
        x = frame.px(value)
        out.append(f'<line class="grid" x1="{_n(x)}" y1="{_n(frame.top)}" x2="{_n(x)}" y2="{_n(frame.bottom)}" stroke="#ffffff"/>')
        out.append(
            f'<text class="xtick" x="{_n(x)}" y="{_n(frame.bottom + fs + 6)}" text-anchor="middle">{escape(label)}</text>'
        )
    for value, label in _axis_ticks(layout.y_axis, view.y_range):
        y = frame.py(value)
        out.append(f'<line class="grid" x1="{_n(frame.left)}" y1="{_n(y)}" x2="{_n(frame.right)}" y2="{_n(y)}" stroke="#ffffff"/>')
        out.append(
            f'<text class="ytick" x="{_n(frame.left - 6)}" y="{_n(y + fs / 3)}" text-anchor="end">{escape(label)}</text>'
        )
    if layout.x_axis.title:
        out.append(
            f'<text class="xtitle" x="{_n((frame.left + frame.right) / 2)}" y="{_n(frame.bottom + 2 * fs + 16)}" '
            f'text-anchor="middle">{escape(layout.x_axis.title)}</text>'
        )
    if layout.y_axis.title:
        cx, cy = 16.0, (frame.top + frame.bottom) / 2
        out.append(
            f'<text class="ytitle" x="{_n(cx)}" y="{_n(cy)}" text-anchor="middle" '
            f'transform="rotate(-90 {_n(cx)} {_n(cy)})">{escape(layout.y_axis.title)}</text>'
        )
    return out


def _scatter(spec: FigureSpec, trace: Trace, c: int, frame: _Frame) -> list[str]:
    style = trace.style
    xs = [axis_position(spec.layout.x_axis, v) for v in trace.x]
    ys = [axis_position(spec.layout.y_axis, v) for v in trace.y]
    (x0, x1), (y0, y1) = frame.view.x_range, frame.view.y_range
    out = []
    mode = style.mode or ""
    if "lines" in mode:
        runs: list[list[tuple[float, float]]] = []
        for p0, p1 in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
            seg = _clip_segment(p0, p1, x0, x1, y0, y1)
            if seg is None:
                continue
            if runs and runs[-1][-1] == seg[0]:
                runs[-1].append(seg[1])
            else:
                runs.append([seg[0], seg[1]])
        dash = DASHES.get(style.dash)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for run in runs:
            d = " ".join(f"{'M' if k == 0 else 'L'}{_n(frame.px(x))},{_n(frame.py(y))}" for k, (x, y) in enumerate(run))
            out.append(
                f'<path class="line" data-curve="{c}" d="{d}" fill="none" stroke="{_fill(style.color)}" '
                f'stroke-width="{_n(style.width)}"{dash_attr}/>'
            )
    if "markers" in mode:
        for i, (x, y) in enumerate(zip(xs, ys)):
            if x0 <= x <= x1 and y0 <= y <= y1:
                out.append(
                    f'<circle class="point" data-curve="{c}" data-index="{i}" cx="{_n(frame.px(x))}" '
                    f'cy="{_n(frame.py(y))}" r="{_n(style.size / 2)}" fill="{_fill(style.color, i)}"/>'
                )
    return out


def _bars(spec: FigureSpec, trace: Trace, c: int, frame: _Frame) -> list[str]:
    bar_traces = [k for k, t in enumerate(spec.traces) if t.trace_type == "bar"]
    slot = bar_traces.index(c)
    width = BAR_WIDTH / len(bar_traces)
    offset = -BAR_WIDTH / 2 + slot * width
    horizontal = trace.is_horizontal
    cat_axis = spec.layout.y_axis if horizontal else spec.layout.x_axis
    (vx0, vx1), (vy0, vy1) = frame.view.x_range, frame.view.y_range
    out = []
    for i, (cat, val) in enumerate(zip(trace.category_axis(), trace.value_axis())):
        pos = axis_position(cat_axis, cat) + offset
        lo_v, hi_v = sorted((0.0, float(val)))
        if horizontal:
            bx0, bx1, by0, by1 = lo_v, hi_v, pos, pos + width
        else:
            bx0, bx1, by0, by1 = pos, pos + width, lo_v, hi_v
        bx0, bx1 = max(bx0, vx0), min(bx1, vx1)
        by0, by1 = max(by0, vy0), min(by1, vy1)
        if bx0 >= bx1 or by0 >= by1:
            continue
        left, right = frame.px(bx0), frame.px(bx1)
        top, bottom = frame.py(by1), frame.py(by0)
        out.append(
            f'<rect class="bar" data-curve="{c}" data-index="{i}" x="{_n(left)}" y="{_n(top)}" '
            f'width="{_n(right - left)}" height="{_n(bottom - top)}" fill="{_fill(trace.style.color, i)}"/>'
        )
    return out


def _pie(trace: Trace, c: int, frame: _Frame) -> list[str]:
    cx = (frame.left + frame.right) / 2
    cy = (frame.top + frame.bottom) / 2
    r = 0.45 * min(frame.right - frame.left, frame.bottom - frame.top)
    out = []
    start = 0.0
    for i, sweep in enumerate(pie_wedge_angles(trace.pie_values)):
        fill = _fill(trace.style.color, i)
        label = escape(trace.pie_labels[i])
        if sweep >= 360.0 - 1e-9:
            out.append(
                f'<circle class="wedge" data-curve="{c}" data-index="{i}" data-angle="{sweep:.3f}" '
                f'cx="{_n(cx)}" cy="{_n(cy)}" r="{_n(r)}" fill="{fill}"><title>{label}</title></circle>'
            )
        elif sweep > 0:
            # clockwise from twelve o'clock
            a0, a1 = math.radians(start), math.radians(start + sweep)
            sx, sy = cx + r * math.sin(a0), cy - r * math.cos(a0)
            ex, ey = cx + r * math.sin(a1), cy - r * math.cos(a1)
            large = 1 if sweep > 180 else 0
            out.append(
                f'<path class="wedge" data-curve="{c}" data-index="{i}" data-angle="{sweep:.3f}" '
                f'd="M{_n(cx)},{_n(cy)} L{_n(sx)},{_n(sy)} A{_n(r)},{_n(r)} 0 {large} 1 {_n(ex)},{_n(ey)} Z" '
                f'fill="{fill}" stroke="#ffffff"><title>{label}</title></path>'
            )
        start += sweep
    return out


def _legend(spec: FigureSpec, view: ViewState, frame: _Frame, opts: RenderOptions, fs: int) -> list[str]:
    entries: list[tuple[str, str, bool]] = []
    for c, trace in enumerate(spec.traces):
        shown = view.visibility[c] == "visible"
        if trace.trace_type == "pie":
            entries.extend((lab, _fill(trace.style.color, i), shown) for i, lab in enumerate(trace.pie_labels))
        elif isinstance(trace.style.color, tuple) and trace.trace_type == "bar" and not trace.name:
            cats = trace.category_axis()
            entries.extend((category_label(cat), _fill(trace.style.color, i), shown) for i, cat in enumerate(cats))
        else:
            entries.append((_trace_label(trace, c), _fill(trace.style.color), shown))
    x = opts.width_px - 150.0
    out = []
    for k, (label, fill, shown) in enumerate(entries):
        y = frame.top + k * (fs + 8)
        opacity = "" if shown else ' opacity="0.4"'
        out.append(
            f'<g class="legend-item"{opacity}><rect x="{_n(x)}" y="{_n(y)}" width="{fs}" height="{fs}" fill="{fill}"/>'
            f'<text x="{_n(x + fs + 6)}" y="{_n(y + fs - 2)}">{escape(label)}</text></g>'
        )
    return out

