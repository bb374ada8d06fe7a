"""Per-figure view state, interaction primitives, and the append-only interaction log."""

from __future__ import annotations

import copy
import itertools
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from vizstate.errors import CurveOutOfRange, InvalidRange, UnknownInteraction, UnknownPlot
from vizstate.spec_model import AxisConfig, FigureSpec, category_label

EVENT_TYPES = ("init", "relayout", "legendclick", "selected")
RANGE_KEYS = {
    "x": ("xaxis.range[0]", "xaxis.range[1]"),
    "y": ("yaxis.range[0]", "yaxis.range[1]"),
}
PAD_FRACTION = 0.05

Range = tuple[float, float]


@dataclass(frozen=True)
class ViewState:
    x_range: Range | None = None
    y_range: Range | None = None
    visibility: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "x_range": list(self.x_range) if self.x_range else None,
            "y_range": list(self.y_range) if self.y_range else None,
            "visibility": list(self.visibility),
        }


@dataclass
class InteractionEvent:
    id: int
    event_type: str
    payload: dict
    has_screenshot: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "event_type": self.event_type,
            "payload": copy.deepcopy(self.payload),
            "has_screenshot": self.has_screenshot,
        }


@dataclass(frozen=True)
class SelectionResult:
    point_count: int
    range: dict
    points: tuple[tuple[int, int, Any, Any], ...]

    def to_dict(self) -> dict:
        return {
            "point_count": self.point_count,
            "range": copy.deepcopy(self.range),
            "points": [
                {"curve_number": c, "point_index": i, "x": x, "y": y} for c, i, x, y in self.points
            ],
        }


@dataclass
class Session:
    plot_id: int
    spec: FigureSpec
    view: ViewState
    log: list[InteractionEvent] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def append(self, event_type: str, payload: dict) -> InteractionEvent:
        next_id = self.log[-1].id + 1 if self.log else 1
        event = InteractionEvent(next_id, event_type, payload)
        self.log.append(event)
        return event

    def event(self, interaction_id: int) -> InteractionEvent:
        for e in self.log:
            if e.id == interaction_id:
                return e
        raise UnknownInteraction(f"plot {self.plot_id} has no interaction {interaction_id}")


# --------------------------------------------------------------------------
# geometry helpers shared with the renderer


def axis_position(axis: AxisConfig, value: Any) -> float:
    """Data-space coordinate of a value: categories sit at their index."""
    if axis.axis_kind == "categorical":
        return float(axis.categories.index(category_label(value)))
    return float(value)


def _padded(lo: float, hi: float) -> Range:
    if hi == lo:
        return (lo - 1.0, hi + 1.0)
    pad = (hi - lo) * PAD_FRACTION
    return (lo - pad, hi + pad)


def _data_range(spec: FigureSpec, axis_name: str) -> Range | None:
    cartesian = [t for t in spec.traces if t.trace_type != "pie"]
    if not cartesian:
        return None
    axis = spec.layout.x_axis if axis_name == "x" else spec.layout.y_axis
    if axis.axis_kind == "categorical":
        return (-0.5, len(axis.categories) - 0.5)
    values: list[float] = []
    for t in cartesian:
        values.extend(float(v) for v in getattr(t, axis_name))
        if t.trace_type == "bar":
            values.append(0.0)
    return _padded(min(values), max(values))


def initial_view(spec: FigureSpec) -> ViewState:
    x = spec.layout.x_axis.range or _data_range(spec, "x")
    y = spec.layout.y_axis.range or _data_range(spec, "y")
    return ViewState(
        x_range=tuple(x) if x else None,
        y_range=tuple(y) if y else None,
        visibility=tuple(t.visible for t in spec.traces),
    )


def _range_payload(view: ViewState) -> dict:
    out: dict = {}
    for axis, rng in (("x", view.x_range), ("y", view.y_range)):
        if rng is not None:
            out[RANGE_KEYS[axis][0]] = rng[0]
            out[RANGE_KEYS[axis][1]] = rng[1]
    return out


def apply_event(view: ViewState, event: InteractionEvent) -> ViewState:
    """Advance a view by one logged event. ``selected`` never changes the view."""
    p = event.payload
    if event.event_type == "init":
        view = ViewState(visibility=tuple(p["visibility"]))
    if event.event_type in ("init", "relayout"):
        for axis in ("x", "y"):
            lo_key, hi_key = RANGE_KEYS[axis]
            if lo_key in p or hi_key in p:
                cur = getattr(view, f"{axis}_range") or (None, None)
                rng = (p.get(lo_key, cur[0]), p.get(hi_key, cur[1]))
                view = replace(view, **{f"{axis}_range": rng})
    elif event.event_type == "legendclick":
        vis = list(view.visibility)
        c = p["curve_number"]
        vis[c] = "legendonly" if vis[c] == "visible" else "visible"
        view = replace(view, visibility=tuple(vis))
    return view


def replay(log: list[InteractionEvent]) -> ViewState:
    if not log or log[0].event_type != "init":
        raise ValueError("log must start with an init event")
    view = ViewState()
    for event in log:
        view = apply_event(view, event)
    return view


def select_points(spec: FigureSpec, view: ViewState, box: tuple[Range, Range]) -> list[tuple[int, int, Any, Any]]:
    """All points of visible cartesian traces inside the closed box."""
    (x0, x1), (y0, y1) = box
    layout = spec.layout
    hits = []
    for c, trace in enumerate(spec.traces):
        if trace.trace_type == "pie" or view.visibility[c] != "visible":
            continue
        for i, (xv, yv) in enumerate(zip(trace.x, trace.y)):
            px = axis_position(layout.x_axis, xv)
            py = axis_position(layout.y_axis, yv)
            if x0 <= px <= x1 and y0 <= py <= y1:
                hits.append((c, i, xv, yv))
    return hits


def _finite_or_none(v: float) -> float | None:
    return v if math.isfinite(v) else None


# --------------------------------------------------------------------------
# engine


class Engine:
    """Registry of figure sessions.

    Distinct plots may be driven concurrently; calls on the same plot are
    serialized by the session lock.
    """

    _instances = itertools.count(1)

    def __init__(self, out_dir: str | os.PathLike | None = None):
        self._sessions: dict[int, Session] = {}
        self._next_id = 1
        self._lock = threading.Lock()
        self._out_dir = Path(out_dir) if out_dir is not None else None
        # plot ids restart at 1 per engine, so shared render roots get a per-engine folder
        self._tag = f"engine_{os.getpid()}_{next(Engine._instances)}"

    @property
    def out_dir(self) -> Path:
        if self._out_dir is not None:
            return self._out_dir
        env = os.environ.get("VIZSTATE_OUT")
        base = Path(env) if env else Path(tempfile.gettempdir()) / "vizstate"
        return base / self._tag

    def session(self, plot_id: int) -> Session:
        try:
            return self._sessions[plot_id]
        except (KeyError, TypeError):
            raise UnknownPlot(f"unknown plot_id {plot_id!r}") from None

    @property
    def plot_ids(self) -> list[int]:
        return sorted(self._sessions)

    def create_plot(self, spec: FigureSpec) -> int:
        view = initial_view(spec)
        with self._lock:
            plot_id = self._next_id
            self._next_id += 1
            session = Session(plot_id, spec, view)
            payload = _range_payload(view)
            payload["visibility"] = list(view.visibility)
            session.append("init", payload)
            self._sessions[plot_id] = session
        return plot_id

    def relayout(
        self,
        plot_id: int,
        x_min: float | None = None,
        x_max: float | None = None,
        y_min: float | None = None,
        y_max: float | None = None,
    ) -> InteractionEvent:
        s = self.session(plot_id)
        with s.lock:
            payload: dict = {}
            updates: dict = {}
            for axis, lo, hi in (("x", x_min, x_max), ("y", y_min, y_max)):
                if lo is None and hi is None:
                    continue
                cur = getattr(s.view, f"{axis}_range")
                new_lo = lo if lo is not None else (cur[0] if cur else None)
                new_hi = hi if hi is not None else (cur[1] if cur else None)
                if new_lo is None or new_hi is None or not new_lo < new_hi:
                    raise InvalidRange(f"{axis} range needs min < max, got [{new_lo}, {new_hi}]")
                updates[f"{axis}_range"] = (new_lo, new_hi)
                if lo is not None:
                    payload[RANGE_KEYS[axis][0]] = lo
                if hi is not None:
                    payload[RANGE_KEYS[axis][1]] = hi
            s.view = replace(s.view, **updates)
            return s.append("relayout", payload)

    def legendclick(self, plot_id: int, curve_number: int) -> InteractionEvent:
        s = self.session(plot_id)
        with s.lock:
            n = len(s.spec.traces)
            if isinstance(curve_number, bool) or not isinstance(curve_number, int) or not 0 <= curve_number < n:
                raise CurveOutOfRange(f"curve_number must be in [0, {n}), got {curve_number!r}")
            # expanded_index is undocumented upstream; mirror curve_number
            event = s.append("legendclick", {"curve_number": curve_number, "expanded_index": curve_number})
            s.view = apply_event(s.view, event)
            return event

    def selected(
        self,
        plot_id: int,
        x_min: float | None = None,
        x_max: float | None = None,
        y_min: float | None = None,
        y_max: float | None = None,
    ) -> SelectionResult:
        s = self.session(plot_id)
        with s.lock:
            box = []
            for lo, hi, cur in ((x_min, x_max, s.view.x_range), (y_min, y_max, s.view.y_range)):
                lo = lo if lo is not None else (cur[0] if cur else -math.inf)
                hi = hi if hi is not None else (cur[1] if cur else math.inf)
                if lo > hi:
                    raise InvalidRange(f"selection needs min <= max, got [{lo}, {hi}]")
                box.append((lo, hi))
            points = select_points(s.spec, s.view, (box[0], box[1]))
            rng = {
                "x": [_finite_or_none(box[0][0]), _finite_or_none(box[0][1])],
                "y": [_finite_or_none(box[1][0]), _finite_or_none(box[1][1])],
            }
            s.append("selected", {"point_count": len(points), "range": rng})
            return SelectionResult(len(points), rng, tuple(points))

    def query_interactions(self, plot_id: int, event_type: str | None = None) -> list[InteractionEvent]:
        s = self.session(plot_id)
        if event_type is not None and event_type not in EVENT_TYPES:
            raise ValueError(f"event_type must be one of {EVENT_TYPES}")
        with s.lock:
            return [copy.deepcopy(e) for e in s.log if event_type is None or e.event_type == event_type]

    def current_view(self, plot_id: int) -> ViewState:
        return self.session(plot_id).view

    def get_plot_json(self, plot_id: int) -> FigureSpec:
        """The figure's spec with the current axis ranges and trace visibility written in."""
        s = self.session(plot_id)
        with s.lock:
            return spec_with_view(s.spec, s.view)

    def view_at(self, plot_id: int, interaction_id: int) -> ViewState:
        s = self.session(plot_id)
        with s.lock:
            s.event(interaction_id)
            return replay([e for e in s.log if e.id <= interaction_id])

    def render_at(self, plot_id: int, interaction_id: int | None = None, opts=None) -> Path:
        from vizstate.renderer import RenderOptions, render

        s = self.session(plot_id)
        with s.lock:
            event = s.log[-1] if interaction_id is None else s.event(interaction_id)
            view = replay([e for e in s.log if e.id <= event.id])
            svg = render(s.spec, view, opts or RenderOptions())
            out = self.out_dir
            out.mkdir(parents=True, exist_ok=True)
            path = (out / f"plot_{plot_id}_evt_{event.id}.svg").resolve()
            data = svg.encode("utf-8")
            if not path.exists() or path.read_bytes() != data:
                path.write_bytes(data)
            event.has_screenshot = True
            return path


def spec_with_view(spec: FigureSpec, view: ViewState) -> FigureSpec:
    layout = spec.layout
    if view.x_range is not None:
        layout = replace(layout, x_axis=replace(layout.x_axis, range=tuple(view.x_range)))
    if view.y_range is not None:
        layout = replace(layout, y_axis=replace(layout.y_axis, range=tuple(view.y_range)))
    traces = tuple(
        t if t.visible == v else replace(t, visible=v) for t, v in zip(spec.traces, view.visibility)
    )
    return replace(spec, traces=traces, layout=layout)

