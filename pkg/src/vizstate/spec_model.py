"""Figure specifications: parse, validate, canonicalize, resolve defaults.

The document format is the Plotly figure subset ``{"data": [...], "layout": {...}}``.
Members the model does not understand are kept verbatim in ``extra`` maps so a
parse/serialize cycle never drops them.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from vizstate.colors import DEFAULT_PALETTE, Color, parse_color
from vizstate.errors import MalformedDocument, SchemaViolation

TRACE_TYPES = ("scatter", "bar", "pie")
STYLE_PROPS = ("color", "mode", "symbol", "size", "dash", "width")

# marker for style fields that have no meaning for a trace type (e.g. bar dash)
NOT_APPLICABLE = "default"

DEFAULT_SIZE = 6
DEFAULT_WIDTH = 2
DEFAULT_DASH = "solid"
DEFAULT_SYMBOL = "circle"

_MISSING = object()


@dataclass(frozen=True)
class StyleProps:
    color: Color | tuple[Color, ...] | None = None
    mode: str | None = None
    symbol: str | None = None
    size: float | None = None
    dash: str | None = None
    width: float | None = None
    # which document member carried the color; kept for faithful serialization
    color_key: str = field(default="marker.color", compare=False)
    # names of fields filled in by resolve_defaults
    defaulted: frozenset[str] = field(default=frozenset(), compare=False)

    def is_resolved(self) -> bool:
        return all(getattr(self, p) is not None for p in STYLE_PROPS)


@dataclass(frozen=True)
class Trace:
    trace_type: str
    name: str | None = None
    x: tuple = ()
    y: tuple = ()
    pie_labels: tuple[str, ...] = ()
    pie_values: tuple[float, ...] = ()
    orientation: str | None = None
    style: StyleProps = field(default_factory=StyleProps)
    visible: str = "visible"
    extra: dict = field(default_factory=dict)

    @property
    def is_horizontal(self) -> bool:
        return self.trace_type == "bar" and self.orientation == "horizontal"

    def __len__(self) -> int:
        if self.trace_type == "pie":
            return len(self.pie_values)
        return len(self.y)

    def value_axis(self) -> tuple:
        """Numeric values of a bar trace, whichever axis carries them."""
        return self.x if self.is_horizontal else self.y

    def category_axis(self) -> tuple:
        return self.y if self.is_horizontal else self.x


@dataclass(frozen=True)
class AxisConfig:
    title: str | None = None
    range: tuple[float, float] | None = None
    axis_kind: str = "linear"
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Layout:
    title: str | None = None
    x_axis: AxisConfig = field(default_factory=AxisConfig)
    y_axis: AxisConfig = field(default_factory=AxisConfig)
    legend_visible: bool = True
    annotations: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FigureSpec:
    traces: tuple[Trace, ...]
    layout: Layout = field(default_factory=Layout)
    extra: dict = field(default_factory=dict)

    @property
    def has_cartesian(self) -> bool:
        return any(t.trace_type != "pie" for t in self.traces)


@dataclass(frozen=True)
class PointCloud:
    """Per-trace geometry: ``numeric`` is (n, k); ``categorical`` holds n tuples."""

    numeric: np.ndarray
    categorical: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.categorical)

    @property
    def points(self) -> list[tuple[tuple[float, ...], tuple[str, ...]]]:
        return [(tuple(float(v) for v in row), cats) for row, cats in zip(self.numeric, self.categorical)]

    @property
    def layout_key(self) -> tuple[int, int]:
        return (self.numeric.shape[1], len(self.categorical[0]) if self.categorical else 0)


# --------------------------------------------------------------------------
# helpers


def category_label(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _pop(obj: dict, path: str) -> Any:
    """Remove a dotted member from nested dicts, pruning parents emptied by the removal."""
    keys = path.split(".")
    parents = []
    cur: Any = obj
    for k in keys[:-1]:
        if not isinstance(cur, dict) or not isinstance(cur.get(k), dict):
            return _MISSING
        parents.append((cur, k))
        cur = cur[k]
    if not isinstance(cur, dict) or keys[-1] not in cur:
        return _MISSING
    value = cur.pop(keys[-1])
    for parent, k in reversed(parents):
        if parent[k]:
            break
        del parent[k]
    return value


def _put(obj: dict, path: str, value: Any) -> None:
    keys = path.split(".")
    cur = obj
    for k in keys[:-1]:
        cur = cur.setdefault(k, {})
    cur[keys[-1]] = value


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(extra)
    for k, v in base.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(v, out[k])
        else:
            out[k] = v
    return out


def _data_list(value: Any, what: str) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise SchemaViolation(f"{what} must be an array")
    for v in value:
        if not (isinstance(v, str) or _is_number(v)):
            raise SchemaViolation(f"{what} holds unsupported value {v!r}")
    return tuple(value)


def _numeric_list(value: Any, what: str) -> tuple:
    vals = _data_list(value, what)
    if any(isinstance(v, str) for v in vals):
        raise SchemaViolation(f"{what} must be numeric")
    return vals


def _text(value: Any, what: str) -> str:
    if isinstance(value, dict):
        value = value.get("text", "")
    if not isinstance(value, str):
        raise SchemaViolation(f"{what} must be text")
    return value


# --------------------------------------------------------------------------
# parsing


def parse_figure(document: str | bytes | dict) -> FigureSpec:
    """Parse and validate a figure document (JSON text or an already-decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            obj = json.loads(document)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedDocument(str(exc)) from None
    else:
        obj = document
    if not isinstance(obj, dict):
        raise MalformedDocument("top-level value must be an object")
    obj = copy.deepcopy(obj)

    data = obj.pop("data", _MISSING)
    if data is _MISSING:
        raise SchemaViolation("missing 'data'")
    if not isinstance(data, list):
        raise SchemaViolation("'data' must be an array")
    if not data:
        raise SchemaViolation("figure has no traces")
    layout_obj = obj.pop("layout", {})
    if not isinstance(layout_obj, dict):
        raise SchemaViolation("'layout' must be an object")

    traces = tuple(_parse_trace(t, i) for i, t in enumerate(data))
    layout = _parse_layout(layout_obj, traces)
    return FigureSpec(traces=traces, layout=layout, extra=obj)


def _parse_style(raw: dict, trace_type: str) -> StyleProps:
    kw: dict[str, Any] = {}
    color_key = "marker.colors" if trace_type == "pie" else "marker.color"
    candidates = ("marker.colors", "marker.color") if trace_type == "pie" else ("marker.color", "line.color")
    for key in candidates:
        value = _pop(raw, key)
        if value is _MISSING:
            continue
        color_key = key
        if isinstance(value, (list, tuple)):
            if not value:
                raise SchemaViolation(f"{key} must not be empty")
            kw["color"] = tuple(parse_color(v) for v in value)
        else:
            kw["color"] = parse_color(value)
        break

    for prop, key in (("mode", "mode"), ("symbol", "marker.symbol"), ("dash", "line.dash")):
        value = _get(raw, key)
        if isinstance(value, str):
            _pop(raw, key)
            kw[prop] = value
    for prop, key in (("size", "marker.size"), ("width", "line.width")):
        value = _get(raw, key)
        if _is_number(value):
            if value <= 0:
                raise SchemaViolation(f"{key} must be positive")
            _pop(raw, key)
            kw[prop] = value
    return StyleProps(color_key=color_key, **kw)


def _get(obj: dict, path: str) -> Any:
    cur: Any = obj
    for k in path.split("."):
        if not isinstance(cur, dict) or k not in cur:
            return _MISSING
        cur = cur[k]
    return cur


def _parse_trace(raw: Any, index: int) -> Trace:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"trace {index} must be an object")
    raw = dict(raw)
    trace_type = raw.pop("type", "scatter")
    if trace_type not in TRACE_TYPES:
        raise SchemaViolation(f"trace {index}: unsupported type {trace_type!r}")

    name = raw.pop("name", None)
    if name is not None and not isinstance(name, str):
        name = category_label(name) if _is_number(name) else None
        if name is None:
            raise SchemaViolation(f"trace {index}: name must be text")

    visible = raw.pop("visible", True)
    if visible is True:
        visible = "visible"
    elif visible == "legendonly":
        visible = "legendonly"
    else:
        raise SchemaViolation(f"trace {index}: bad visible value {visible!r}")

    style = _parse_style(raw, trace_type)

    if trace_type == "pie":
        labels = raw.pop("labels", _MISSING)
        values = raw.pop("values", _MISSING)
        if values is _MISSING:
            raise SchemaViolation(f"trace {index}: pie needs values")
        values = _numeric_list(values, "values")
        if labels is _MISSING:
            labels = tuple(str(i) for i in range(len(values)))
        labels = tuple(category_label(v) for v in _data_list(labels, "labels"))
        if len(labels) != len(values):
            raise SchemaViolation(f"trace {index}: labels/values length mismatch")
        if any(v < 0 for v in values):
            raise SchemaViolation(f"trace {index}: pie values must be non-negative")
        if sum(values) <= 0:
            raise SchemaViolation(f"trace {index}: pie values must sum to a positive total")
        return Trace("pie", name=name, pie_labels=labels, pie_values=values, style=style, visible=visible, extra=raw)

    orientation = None
    if trace_type == "bar":
        o = raw.pop("orientation", "v")
        if o not in ("v", "h"):
            raise SchemaViolation(f"trace {index}: bad orientation {o!r}")
        orientation = "horizontal" if o == "h" else "vertical"

    x = raw.pop("x", _MISSING)
    y = raw.pop("y", _MISSING)
    horizontal = orientation == "horizontal"
    value_key, cat_key = ("x", "y") if horizontal else ("y", "x")
    values, cats = (x, y) if horizontal else (y, x)
    if values is _MISSING:
        raise SchemaViolation(f"trace {index}: missing {value_key}")
    values = _numeric_list(values, value_key)
    if cats is _MISSING:
        cats = tuple(range(len(values)))
    cats = _data_list(cats, cat_key)
    if len(cats) != len(values):
        raise SchemaViolation(f"trace {index}: x/y length mismatch")
    if not values:
        raise SchemaViolation(f"trace {index}: no data points")
    x, y = (values, cats) if horizontal else (cats, values)
    return Trace(trace_type, name=name, x=x, y=y, orientation=orientation, style=style, visible=visible, extra=raw)


def _categories(traces: Sequence[Trace], axis: str) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for t in traces:
        if t.trace_type == "pie":
            continue
        for v in getattr(t, axis):
            seen.setdefault(category_label(v), None)
    return tuple(seen)


def _axis_is_categorical(traces: Sequence[Trace], axis: str, declared: Any) -> bool:
    if declared == "category":
        return True
    for t in traces:
        if t.trace_type == "pie":
            continue
        if t.trace_type == "bar" and (axis == "y") == t.is_horizontal:
            return True
        if any(isinstance(v, str) for v in getattr(t, axis)):
            return True
    return False


def _parse_axis(raw: dict, key: str, traces: Sequence[Trace]) -> AxisConfig:
    axis = raw.get(key)
    if axis is None:
        axis = {}
    if not isinstance(axis, dict):
        raise SchemaViolation(f"layout.{key} must be an object")
    title = _pop(raw, f"{key}.title.text")
    if title is _MISSING:
        title = _pop(raw, f"{key}.title")
        if isinstance(title, dict):
            # a title object without text; keep it opaque
            _put(raw, f"{key}.title", title)
            title = _MISSING
    title = None if title is _MISSING else _text(title, f"{key} title")
    rng = _pop(raw, f"{key}.range")
    if rng is _MISSING or rng is None:
        rng = None
    else:
        if not isinstance(rng, (list, tuple)) or len(rng) != 2 or not all(_is_number(v) for v in rng):
            raise SchemaViolation(f"layout.{key}.range must be two numbers")
        if not rng[0] < rng[1]:
            raise SchemaViolation(f"layout.{key}.range needs lower < upper")
        rng = (rng[0], rng[1])
    declared = _get(raw, f"{key}.type")
    data_axis = key[0]
    if _axis_is_categorical(traces, data_axis, declared):
        return AxisConfig(title=title, range=rng, axis_kind="categorical", categories=_categories(traces, data_axis))
    return AxisConfig(title=title, range=rng)


def _parse_layout(raw: dict, traces: Sequence[Trace]) -> Layout:
    title = _pop(raw, "title.text")
    if title is _MISSING:
        title = _pop(raw, "title")
        if isinstance(title, dict):
            _put(raw, "title", title)
            title = _MISSING
    title = None if title is _MISSING else _text(title, "title")

    x_axis = _parse_axis(raw, "xaxis", traces)
    y_axis = _parse_axis(raw, "yaxis", traces)

    legend_visible = raw.pop("showlegend", True)
    if not isinstance(legend_visible, bool):
        raise SchemaViolation("layout.showlegend must be boolean")

    texts: list[str] = []
    annotations = raw.get("annotations")
    if annotations is not None:
        if not isinstance(annotations, list) or not all(isinstance(a, dict) for a in annotations):
            raise SchemaViolation("layout.annotations must be an array of objects")
        rest = []
        for a in annotations:
            a = dict(a)
            texts.append(_text(a.pop("text", ""), "annotation text"))
            rest.append(a)
        raw["annotations"] = rest
    return Layout(
        title=title,
        x_axis=x_axis,
        y_axis=y_axis,
        legend_visible=legend_visible,
        annotations=tuple(texts),
        extra=raw,
    )


# --------------------------------------------------------------------------
# serialization


def _style_to_dict(style: StyleProps) -> dict:
    out: dict = {}
    if style.color is not None:
        if isinstance(style.color, tuple):
            _put(out, style.color_key, [c.to_json() for c in style.color])
        else:
            _put(out, style.color_key, style.color.to_json())
    for prop, key in (
        ("mode", "mode"),
        ("symbol", "marker.symbol"),
        ("size", "marker.size"),
        ("dash", "line.dash"),
        ("width", "line.width"),
    ):
        value = getattr(style, prop)
        if value is not None:
            _put(out, key, value)
    return out


def trace_to_dict(trace: Trace) -> dict:
    out: dict = {"type": trace.trace_type}
    if trace.name is not None:
        out["name"] = trace.name
    if trace.trace_type == "pie":
        out["labels"] = list(trace.pie_labels)
        out["values"] = list(trace.pie_values)
    else:
        out["x"] = list(trace.x)
        out["y"] = list(trace.y)
        if trace.is_horizontal:
            out["orientation"] = "h"
    if trace.visible == "legendonly":
        out["visible"] = "legendonly"
    out = _merge(out, _style_to_dict(trace.style))
    return _merge(out, trace.extra)


def _axis_to_dict(axis: AxisConfig) -> dict:
    out: dict = {}
    if axis.title is not None:
        out["title"] = {"text": axis.title}
    if axis.range is not None:
        out["range"] = list(axis.range)
    return out


def layout_to_dict(layout: Layout) -> dict:
    out: dict = {}
    if layout.title is not None:
        out["title"] = {"text": layout.title}
    for key, axis in (("xaxis", layout.x_axis), ("yaxis", layout.y_axis)):
        d = _axis_to_dict(axis)
        if d:
            out[key] = d
    if not layout.legend_visible:
        out["showlegend"] = False
    merged = _merge(out, {k: v for k, v in layout.extra.items() if k != "annotations"})
    if layout.annotations or "annotations" in layout.extra:
        rest = layout.extra.get("annotations", [{} for _ in layout.annotations])
        items = []
        for text, other in zip(layout.annotations, rest):
            item = copy.deepcopy(other)
            if text:
                item["text"] = text
            items.append(item)
        merged["annotations"] = items
    return merged


def figure_to_dict(spec: FigureSpec) -> dict:
    out = copy.deepcopy(spec.extra)
    out["data"] = [trace_to_dict(t) for t in spec.traces]
    out["layout"] = layout_to_dict(spec.layout)
    return out


def serialize_figure(spec: FigureSpec) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(figure_to_dict(spec), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# defaults


def default_mode(trace: Trace) -> str:
    # Plotly draws markers too on short scatter traces
    return "lines+markers" if len(trace) < 20 else "lines"


def resolve_defaults(spec: FigureSpec) -> FigureSpec:
    """Fill every unset style property with its documented default.

    Palette colors are assigned by trace index (by slice index for pie).
    Properties with no meaning for a trace type resolve to ``"default"``.
    """
    traces = []
    for i, t in enumerate(spec.traces):
        s = t.style
        filled: dict[str, Any] = {}
        if s.color is None:
            if t.trace_type == "pie":
                filled["color"] = tuple(
                    parse_color(DEFAULT_PALETTE[j % len(DEFAULT_PALETTE)]) for j in range(len(t.pie_values))
                )
            else:
                filled["color"] = parse_color(DEFAULT_PALETTE[i % len(DEFAULT_PALETTE)])
        scatter = t.trace_type == "scatter"
        if s.mode is None:
            filled["mode"] = default_mode(t) if scatter else NOT_APPLICABLE
        if s.symbol is None:
            filled["symbol"] = DEFAULT_SYMBOL if scatter else NOT_APPLICABLE
        if s.dash is None:
            filled["dash"] = DEFAULT_DASH if scatter else NOT_APPLICABLE
        if s.size is None:
            filled["size"] = DEFAULT_SIZE
        if s.width is None:
            filled["width"] = DEFAULT_WIDTH
        if filled:
            s = replace(s, defaulted=s.defaulted | frozenset(filled), **filled)
            t = replace(t, style=s)
        traces.append(t)
    return replace(spec, traces=tuple(traces))


# --------------------------------------------------------------------------
# geometry


def extract_point_cloud(trace: Trace) -> PointCloud:
    """Turn a trace into points with numeric and categorical dimensions.

    Numeric x on a scatter stays numeric; a categorical x moves to the
    categorical dims. Bars and pie slices become (value) + (category).
    """
    if trace.trace_type == "pie":
        numeric = np.asarray(trace.pie_values, dtype=float).reshape(-1, 1)
        return PointCloud(numeric, tuple((lab,) for lab in trace.pie_labels))
    if trace.trace_type == "bar":
        numeric = np.asarray(trace.value_axis(), dtype=float).reshape(-1, 1)
        return PointCloud(numeric, tuple((category_label(c),) for c in trace.category_axis()))
    if any(isinstance(v, str) for v in trace.x):
        numeric = np.asarray(trace.y, dtype=float).reshape(-1, 1)
        return PointCloud(numeric, tuple((category_label(c),) for c in trace.x))
    numeric = np.column_stack([np.asarray(trace.x, dtype=float), np.asarray(trace.y, dtype=float)])
    return PointCloud(numeric, tuple(() for _ in trace.x))
