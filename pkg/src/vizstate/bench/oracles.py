"""Symbolic answer oracles for the benchmark question templates.

A *series* is the unit a question talks about: a line trace, a bar category
of a single bar trace, or a pie slice. Every series reduces to one scalar for
the order-statistic and comparison templates (a line reduces to its mean y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vizstate.errors import NotApplicable, UnknownSeries
from vizstate.spec_model import FigureSpec, category_label

CHART_TYPES = ("line", "dot_line", "vbar", "hbar", "pie")
LINE_TYPES = ("line", "dot_line")


@dataclass(frozen=True)
class Series:
    name: str
    scalar: float
    x: tuple[float, ...] = ()
    y: tuple[float, ...] = ()


def chart_type_of(spec: FigureSpec) -> str:
    meta = spec.layout.extra.get("meta")
    if isinstance(meta, dict) and meta.get("chart_type") in CHART_TYPES:
        return meta["chart_type"]
    kinds = {t.trace_type for t in spec.traces}
    if kinds == {"pie"}:
        return "pie"
    if "bar" in kinds:
        bar = next(t for t in spec.traces if t.trace_type == "bar")
        return "hbar" if bar.is_horizontal else "vbar"
    modes = {t.style.mode or "" for t in spec.traces if t.trace_type == "scatter"}
    return "dot_line" if any("markers" in m for m in modes) else "line"


def series_of(spec: FigureSpec) -> list[Series]:
    kind = chart_type_of(spec)
    if kind == "pie":
        pie = next(t for t in spec.traces if t.trace_type == "pie")
        return [Series(lab, float(v)) for lab, v in zip(pie.pie_labels, pie.pie_values)]
    if kind in ("vbar", "hbar"):
        bars = [t for t in spec.traces if t.trace_type == "bar"]
        if len(bars) == 1:
            b = bars[0]
            return [Series(category_label(c), float(v)) for c, v in zip(b.category_axis(), b.value_axis())]
        return [
            Series(b.name or f"trace {i}", float(np.mean(np.asarray(b.value_axis(), dtype=float))))
            for i, b in enumerate(bars)
        ]
    out = []
    for i, t in enumerate(spec.traces):
        if t.trace_type != "scatter":
            continue
        x = tuple(float(v) for v in t.x)
        y = tuple(float(v) for v in t.y)
        out.append(Series(t.name or f"trace {i}", float(np.mean(y)), x, y))
    return out


def _index(series: list[Series], name: str) -> int:
    for i, s in enumerate(series):
        if s.name == name:
            return i
    folded = " ".join(name.lower().split())
    for i, s in enumerate(series):
        if " ".join(s.name.lower().split()) == folded:
            return i
    raise UnknownSeries(f"no series named {name!r}")


def _first_extreme(values: list[float], largest: bool) -> int:
    target = max(values) if largest else min(values)
    return values.index(target)


def _require_lines(spec: FigureSpec, template: str) -> None:
    if chart_type_of(spec) not in LINE_TYPES:
        raise NotApplicable(f"{template} applies to line charts only")


# --------------------------------------------------------------------------
# aggregation


def order_statistic_index(values: list[float], template: str) -> int:
    """Index attaining the statistic; ties go to the earliest series."""
    if template == "min":
        return _first_extreme(values, largest=False)
    if template == "max":
        return _first_extreme(values, largest=True)
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    n = len(values)
    if template == "low_median":
        return order[(n - 1) // 2]
    if template == "high_median":
        return order[n // 2]
    raise ValueError(f"unknown aggregation template {template!r}")


def oracle_aggregation(spec: FigureSpec, template: str, subject: str) -> bool:
    """Does ``subject`` attain the order statistic?

    ``lowest_value``/``highest_value`` (line charts) look at each line's
    extreme point instead of its mean.
    """
    series = series_of(spec)
    idx = _index(series, subject)
    if template in ("lowest_value", "highest_value"):
        _require_lines(spec, template)
        if template == "lowest_value":
            return _first_extreme([min(s.y) for s in series], largest=False) == idx
        return _first_extreme([max(s.y) for s in series], largest=True) == idx
    return order_statistic_index([s.scalar for s in series], template) == idx


# --------------------------------------------------------------------------
# comparison


def _pair(spec: FigureSpec, a: str, b: str) -> tuple[list[Series], int, int]:
    series = series_of(spec)
    ia, ib = _index(series, a), _index(series, b)
    if ia == ib:
        raise NotApplicable("comparison needs two distinct series")
    return series, ia, ib


def oracle_comparison(spec: FigureSpec, template: str, a: str, b: str) -> bool:
    """Strict ordering of two series.

    ``less``/``greater`` compare scalar reductions; ``strictly_less`` and
    ``strictly_greater`` (line charts) require the ordering at every x of the
    shared domain.
    """
    series, ia, ib = _pair(spec, a, b)
    if template == "less":
        return series[ia].scalar < series[ib].scalar
    if template == "greater":
        return series[ia].scalar > series[ib].scalar
    if template in ("strictly_less", "strictly_greater"):
        _require_lines(spec, template)
        gap = pointwise_gap(series[ia], series[ib])
        if gap.size == 0:
            return False
        return bool(np.all(gap < 0)) if template == "strictly_less" else bool(np.all(gap > 0))
    raise ValueError(f"unknown comparison template {template!r}")


def pointwise_gap(a: Series, b: Series) -> np.ndarray:
    """a - b at every breakpoint of either polyline inside the shared x domain.

    Both curves are piecewise linear, so the sign pattern at these points
    decides strict ordering over the whole domain.
    """
    lo = max(min(a.x), min(b.x))
    hi = min(max(a.x), max(b.x))
    if lo > hi:
        return np.array([])
    xs = np.unique(np.concatenate([a.x, b.x, [lo, hi]]))
    xs = xs[(xs >= lo) & (xs <= hi)]
    return _interp(a, xs) - _interp(b, xs)


def _interp(s: Series, xs: np.ndarray) -> np.ndarray:
    order = np.argsort(s.x, kind="stable")
    return np.interp(xs, np.asarray(s.x)[order], np.asarray(s.y)[order])


# --------------------------------------------------------------------------
# topology


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p, q, r) -> bool:
    """r collinear with p-q lies within its bounding box."""
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection, touching and collinear overlap included."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    return (
        (d1 == 0 and _on_segment(q1, q2, p1))
        or (d2 == 0 and _on_segment(q1, q2, p2))
        or (d3 == 0 and _on_segment(p1, p2, q1))
        or (d4 == 0 and _on_segment(p1, p2, q2))
    )


def _segments(points: list) -> list:
    return list(zip(points, points[1:])) or [(points[0], points[0])]


def polylines_intersect(a: Series, b: Series) -> bool:
    segs_a = _segments(list(zip(a.x, a.y)))
    segs_b = _segments(list(zip(b.x, b.y)))
    for p1, p2 in segs_a:
        for q1, q2 in segs_b:
            # bounding boxes first; most pairs are far apart
            if max(p1[0], p2[0]) < min(q1[0], q2[0]) or max(q1[0], q2[0]) < min(p1[0], p2[0]):
                continue
            if max(p1[1], p2[1]) < min(q1[1], q2[1]) or max(q1[1], q2[1]) < min(p1[1], p2[1]):
                continue
            if segments_intersect(p1, p2, q1, q2):
                return True
    return False


def figure_y_span(series: list[Series]) -> float:
    ys = [v for s in series for v in s.y]
    return max(ys) - min(ys) if ys else 0.0


def roughness(s: Series, y_span: float) -> float:
    """Mean absolute second difference of y, scaled by the figure's y span."""
    if len(s.y) < 3 or y_span <= 0:
        return 0.0
    return float(np.mean(np.abs(np.diff(np.asarray(s.y), n=2)))) / y_span


def shared_domain(series: list[Series]) -> tuple[float, float]:
    return max(min(s.x) for s in series), min(max(s.x) for s in series)


def area_under_curve(s: Series, lo: float, hi: float) -> float:
    """Trapezoidal integral of the polyline over [lo, hi]."""
    if hi <= lo:
        return 0.0
    order = np.argsort(s.x, kind="stable")
    x = np.asarray(s.x)[order]
    y = np.asarray(s.y)[order]
    inner = x[(x > lo) & (x < hi)]
    xs = np.concatenate([[lo], inner, [hi]])
    ys = np.interp(xs, x, y)
    return float(np.sum((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1]) / 2.0))


def _strict_extreme(values: list[float], idx: int, largest: bool) -> bool:
    mine = values[idx]
    others = values[:idx] + values[idx + 1 :]
    if largest:
        return all(mine > v for v in others)
    return all(mine < v for v in others)


def oracle_topology(spec: FigureSpec, template: str, subjects: list[str] | tuple[str, ...]) -> bool:
    _require_lines(spec, template)
    series = series_of(spec)
    if template == "intersect":
        if len(subjects) != 2:
            raise NotApplicable("intersect needs two subjects")
        _, ia, ib = _pair(spec, subjects[0], subjects[1])
        return polylines_intersect(series[ia], series[ib])
    if len(subjects) != 1:
        raise NotApplicable(f"{template} needs one subject")
    idx = _index(series, subjects[0])
    if template in ("smoothest", "roughest"):
        span = figure_y_span(series)
        values = [roughness(s, span) for s in series]
        return _strict_extreme(values, idx, largest=template == "roughest")
    if template in ("auc_min", "auc_max"):
        lo, hi = shared_domain(series)
        values = [area_under_curve(s, lo, hi) for s in series]
        return _strict_extreme(values, idx, largest=template == "auc_max")
    raise ValueError(f"unknown topology template {template!r}")
