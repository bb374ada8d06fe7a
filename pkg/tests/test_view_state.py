import math

import numpy as np
import pytest

from vizstate.bench.generate import generate_figure
from vizstate.errors import CurveOutOfRange, InvalidRange, UnknownInteraction, UnknownPlot
from vizstate.spec_model import parse_figure
from vizstate.view_state import Engine, replay


def scatter3():
    return parse_figure({"data": [{"type": "scatter", "x": [1, 2, 3], "y": [1, 2, 3]}]})


def three_traces():
    return parse_figure(
        {
            "data": [
                {"type": "scatter", "name": n, "x": [0, 1, 2], "y": [i, i + 1, i + 2]}
                for i, n in enumerate(["a", "b", "c"])
            ]
        }
    )


@pytest.fixture
def engine(tmp_path):
    return Engine(tmp_path)


def test_plot_ids_and_init(engine):
    assert engine.create_plot(scatter3()) == 1
    assert engine.create_plot(scatter3()) == 2
    log = engine.query_interactions(1)
    assert [e.event_type for e in log] == ["init"]
    assert log[0].id == 1


def test_layout_range_sets_view(engine):
    pid = engine.create_plot(parse_figure({"data": [{"type": "scatter", "x": [1], "y": [1]}], "layout": {"xaxis": {"range": [0, 10]}}}))
    assert engine.current_view(pid).x_range == (0, 10)


def test_default_view_padding(engine):
    pid = engine.create_plot(scatter3())
    view = engine.current_view(pid)
    assert view.x_range == pytest.approx((0.9, 3.1))
    assert view.y_range == pytest.approx((0.9, 3.1))


def test_bar_view_includes_zero_and_categories(engine):
    pid = engine.create_plot(parse_figure({"data": [{"type": "bar", "x": ["A", "B"], "y": [5, 7]}]}))
    view = engine.current_view(pid)
    assert view.x_range == (-0.5, 1.5)
    assert view.y_range[0] < 0 < 7 < view.y_range[1]


def test_pie_has_no_axes(engine):
    pid = engine.create_plot(parse_figure({"data": [{"type": "pie", "labels": ["a"], "values": [1]}]}))
    assert engine.current_view(pid).x_range is None
    assert engine.query_interactions(pid)[0].payload == {"visibility": ["visible"]}


def test_relayout_payload_keys(engine):
    pid = engine.create_plot(scatter3())
    event = engine.relayout(pid, 1981.97, 2001.99, 70.98, 73.81)
    assert event.payload == {
        "xaxis.range[0]": 1981.97,
        "xaxis.range[1]": 2001.99,
        "yaxis.range[0]": 70.98,
        "yaxis.range[1]": 73.81,
    }
    assert list(event.payload) == ["xaxis.range[0]", "xaxis.range[1]", "yaxis.range[0]", "yaxis.range[1]"]


def test_partial_relayout(engine):
    pid = engine.create_plot(scatter3())
    y_before = engine.current_view(pid).y_range
    event = engine.relayout(pid, x_min=0, x_max=5)
    assert set(event.payload) == {"xaxis.range[0]", "xaxis.range[1]"}
    assert engine.current_view(pid).y_range == y_before
    assert engine.current_view(pid).x_range == (0, 5)


def test_degenerate_range(engine):
    pid = engine.create_plot(scatter3())
    with pytest.raises(InvalidRange):
        engine.relayout(pid, x_min=5, x_max=5)
    with pytest.raises(InvalidRange):
        engine.relayout(pid, x_min=100)
    assert len(engine.query_interactions(pid)) == 1


def test_legendclick(engine):
    pid = engine.create_plot(three_traces())
    e = engine.legendclick(pid, 1)
    assert e.payload == {"curve_number": 1, "expanded_index": 1}
    assert engine.current_view(pid).visibility == ("visible", "legendonly", "visible")
    engine.legendclick(pid, 1)
    assert engine.current_view(pid).visibility == ("visible",) * 3
    with pytest.raises(CurveOutOfRange):
        engine.legendclick(pid, 3)
    with pytest.raises(CurveOutOfRange):
        engine.legendclick(pid, -1)


def test_selected(engine):
    pid = engine.create_plot(scatter3())
    r = engine.selected(pid, 1.5, 3.5, 0, 10)
    assert r.point_count == 2 == len(r.points)
    assert r.to_dict()["range"] == {"x": [1.5, 3.5], "y": [0, 10]}
    empty = engine.selected(pid, 10, 20, 10, 20)
    assert empty.point_count == 0 and empty.points == ()
    log = engine.query_interactions(pid, "selected")
    assert log[0].payload == {"point_count": 2, "range": {"x": [1.5, 3.5], "y": [0, 10]}}


def test_selected_closed_bounds_and_inherited_view(engine):
    pid = engine.create_plot(scatter3())
    assert engine.selected(pid, 1, 3, 1, 3).point_count == 3
    engine.relayout(pid, 1.5, 2.5)
    # unspecified bounds take the current view
    assert engine.selected(pid).point_count == 1


def test_selected_skips_hidden(engine):
    pid = engine.create_plot(three_traces())
    engine.legendclick(pid, 0)
    r = engine.selected(pid, -10, 10, -10, 10)
    assert r.point_count == 6
    assert {c for c, *_ in r.points} == {1, 2}


def test_pie_never_selected(engine):
    pid = engine.create_plot(parse_figure({"data": [{"type": "pie", "labels": ["a", "b"], "values": [1, 2]}]}))
    r = engine.selected(pid, -1e9, 1e9, -1e9, 1e9)
    assert r.point_count == 0
    assert engine.selected(pid).to_dict()["range"] == {"x": [None, None], "y": [None, None]}


def test_query_filter_and_ids(engine):
    pid = engine.create_plot(three_traces())
    engine.relayout(pid, 0, 1)
    engine.legendclick(pid, 2)
    rel = engine.query_interactions(pid, "relayout")
    assert [e.event_type for e in rel] == ["relayout"]
    ids = [e.id for e in engine.query_interactions(pid)]
    assert ids == sorted(ids) == [1, 2, 3]
    with pytest.raises(ValueError):
        engine.query_interactions(pid, "zoom")


def test_get_plot_json(engine):
    spec = scatter3()
    pid = engine.create_plot(spec)
    fresh = engine.get_plot_json(pid)
    assert fresh.traces == spec.traces
    assert fresh.layout.x_axis.range == engine.current_view(pid).x_range
    engine.relayout(pid, 0, 5)
    assert engine.get_plot_json(pid).layout.x_axis.range == (0, 5)
    with pytest.raises(UnknownPlot):
        engine.get_plot_json(999)


def test_view_at(engine):
    pid = engine.create_plot(scatter3())
    init = engine.current_view(pid)
    ev = engine.relayout(pid, 0, 5)
    engine.relayout(pid, y_min=-1, y_max=1)
    assert engine.view_at(pid, 1) == init
    assert engine.view_at(pid, ev.id).x_range == (0, 5)
    assert engine.view_at(pid, ev.id).y_range == init.y_range
    last = engine.query_interactions(pid)[-1].id
    assert engine.view_at(pid, last) == engine.current_view(pid)
    with pytest.raises(UnknownInteraction):
        engine.view_at(pid, 42)


def test_sessions_isolated(engine):
    a = engine.create_plot(scatter3())
    b = engine.create_plot(scatter3())
    engine.relayout(a, 0, 1)
    assert [e.event_type for e in engine.query_interactions(b)] == ["init"]


def _positions(spec):
    """Brute-force coordinates, independent of the engine's axis model."""
    cats = {"x": [], "y": []}
    for t in spec.traces:
        for axis in ("x", "y"):
            for v in getattr(t, axis):
                if isinstance(v, str) and v not in cats[axis]:
                    cats[axis].append(v)
    out = []
    for c, t in enumerate(spec.traces):
        if t.trace_type == "pie":
            continue
        for xv, yv in zip(t.x, t.y):
            px = cats["x"].index(xv) if isinstance(xv, str) else float(xv)
            py = cats["y"].index(yv) if isinstance(yv, str) else float(yv)
            out.append((c, px, py))
    return out


def random_session(engine, spec, rng, steps):
    pid = engine.create_plot(spec)
    n = len(spec.traces)
    pts = _positions(spec)
    for _ in range(steps):
        kind = rng.integers(3)
        if kind == 0:
            lo, hi = sorted(rng.uniform(-20, 120, size=2))
            if hi > lo:
                axis = rng.integers(3)
                if axis == 0:
                    engine.relayout(pid, x_min=lo, x_max=hi)
                elif axis == 1:
                    engine.relayout(pid, y_min=lo, y_max=hi)
                else:
                    engine.relayout(pid, lo, hi, lo, hi)
        elif kind == 1:
            engine.legendclick(pid, int(rng.integers(n)))
        else:
            x0, x1 = sorted(rng.uniform(-10, 110, size=2))
            y0, y1 = sorted(rng.uniform(-10, 110, size=2))
            vis = engine.current_view(pid).visibility
            want = sum(
                1 for c, px, py in pts if vis[c] == "visible" and x0 <= px <= x1 and y0 <= py <= y1
            )
            assert engine.selected(pid, x0, x1, y0, y1).point_count == want
    return pid


@pytest.mark.parametrize("chart_type", ["line", "dot_line", "vbar", "hbar", "pie"])
def test_random_sequences(engine, chart_type):
    rng = np.random.default_rng(5)
    for k in range(40):
        spec = generate_figure(chart_type, 100 + k)
        pid = random_session(engine, spec, rng, 12)
        log = engine.query_interactions(pid)
        assert replay(log) == engine.current_view(pid)
        assert engine.get_plot_json(pid).traces[0].y == spec.traces[0].y
        assert [e.id for e in log] == list(range(1, len(log) + 1))


def test_random_boxes_vs_brute_force(engine):
    rng = np.random.default_rng(0)
    spec = generate_figure("line", 3)
    pid = engine.create_plot(spec)
    pts = _positions(spec)
    for _ in range(1000):
        x0, x1 = sorted(rng.uniform(-5, 105, size=2))
        y0, y1 = sorted(rng.uniform(0, 100, size=2))
        want = sum(1 for _, px, py in pts if x0 <= px <= x1 and y0 <= py <= y1)
        assert engine.selected(pid, x0, x1, y0, y1).point_count == want


def test_infinite_bounds_reported_as_null(engine):
    pid = engine.create_plot(parse_figure({"data": [{"type": "pie", "labels": ["a"], "values": [1]}]}))
    rng = engine.selected(pid).range
    assert rng["x"] == [None, None]
    assert not any(isinstance(v, float) and math.isinf(v) for v in rng["x"])
