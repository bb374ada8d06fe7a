import copy

import pytest

from vizstate.bench.generate import generate_figure
from vizstate.spec_model import parse_figure

FIGURE_DOCS = {
    "line_two": {
        "data": [
            {"type": "scatter", "mode": "lines", "name": "Blue", "x": [0, 1, 2, 3, 4], "y": [1, 3, 2, 5, 4]},
            {"type": "scatter", "mode": "lines", "name": "Red", "x": [0, 1, 2, 3, 4], "y": [4, 2, 3, 1, 2]},
        ],
        "layout": {"title": {"text": "Two Lines"}, "xaxis": {"title": "step"}, "yaxis": {"title": "value"}},
    },
    "dot_line_named": {
        "data": [
            {
                "type": "scatter",
                "mode": "lines+markers",
                "name": "Blue Violet",
                "x": [0, 10, 20, 30],
                "y": [5.5, 7.25, 6.0, 9.0],
                "marker": {"color": "blueviolet", "size": 8},
                "line": {"color": "blueviolet", "dash": "dash"},
            },
            {
                "type": "scatter",
                "mode": "lines+markers",
                "name": "Dark Orange",
                "x": [0, 10, 20, 30],
                "y": [8.0, 4.0, 6.5, 3.0],
                "marker": {"color": "#ff8c00"},
            },
        ],
        "layout": {"title": "Dots"},
    },
    "vbar": {
        "data": [{"type": "bar", "x": ["A", "B", "C"], "y": [3, 7, 5], "marker": {"color": ["red", "green", "blue"]}}],
        "layout": {"title": {"text": "Bars"}, "yaxis": {"title": {"text": "count"}}},
    },
    "hbar": {
        "data": [{"type": "bar", "orientation": "h", "x": [12.5, 40, 27], "y": ["North", "South", "East"]}],
        "layout": {"xaxis": {"title": "share"}},
    },
    "pie": {
        "data": [{"type": "pie", "labels": ["p", "q", "r"], "values": [1, 1, 2]}],
        "layout": {"title": "Slices"},
    },
    "markers_only": {
        "data": [
            {
                "type": "scatter",
                "mode": "markers",
                "name": "pts",
                "x": [0.1, 0.4, 0.35, 0.8, 0.95],
                "y": [10, 30, 20, 50, 40],
                "marker": {"symbol": "square", "color": "rgb(10, 120, 200)"},
            }
        ],
        "layout": {},
    },
    "ranged_legendonly": {
        "data": [
            {"type": "scatter", "name": "shown", "x": [0, 5, 10, 15, 20], "y": [0, 10, 5, 15, 10]},
            {"type": "scatter", "name": "hidden", "x": [0, 5, 10, 15, 20], "y": [3, 3, 3, 3, 3], "visible": "legendonly"},
        ],
        "layout": {"xaxis": {"range": [0, 10]}, "yaxis": {"range": [-2, 12]}, "showlegend": True},
    },
    "annotated": {
        "data": [{"type": "scatter", "mode": "lines", "name": "trend", "x": [1, 2, 3], "y": [2, 4, 8]}],
        "layout": {
            "title": {"text": "Growth"},
            "annotations": [{"text": "peak", "x": 3, "y": 8}],
            "paper_bgcolor": "white",
        },
    },
}


def _generated(chart_type, seed):
    from vizstate.spec_model import figure_to_dict

    return figure_to_dict(generate_figure(chart_type, seed))


FIGURE_DOCS["generated_line"] = _generated("line", 11)
FIGURE_DOCS["generated_pie"] = _generated("pie", 12)


@pytest.fixture
def figure_docs():
    return copy.deepcopy(FIGURE_DOCS)


@pytest.fixture(params=sorted(FIGURE_DOCS))
def fixture_name(request):
    return request.param


@pytest.fixture
def fixture_spec(fixture_name):
    return parse_figure(copy.deepcopy(FIGURE_DOCS[fixture_name]))
