"""Procedural figure generation.

Each figure is a pure function of ``(chart_type, seed)``. Draws that would make
an oracle answer numerically fragile (near-equal scalars, near-tangent lines,
near-equal areas or roughness at the extremes) are rejected and redrawn from
the same random stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vizstate.bench.oracles import (
    CHART_TYPES,
    Series,
    area_under_curve,
    figure_y_span,
    pointwise_gap,
    roughness,
    series_of,
    shared_domain,
)
from vizstate.bench.questions import QuestionInstance, balance_questions, enumerate_questions
from vizstate.colors import CSS_COLORS, srgb_to_lab
from vizstate.spec_model import FigureSpec, parse_figure

GENERATOR = "vizstate-bench/1"
MAX_ATTEMPTS = 10_000
# minimum relative separation between values an oracle has to tell apart
GUARD = 0.01

TITLES = (
    "Quarterly Revenue",
    "Monthly Sales",
    "Sensor Readings",
    "Survey Results",
    "Energy Usage",
    "Website Traffic",
    "Crop Yield",
    "Market Share",
)
X_TITLES = ("Time", "Day", "Distance", "Step", "Week")
Y_TITLES = ("Value", "Score", "Amount", "Level", "Count")
CATEGORY_TITLES = ("Category", "Group", "Segment")


def _color_pool() -> list[tuple[str, tuple[int, int, int]]]:
    """Named colors usable as series labels: unique RGB, not washed out."""
    seen = set()
    pool = []
    for name, r, g, b in CSS_COLORS:
        if (r, g, b) in seen or "Grey" in name:
            continue
        seen.add((r, g, b))
        if srgb_to_lab((r, g, b))[0] > 90:
            continue
        pool.append((name, (r, g, b)))
    return pool


COLOR_POOL = _color_pool()


@dataclass
class FigureCase:
    figure_id: str
    chart_type: str
    spec: FigureSpec
    seed: int
    questions: list[QuestionInstance] = field(default_factory=list)

    @property
    def yes_count(self) -> int:
        return sum(q.answer for q in self.questions)

    @property
    def no_count(self) -> int:
        return len(self.questions) - self.yes_count


def _hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _pick_colors(rng: np.random.Generator, k: int) -> list[tuple[str, str]]:
    idx = rng.choice(len(COLOR_POOL), size=k, replace=False)
    return [(COLOR_POOL[i][0], _hex(COLOR_POOL[i][1])) for i in idx]


def _separated(values, scale: float) -> bool:
    v = np.sort(np.asarray(values, dtype=float))
    return bool(np.all(np.diff(v) >= GUARD * scale))


def _extremes_separated(values, scale: float) -> bool:
    """Smallest two and largest two values differ by at least the guard."""
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) < 2:
        return True
    return v[1] - v[0] >= GUARD * scale and v[-1] - v[-2] >= GUARD * scale


def _categorical_values(rng: np.random.Generator, n: int) -> list[float]:
    for _ in range(MAX_ATTEMPTS):
        values = np.round(rng.uniform(5.0, 100.0, size=n), 2)
        if _separated(values, values.max()):
            return values.tolist()
    raise RuntimeError("could not draw separated values")


def _line_series(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    start, end = rng.uniform(10.0, 90.0, size=2)
    trend = start + (end - start) * (x - x[0]) / (x[-1] - x[0])
    step_sd = rng.uniform(1.0, 6.0)
    walk = np.clip(np.cumsum(rng.normal(0.0, step_sd, size=len(x))), -15.0, 15.0)
    return np.round(trend + walk, 2)


def lines_are_robust(series: list[Series]) -> bool:
    """True if every line-chart oracle answer is far from a decision boundary."""
    span = figure_y_span(series)
    if span <= 0:
        return False
    guard = GUARD * span
    if not _separated([s.scalar for s in series], span):
        return False
    if not _extremes_separated([min(s.y) for s in series], span):
        return False
    if not _extremes_separated([max(s.y) for s in series], span):
        return False
    rough = [roughness(s, span) for s in series]
    if not _extremes_separated(rough, max(rough)):
        return False
    lo, hi = shared_domain(series)
    aucs = [area_under_curve(s, lo, hi) for s in series]
    if not _extremes_separated(aucs, max(abs(a) for a in aucs)):
        return False
    for i in range(len(series)):
        for j in range(i + 1, len(series)):
            # no near-touch at any breakpoint: crossing is then a clean sign change
            if np.min(np.abs(pointwise_gap(series[i], series[j]))) < guard:
                return False
    return True


def _line_figure(rng: np.random.Generator, chart_type: str) -> tuple[list[dict], dict]:
    n_series = int(rng.integers(2, 8))
    n_points = int(rng.integers(5, 21))
    x = np.round(np.linspace(0.0, 100.0, n_points), 2)
    colors = _pick_colors(rng, n_series)
    for _ in range(MAX_ATTEMPTS):
        ys = [_line_series(rng, x) for _ in range(n_series)]
        series = [Series(name, float(np.mean(y)), tuple(x), tuple(y)) for (name, _), y in zip(colors, ys)]
        if lines_are_robust(series):
            break
    else:
        raise RuntimeError("could not draw robust line data")
    mode = "lines+markers" if chart_type == "dot_line" else "lines"
    traces = []
    for (name, hex_color), y in zip(colors, ys):
        trace = {"type": "scatter", "mode": mode, "name": name, "x": x.tolist(), "y": y.tolist()}
        if chart_type == "dot_line":
            trace["marker"] = {"color": hex_color}
            trace["line"] = {"color": hex_color}
        else:
            trace["line"] = {"color": hex_color}
        traces.append(trace)
    layout = {
        "xaxis": {"title": {"text": str(rng.choice(X_TITLES))}},
        "yaxis": {"title": {"text": str(rng.choice(Y_TITLES))}},
    }
    return traces, layout


def _bar_figure(rng: np.random.Generator, chart_type: str) -> tuple[list[dict], dict]:
    n = int(rng.integers(2, 8))
    colors = _pick_colors(rng, n)
    values = _categorical_values(rng, n)
    names = [c[0] for c in colors]
    trace: dict = {"type": "bar", "marker": {"color": [c[1] for c in colors]}}
    cat_title = {"title": {"text": str(rng.choice(CATEGORY_TITLES))}}
    val_title = {"title": {"text": str(rng.choice(Y_TITLES))}}
    if chart_type == "hbar":
        trace.update(x=values, y=names, orientation="h")
        layout = {"xaxis": val_title, "yaxis": cat_title}
    else:
        trace.update(x=names, y=values)
        layout = {"xaxis": cat_title, "yaxis": val_title}
    return [trace], layout


def _pie_figure(rng: np.random.Generator) -> tuple[list[dict], dict]:
    n = int(rng.integers(3, 11))
    colors = _pick_colors(rng, n)
    values = _categorical_values(rng, n)
    trace = {
        "type": "pie",
        "labels": [c[0] for c in colors],
        "values": values,
        "marker": {"colors": [c[1] for c in colors]},
    }
    return [trace], {}


def generate_figure(chart_type: str, seed: int) -> FigureSpec:
    """Ground-truth specification for one benchmark figure."""
    if chart_type not in CHART_TYPES:
        raise ValueError(f"chart_type must be one of {CHART_TYPES}")
    rng = np.random.default_rng(seed)
    title = str(rng.choice(TITLES))
    if chart_type in ("line", "dot_line"):
        traces, layout = _line_figure(rng, chart_type)
    elif chart_type in ("vbar", "hbar"):
        traces, layout = _bar_figure(rng, chart_type)
    else:
        traces, layout = _pie_figure(rng)
    layout["title"] = {"text": title}
    layout["meta"] = {"generator": GENERATOR, "chart_type": chart_type, "seed": int(seed)}
    return parse_figure({"data": traces, "layout": layout})


def figure_seed(master_seed: int, chart_type: str, index: int) -> int:
    """Stable 64-bit seed for the index-th figure of a chart type."""
    ss = np.random.SeedSequence([master_seed, CHART_TYPES.index(chart_type), index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generate_case(chart_type: str, seed: int, figure_id: str | None = None) -> FigureCase:
    spec = generate_figure(chart_type, seed)
    questions = balance_questions(enumerate_questions(spec), seed)
    return FigureCase(figure_id or f"{chart_type}_{seed:016x}", chart_type, spec, seed, questions)

