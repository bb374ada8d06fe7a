import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from skimage.color import rgb2lab

from vizstate.bench.generate import generate_figure
from vizstate.colors import Color, delta_e, parse_color, srgb_to_lab
from vizstate.similarity import (
    SimilarityConfig,
    chamfer_distance,
    color_array_distance,
    color_similarity,
    edit_similarity,
    extract_text_buckets,
    fuzzy_jaccard,
    lambda_sweep,
    levenshtein,
    match_traces,
    score_figure,
    score_text,
)
from vizstate.spec_model import PointCloud, figure_to_dict, parse_figure


def cloud(numeric, cats=None):
    numeric = np.asarray(numeric, dtype=float).reshape(len(numeric), -1)
    cats = tuple(tuple(c) for c in cats) if cats is not None else tuple(() for _ in range(len(numeric)))
    return PointCloud(numeric, cats)


def line(name, xs, ys, **kw):
    return {"type": "scatter", "mode": "lines", "name": name, "x": list(xs), "y": list(ys), **kw}


def spec(*traces, **layout):
    return parse_figure({"data": list(traces), "layout": layout})


# ---------------------------------------------------------------- chamfer


def test_chamfer_examples():
    assert chamfer_distance(cloud([[0, 0]]), cloud([[0, 0], [1, 1]])) == pytest.approx(0.25)
    assert chamfer_distance(cloud([[5]], [["A"]]), cloud([[5]], [["B"]])) == 1.0
    a = cloud([[1, 2], [3, 4]])
    assert chamfer_distance(a, a) == 0.0


def test_chamfer_layout_mismatch():
    assert chamfer_distance(cloud([[1, 2]]), cloud([[1]], [["x"]])) == 1.0


def brute_chamfer(a, b):
    both = np.vstack([a.numeric, b.numeric])
    lo, hi = both.min(axis=0), both.max(axis=0)

    def d(p, q):
        total = 0.0
        for k in range(len(p[0])):
            if hi[k] > lo[k]:
                total += ((p[0][k] - q[0][k]) / (hi[k] - lo[k])) ** 2
        dist = math.sqrt(total)
        for cp, cq in zip(p[1], q[1]):
            tp, tq = set(cp.lower().split()), set(cq.lower().split())
            dist += 1 - (len(tp & tq) / len(tp | tq) if tp | tq else 1)
        return min(dist, 1.0)

    pa, pb = a.points, b.points
    fwd = sum(min(d(p, q) for q in pb) for p in pa) / len(pa)
    bwd = sum(min(d(q, p) for p in pa) for q in pb) / len(pb)
    return (fwd + bwd) / 2


def test_chamfer_vs_brute_force():
    rng = np.random.default_rng(1)
    words = ["red", "dark red", "blue", "sky blue", "green"]
    for _ in range(100):
        dims = int(rng.integers(1, 3))
        with_cat = rng.random() < 0.5
        n, m = rng.integers(1, 8, size=2)
        ca = [[words[i]] for i in rng.integers(5, size=n)] if with_cat else None
        cb = [[words[i]] for i in rng.integers(5, size=m)] if with_cat else None
        a = cloud(rng.normal(size=(n, dims)), ca)
        b = cloud(rng.normal(size=(m, dims)), cb)
        assert chamfer_distance(a, b) == pytest.approx(brute_chamfer(a, b), abs=1e-12)


clouds = st.integers(1, 12).flatmap(
    lambda n: st.lists(
        st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=n, max_size=n
    )
)


@settings(max_examples=150, deadline=None)
@given(clouds, clouds)
def test_chamfer_symmetric_bounded(pa, pb):
    a, b = cloud(pa), cloud(pb)
    d = chamfer_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(chamfer_distance(b, a), abs=1e-12)
    assert chamfer_distance(a, a) == 0.0

# grid coordinates: spreads near 1e-125 vanish under a unit shift in floating point
grid = st.integers(-10_000, 10_000).map(lambda v: v / 100)
grid_clouds = st.integers(1, 12).flatmap(lambda n: st.lists(st.tuples(grid, grid), min_size=n, max_size=n))


@settings(max_examples=100, deadline=None)
@given(grid_clouds, grid_clouds, st.floats(0.01, 100), st.floats(0.01, 100), st.floats(-50, 50), st.floats(-50, 50))
def test_chamfer_affine_invariant(pa, pb, sx, sy, tx, ty):
    a, b = cloud(pa), cloud(pb)
    scale, shift = np.array([sx, sy]), np.array([tx, ty])
    a2 = PointCloud(a.numeric * scale + shift, a.categorical)
    b2 = PointCloud(b.numeric * scale + shift, b.categorical)
    assert chamfer_distance(a2, b2) == pytest.approx(chamfer_distance(a, b), abs=1e-6)


def test_chamfer_zero_iff_set_equal():
    a = cloud([[0, 0], [1, 1], [1, 1]])
    b = cloud([[1, 1], [0, 0]])
    assert chamfer_distance(a, b) == 0.0
    assert chamfer_distance(a, cloud([[0, 0], [1, 1.001]])) > 0


# ---------------------------------------------------------------- matching


def test_match_examples():
    A, B = cloud([[0, 0], [1, 0]]), cloud([[0, 10], [1, 11]])
    A2, B2 = cloud([[0, 0.1], [1, 0]]), cloud([[0, 10], [1, 10.9]])
    m = match_traces([A, B], [B2, A2])
    assert [(g, p) for g, p, _ in m.pairs] == [(0, 1), (1, 0)]
    m = match_traces([A, B, A2], [A, B])
    assert len(m.pairs) == 2 and m.unmatched_gt == (2,) and m.unmatched_pred == ()
    assert match_traces([A], [B]).pairs[0][:2] == (0, 0)


def brute_assignment(cost):
    n, m = cost.shape
    if n <= m:
        return min(sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(m), n))
    return min(sum(cost[p[j], j] for j in range(m)) for p in itertools.permutations(range(n), m))


def test_match_optimal_vs_permutations():
    rng = np.random.default_rng(2)
    for _ in range(200):
        n, m = (int(v) for v in rng.integers(1, 7, size=2))
        gt = [cloud(rng.normal(size=(int(rng.integers(1, 6)), 2))) for _ in range(n)]
        pred = [cloud(rng.normal(size=(int(rng.integers(1, 6)), 2))) for _ in range(m)]
        cost = np.array([[chamfer_distance(g, p) for p in pred] for g in gt])
        result = match_traces(gt, pred)
        assert len(result.pairs) == min(n, m)
        assert len({g for g, _, _ in result.pairs}) == len({p for _, p, _ in result.pairs}) == min(n, m)
        assert result.total_cost == pytest.approx(brute_assignment(cost), abs=1e-12)


# ---------------------------------------------------------------- type and data


def three_lines(types=("scatter",) * 3):
    traces = []
    for i, t in enumerate(types):
        traces.append({"type": t, "name": f"s{i}", "x": [0, 1, 2], "y": [i * 10, i * 10 + 1, i * 10 + 2]})
    return spec(*traces)


def test_type_scores():
    gt = three_lines()
    assert score_figure(gt, gt).s_type == 1.0
    assert score_figure(gt, three_lines(("scatter", "scatter", "bar"))).s_type == pytest.approx(2 / 3)
    two = spec(*figure_to_dict(gt)["data"][:2])
    assert score_figure(gt, two).s_type == pytest.approx(2 / 3)


def test_missing_trace_halves_scores():
    gt = spec(line("a", [0, 1], [0, 1]), line("b", [0, 1], [5, 6]))
    pred = spec(line("a", [0, 1], [0, 1]))
    r = score_figure(gt, pred)
    assert r.s_type == 0.5 and r.s_data == 0.5


def test_worst_case_lambda_anchor():
    gt = spec({"type": "bar", "x": ["A"], "y": [5]})
    pred = spec({"type": "bar", "x": ["B"], "y": [5]})
    assert score_figure(gt, pred, lam=1).s_data == pytest.approx(math.exp(-1), abs=1e-12)
    sweep = lambda_sweep(gt, pred, (1, 10))
    assert sweep[1] == pytest.approx(0.3679, abs=5e-5)
    assert sweep[10] == pytest.approx(4.54e-5, abs=1e-7)


def test_self_scores_are_one():
    for ct in ("line", "dot_line", "vbar", "hbar", "pie"):
        s = generate_figure(ct, 4)
        r = score_figure(s, s)
        assert (r.s_type, r.s_data, r.s_text, r.s_style) == (1.0, 1.0, 1.0, 1.0)


def noisy(base, amplitude, seed):
    rng = np.random.default_rng(seed)
    doc = figure_to_dict(base)
    for t in doc["data"]:
        t["y"] = [v + amplitude * rng.uniform(-1, 1) for v in t["y"]]
    return parse_figure(doc)


def test_data_decreases_with_noise():
    gt = generate_figure("line", 21)
    scores = [score_figure(gt, noisy(gt, a, 0)).s_data for a in (0.5, 2, 8, 30)]
    assert all(x > y for x, y in zip(scores, scores[1:]))


def test_lambda_monotone():
    gt = generate_figure("line", 22)
    pred = noisy(gt, 3, 1)
    sweep = lambda_sweep(gt, pred)
    values = [sweep[k] for k in (1, 3, 5, 7, 10)]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert lambda_sweep(gt, gt) == {k: 1.0 for k in (1, 3, 5, 7, 10)}
    with pytest.raises(ValueError):
        lambda_sweep(gt, gt, (0,))


def densify(doc):
    out = figure_to_dict(parse_figure(doc))
    for t in out["data"]:
        xs, ys = t["x"], t["y"]
        nx, ny = [xs[0]], [ys[0]]
        for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
            nx += [(x0 + x1) / 2, x1]
            ny += [(y0 + y1) / 2, y1]
        t["x"], t["y"] = nx, ny
    return parse_figure(out)


def dense_corpus():
    rng = np.random.default_rng(9)
    for k in range(10):
        xs = np.linspace(0, 100, int(rng.integers(100, 200)))
        traces = []
        for j in range(int(rng.integers(1, 5))):
            ys = 40 * np.sin(xs / rng.uniform(8, 30) + j) + rng.uniform(-20, 20)
            traces.append(line(f"s{j}", xs.tolist(), ys.tolist()))
        yield {"data": traces}


def test_double_density_resampling():
    for doc in dense_corpus():
        gt = parse_figure(doc)
        assert 1.0 - score_figure(gt, densify(doc)).s_data < 0.02


# ---------------------------------------------------------------- text


def test_text_buckets():
    s = spec(line("Blue", [0], [1]), line("Red", [0], [2]), title="Revenue", xaxis={"title": "year"})
    b = extract_text_buckets(s)
    assert b["title"] == {"Revenue"} and b["legend"] == {"Blue", "Red"} and b["axis"] == {"year"}
    assert b["annotations"] == set()


def test_text_examples():
    gt = {"title": {"Revenue"}, "axis": set(), "legend": {"Blue", "Red"}, "annotations": set()}
    pred = {"title": {"Revenue"}, "axis": set(), "legend": {"Blue"}, "annotations": set()}
    score, per_role, weights = score_text(gt, pred)
    assert score == pytest.approx(0.75)
    assert weights == {"title": 0.5, "legend": 0.5}
    assert score_text(gt, gt)[0] == 1.0
    wrong_place = {"title": set(), "axis": {"Revenue"}, "legend": set(), "annotations": set()}
    _, roles, _ = score_text({"title": {"Revenue"}}, wrong_place)
    assert roles["title"] == 0.0


def test_fuzzy_matching():
    assert levenshtein("kitten", "sitting") == 3
    assert edit_similarity("Revenue", "revenue") == 1.0
    assert fuzzy_jaccard({"Quarterly Revenue"}, {"Quarterly Revenu"}) == 1.0
    assert fuzzy_jaccard({"Revenue"}, {"Profit"}) == 0.0
    # greedy best-first: "blue" takes "blue" and leaves "blues" unmatched
    assert fuzzy_jaccard({"blue"}, {"blues", "blue"}) == pytest.approx(0.5)
    assert score_text({}, {"title": {"x"}})[0] == 1.0


# ---------------------------------------------------------------- color and style


def test_color_examples():
    black, white = parse_color("#000000"), parse_color("white")
    assert color_similarity(black, white) == pytest.approx(0.0, abs=1e-9)
    assert delta_e(black, white) == pytest.approx(100.0, abs=1e-4)
    red = parse_color("red")
    assert color_similarity(red, red) == 1.0
    assert color_similarity(red, white) == color_similarity(white, red)


def test_lab_matches_skimage():
    rng = np.random.default_rng(3)
    rgb = rng.integers(0, 256, size=(200, 3))
    ref = rgb2lab(rgb.reshape(1, -1, 3) / 255.0, illuminant="D65", observer="2").reshape(-1, 3)
    # the two sides use sRGB matrices published at different precision
    for c, want in zip(rgb, ref):
        assert np.allclose(srgb_to_lab(tuple(int(v) for v in c)), want, atol=1e-2)


def lp_emd(a, b):
    n, m = len(a), len(b)
    cost = np.array([[delta_e(x, y) for y in b] for x in a])
    a_eq, b_eq = [], []
    for i in range(n):
        row = np.zeros((n, m))
        row[i, :] = 1
        a_eq.append(row.ravel())
        b_eq.append(1 / n)
    for j in range(m):
        col = np.zeros((n, m))
        col[:, j] = 1
        a_eq.append(col.ravel())
        b_eq.append(1 / m)
    res = linprog(cost.ravel(), A_eq=np.array(a_eq), b_eq=b_eq, bounds=(0, None), method="highs-ds")
    return res.fun


def random_colors(rng, k):
    return [Color(*(int(v) for v in rng.integers(0, 256, size=3))) for _ in range(k)]


def test_emd_vs_lp():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = random_colors(rng, int(rng.integers(1, 6)))
        b = random_colors(rng, int(rng.integers(1, 6)))
        assert color_array_distance(a, b) == pytest.approx(lp_emd(a, b), abs=1e-6)


def test_emd_examples_and_large_fallback():
    rng = np.random.default_rng(5)
    a = random_colors(rng, 4)
    assert color_array_distance(a, a) == pytest.approx(0.0, abs=1e-12)
    assert color_array_distance(a, a[::-1]) == pytest.approx(0.0, abs=1e-12)
    assert color_array_distance(a[:1], a[1:2]) == pytest.approx(delta_e(a[0], a[1]))
    big_a, big_b = random_colors(rng, 29), random_colors(rng, 31)
    assert color_array_distance(big_a, big_b) == pytest.approx(lp_emd(big_a, big_b), abs=1e-6)


def test_style_examples():
    gt = spec(line("a", [0, 1], [0, 1], line={"dash": "solid"}))
    pred = spec(line("a", [0, 1], [0, 1], line={"dash": "dot"}))
    assert score_figure(gt, gt).s_style == 1.0
    assert score_figure(gt, pred).s_style == pytest.approx(5 / 6)
    explicit = spec(line("a", [0, 1], [0, 1], line={"width": 2}))
    assert score_figure(spec(line("a", [0, 1], [0, 1])), explicit).per_pair_style[0]["width"] == 1.0


def test_scores_in_unit_interval():
    rng = np.random.default_rng(6)
    for k in range(30):
        gt = generate_figure(["line", "vbar", "pie"][k % 3], k)
        pred = generate_figure(["line", "hbar", "pie", "dot_line"][k % 4], 1000 + k)
        r = score_figure(gt, pred, lam=float(rng.uniform(0.5, 10)))
        for v in (r.s_type, r.s_data, r.s_text, r.s_style):
            assert 0.0 <= v <= 1.0


def test_report_shape():
    gt = generate_figure("vbar", 1)
    d = score_figure(gt, gt, 5, SimilarityConfig()).to_dict()
    assert {"s_type", "s_data", "s_text", "s_style", "lambda", "pairs", "unmatched"} <= set(d)
