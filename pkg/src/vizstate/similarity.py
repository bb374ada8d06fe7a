"""Semantic structural similarity between a ground-truth and a predicted figure.

Traces are aligned by optimal assignment on pairwise Chamfer distance, then
four scores are computed over the matched pairs: type, data, text and style.
Every trace-level score shares the denominator ``max(|T|, |P|)`` so missing or
extra traces cost the same everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from vizstate.colors import Color, delta_e
from vizstate.errors import EmptyCloud
from vizstate.spec_model import (
    STYLE_PROPS,
    FigureSpec,
    PointCloud,
    extract_point_cloud,
    resolve_defaults,
)

DEFAULT_LAMBDA = 5.0
TEXT_ROLES = ("title", "axis", "legend", "annotations")
LAB_SPAN = 100.0


@dataclass(frozen=True)
class SimilarityConfig:
    categorical_weight: float = 1.0
    fuzzy_threshold: float = 0.8


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[int, int, float], ...]
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]

    @property
    def total_cost(self) -> float:
        return sum(d for _, _, d in self.pairs)


@dataclass
class SimilarityReport:
    s_type: float
    s_data: float
    s_text: float
    s_style: float
    lam: float
    match: MatchResult
    per_role_text: dict[str, float]
    text_weights: dict[str, float]
    per_pair_style: list[dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "s_type": self.s_type,
            "s_data": self.s_data,
            "s_text": self.s_text,
            "s_style": self.s_style,
            "lambda": self.lam,
            "pairs": [{"gt": g, "pred": p, "chamfer": d} for g, p, d in self.match.pairs],
            "unmatched": {"gt": list(self.match.unmatched_gt), "pred": list(self.match.unmatched_pred)},
            "per_role_text": dict(self.per_role_text),
            "text_weights": dict(self.text_weights),
            "per_pair_style": [dict(s) for s in self.per_pair_style],
        }


# --------------------------------------------------------------------------
# data geometry


def _tokens(values: Iterable[str]) -> frozenset[str]:
    return frozenset(tok for v in values for tok in v.lower().split())


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def pairwise_point_distance(a: PointCloud, b: PointCloud, categorical_weight: float = 1.0) -> np.ndarray:
    """Per-point distances (|a| x |b|), each clamped to 1."""
    na, nb = a.numeric, b.numeric
    both = np.vstack([na, nb])
    lo = both.min(axis=0)
    span = both.max(axis=0) - lo
    scale = np.where(span > 0, span, 1.0)
    ua = (na - lo) / scale
    ub = (nb - lo) / scale
    # zero-span dims are identical on both sides, so they already contribute 0
    diff = ua[:, None, :] - ub[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))

    if a.layout_key[1]:
        ta = [_tokens(c) for c in a.categorical]
        tb = [_tokens(c) for c in b.categorical]
        uniq_a = {t: i for i, t in enumerate(dict.fromkeys(ta))}
        uniq_b = {t: i for i, t in enumerate(dict.fromkeys(tb))}
        small = np.array([[1.0 - _jaccard(x, y) for y in uniq_b] for x in uniq_a])
        ia = np.array([uniq_a[t] for t in ta])
        ib = np.array([uniq_b[t] for t in tb])
        dist = dist + categorical_weight * small[np.ix_(ia, ib)]
    return np.minimum(dist, 1.0)


def chamfer_distance(a: PointCloud, b: PointCloud, categorical_weight: float = 1.0) -> float:
    """Symmetric Chamfer distance in [0, 1].

    Numeric dims are normalized by the combined range of both clouds; each
    categorical dim adds ``1 - Jaccard`` of its word tokens. Clouds with
    different dimensionality are maximally distant.
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyCloud("Chamfer distance needs two non-empty clouds")
    if a.layout_key != b.layout_key:
        return 1.0
    d = pairwise_point_distance(a, b, categorical_weight)
    return float(0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean()))


def match_traces(
    gt: Sequence[PointCloud], pred: Sequence[PointCloud], categorical_weight: float = 1.0
) -> MatchResult:
    """Minimum-total-Chamfer assignment; leftovers on the larger side stay unmatched."""
    cost = np.array([[chamfer_distance(g, p, categorical_weight) for p in pred] for g in gt], dtype=float)
    rows, cols = linear_sum_assignment(cost)
    pairs = tuple(sorted((int(r), int(c), float(cost[r, c])) for r, c in zip(rows, cols)))
    matched_g = {r for r, _, _ in pairs}
    matched_p = {c for _, c, _ in pairs}
    return MatchResult(
        pairs=pairs,
        unmatched_gt=tuple(i for i in range(len(gt)) if i not in matched_g),
        unmatched_pred=tuple(j for j in range(len(pred)) if j not in matched_p),
    )


def _denominator(gt: FigureSpec, pred: FigureSpec) -> int:
    return max(len(gt.traces), len(pred.traces))


def score_type(gt: FigureSpec, pred: FigureSpec, match: MatchResult) -> float:
    hits = sum(gt.traces[g].trace_type == pred.traces[p].trace_type for g, p, _ in match.pairs)
    return hits / _denominator(gt, pred)


def score_data(gt: FigureSpec, pred: FigureSpec, match: MatchResult, lam: float = DEFAULT_LAMBDA) -> float:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return sum(math.exp(-lam * d) for _, _, d in match.pairs) / _denominator(gt, pred)


# --------------------------------------------------------------------------
# text


def extract_text_buckets(spec: FigureSpec) -> dict[str, set[str]]:
    buckets: dict[str, set[str]] = {r: set() for r in TEXT_ROLES}
    layout = spec.layout
    if layout.title:
        buckets["title"].add(layout.title)
    for axis in (layout.x_axis, layout.y_axis):
        if axis.title:
            buckets["axis"].add(axis.title)
    for t in spec.traces:
        if t.name:
            buckets["legend"].add(t.name)
        if t.trace_type == "pie":
            buckets["legend"].update(lab for lab in t.pie_labels if lab)
    buckets["annotations"].update(a for a in layout.annotations if a)
    return buckets


def normalize_text(s: str) -> str:
    return " ".join(s.lower().split())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_similarity(a: str, b: str) -> float:
    a, b = normalize_text(a), normalize_text(b)
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def fuzzy_jaccard(a: set[str], b: set[str], threshold: float = 0.8) -> float:
    """Jaccard over strings where near-duplicates pair up greedily, best first."""
    left = sorted({normalize_text(s) for s in a})
    right = sorted({normalize_text(s) for s in b})
    if not left and not right:
        return 1.0
    cands = []
    for i, x in enumerate(left):
        for j, y in enumerate(right):
            sim = edit_similarity(x, y)
            if sim >= threshold:
                cands.append((-sim, i, j))
    cands.sort()
    used_l: set[int] = set()
    used_r: set[int] = set()
    for _, i, j in cands:
        if i not in used_l and j not in used_r:
            used_l.add(i)
            used_r.add(j)
    matched = len(used_l)
    return matched / (len(left) + len(right) - matched)


def score_text(
    gt_buckets: dict[str, set[str]], pred_buckets: dict[str, set[str]], threshold: float = 0.8
) -> tuple[float, dict[str, float], dict[str, float]]:
    """Role-aware text score plus the per-role similarities and weights used.

    Roles empty in the ground truth carry no weight; with no ground-truth text at
    all the score is 1.
    """
    roles = [r for r in TEXT_ROLES if gt_buckets.get(r)]
    if not roles:
        return 1.0, {}, {}
    w = 1.0 / len(roles)
    per_role = {r: fuzzy_jaccard(gt_buckets[r], pred_buckets.get(r, set()), threshold) for r in roles}
    weights = {r: w for r in roles}
    return sum(w * s for s in per_role.values()), per_role, weights


# --------------------------------------------------------------------------
# color and style


def color_similarity(c1: Color, c2: Color) -> float:
    return max(0.0, 1.0 - delta_e(c1, c2) / LAB_SPAN)


def _lab_cost(a: Sequence[Color], b: Sequence[Color]) -> np.ndarray:
    la = np.array([c.lab for c in a])
    lb = np.array([c.lab for c in b])
    return np.sqrt(((la[:, None, :] - lb[None, :, :]) ** 2).sum(axis=2))


# unit replication beyond this size falls back to an LP solve
_MAX_UNITS = 720


def color_array_distance(a: Sequence[Color], b: Sequence[Color]) -> float:
    """Exact earth mover's distance between uniform color distributions (ground cost dE*ab).

    With uniform masses the transport problem has an optimal plan on the
    ``lcm(n, m)`` unit grid, so it reduces to an assignment problem between
    replicated units.
    """
    if not a or not b:
        raise ValueError("color arrays must be non-empty")
    n, m = len(a), len(b)
    cost = _lab_cost(a, b)
    units = math.lcm(n, m)
    if units <= _MAX_UNITS:
        big = np.repeat(np.repeat(cost, units // n, axis=0), units // m, axis=1)
        rows, cols = linear_sum_assignment(big)
        return float(big[rows, cols].sum() / units)
    res = linprog(
        cost.ravel(),
        A_eq=np.vstack([np.kron(np.eye(n), np.ones(m)), np.kron(np.ones(n), np.eye(m))]),
        b_eq=np.concatenate([np.full(n, 1.0 / n), np.full(m, 1.0 / m)]),
        bounds=(0, None),
        method="highs",
    )
    return float(res.fun)


def _as_colors(c: Color | tuple[Color, ...]) -> tuple[Color, ...]:
    return c if isinstance(c, tuple) else (c,)


def style_color_similarity(a: Color | tuple[Color, ...], b: Color | tuple[Color, ...]) -> float:
    if isinstance(a, Color) and isinstance(b, Color):
        return color_similarity(a, b)
    return max(0.0, 1.0 - color_array_distance(_as_colors(a), _as_colors(b)) / LAB_SPAN)


def _numeric_similarity(a: float, b: float) -> float:
    top = max(abs(a), abs(b))
    if top == 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - abs(a - b) / top))


def pair_style_scores(t_style, p_style) -> dict[str, float]:
    out = {"color": style_color_similarity(t_style.color, p_style.color)}
    for prop in ("mode", "symbol", "dash"):
        out[prop] = 1.0 if getattr(t_style, prop) == getattr(p_style, prop) else 0.0
    for prop in ("size", "width"):
        out[prop] = _numeric_similarity(getattr(t_style, prop), getattr(p_style, prop))
    return out


def score_style(gt: FigureSpec, pred: FigureSpec, match: MatchResult) -> tuple[float, list[dict[str, float]]]:
    """Average per-property style similarity; both specs must be default-resolved."""
    per_pair = [pair_style_scores(gt.traces[g].style, pred.traces[p].style) for g, p, _ in match.pairs]
    total = sum(sum(s.values()) for s in per_pair)
    return total / (_denominator(gt, pred) * len(STYLE_PROPS)), per_pair


# --------------------------------------------------------------------------
# composite


def _clouds(spec: FigureSpec) -> list[PointCloud]:
    return [extract_point_cloud(t) for t in spec.traces]


def score_figure(
    gt: FigureSpec,
    pred: FigureSpec,
    lam: float = DEFAULT_LAMBDA,
    config: SimilarityConfig = SimilarityConfig(),
) -> SimilarityReport:
    gt = resolve_defaults(gt)
    pred = resolve_defaults(pred)
    match = match_traces(_clouds(gt), _clouds(pred), config.categorical_weight)
    s_text, per_role, weights = score_text(
        extract_text_buckets(gt), extract_text_buckets(pred), config.fuzzy_threshold
    )
    s_style, per_pair = score_style(gt, pred, match)
    return SimilarityReport(
        s_type=score_type(gt, pred, match),
        s_data=score_data(gt, pred, match, lam),
        s_text=s_text,
        s_style=s_style,
        lam=lam,
        match=match,
        per_role_text=per_role,
        text_weights=weights,
        per_pair_style=per_pair,
    )


def lambda_sweep(
    gt: FigureSpec,
    pred: FigureSpec,
    lambdas: Sequence[float] = (1, 3, 5, 7, 10),
    config: SimilarityConfig = SimilarityConfig(),
) -> dict[float, float]:
    """S_data at each lambda; the matching does not depend on lambda and is computed once."""
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambdas must be positive")
    match = match_traces(_clouds(gt), _clouds(pred), config.categorical_weight)
    return {lam: score_data(gt, pred, match, lam) for lam in lambdas}
