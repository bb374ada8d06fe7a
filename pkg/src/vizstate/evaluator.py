"""Aggregate benchmark run logs into accuracy, similarity and tool-usage reports.

A run is a set of per-figure records, one JSON document each::

    {
      "figure_id": "line_0003",
      "predicted_spec": {"data": [...], "layout": {...}},   # or null
      "qa_answers": [[0, true], [1, false], ...],
      "tool_calls": {"get_plot_json": 1, "relayout": 2},
      "question_tool_calls": [{"index": 0, "tool_calls": {"relayout": 1}}]   # optional
    }

``qa_answers`` entries may also be objects ``{"index": i, "answer": b}`` and
``tool_calls`` may be a list of ``[name, count]`` pairs.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from vizstate.bench.dataset import load_dataset
from vizstate.bench.generate import FigureCase
from vizstate.errors import IndexOutOfRange, MalformedDocument, UnknownFigure
from vizstate.similarity import DEFAULT_LAMBDA, lambda_sweep, score_figure
from vizstate.spec_model import FigureSpec, figure_to_dict, parse_figure

SWEEP_LAMBDAS = (1.0, 3.0, 5.0, 7.0, 10.0)


@dataclass
class RunRecord:
    figure_id: str
    predicted_spec: FigureSpec | None
    qa_answers: list[tuple[int, bool]] = field(default_factory=list)
    tool_calls: dict[str, int] = field(default_factory=dict)
    question_tool_calls: dict[int, dict[str, int]] | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        if not isinstance(d, dict) or not isinstance(d.get("figure_id"), str):
            raise MalformedDocument("run record needs a string figure_id")
        pred = d.get("predicted_spec")
        answers = []
        for item in d.get("qa_answers") or []:
            if isinstance(item, dict):
                idx, ans = item.get("index"), item.get("answer")
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                idx, ans = item
            else:
                raise MalformedDocument(f"bad qa_answers entry {item!r}")
            if not isinstance(idx, int) or isinstance(idx, bool) or not isinstance(ans, bool):
                raise MalformedDocument(f"bad qa_answers entry {item!r}")
            answers.append((idx, ans))
        per_q = None
        if d.get("question_tool_calls") is not None:
            per_q = {}
            for item in d["question_tool_calls"]:
                per_q[int(item["index"])] = _tool_counts(item.get("tool_calls"))
        return cls(
            figure_id=d["figure_id"],
            predicted_spec=None if pred is None else parse_figure(pred),
            qa_answers=answers,
            tool_calls=_tool_counts(d.get("tool_calls")),
            question_tool_calls=per_q,
        )

    def to_dict(self) -> dict:
        out = {
            "figure_id": self.figure_id,
            "predicted_spec": None if self.predicted_spec is None else figure_to_dict(self.predicted_spec),
            "qa_answers": [[i, a] for i, a in self.qa_answers],
            "tool_calls": dict(self.tool_calls),
        }
        if self.question_tool_calls is not None:
            out["question_tool_calls"] = [
                {"index": i, "tool_calls": dict(c)} for i, c in sorted(self.question_tool_calls.items())
            ]
        return out


def _tool_counts(raw) -> dict[str, int]:
    if raw is None:
        return {}
    items = raw.items() if isinstance(raw, dict) else raw
    counts: Counter = Counter()
    for name, count in items:
        if not isinstance(count, int) or count < 0:
            raise MalformedDocument(f"tool count for {name!r} must be a non-negative integer")
        counts[str(name)] += count
    return dict(counts)


def load_run(path: str | Path) -> list[RunRecord]:
    """Records from a directory of ``*.json`` files, or one file holding a record or a list."""
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    records = []
    for f in files:
        try:
            doc = json.loads(f.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"{f}: {exc.msg}") from None
        for d in doc if isinstance(doc, list) else [doc]:
            records.append(RunRecord.from_dict(d))
    return records


@dataclass
class FigureResult:
    figure_id: str
    chart_type: str
    s_type: float
    s_data: float
    s_text: float
    s_style: float
    n_questions: int
    n_correct: int

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_questions if self.n_questions else float("nan")

    def to_dict(self) -> dict:
        return {
            "figure_id": self.figure_id,
            "chart_type": self.chart_type,
            "s_type": self.s_type,
            "s_data": self.s_data,
            "s_text": self.s_text,
            "s_style": self.s_style,
            "n_questions": self.n_questions,
            "n_correct": self.n_correct,
            "accuracy": None if not self.n_questions else self.accuracy,
        }


@dataclass
class EvalSummary:
    lam: float
    threshold: float
    figures: list[FigureResult]
    question_accuracy: float | None
    per_chart_type: dict[str, float]
    per_family: dict[str, float]
    per_figure_accuracy: float | None
    conditional_accuracy: float | None
    conditional_question_accuracy: float | None
    n_conditional: int
    tool_usage: dict
    sweep: dict[float, float]

    def mean_scores(self) -> dict[str, float]:
        if not self.figures:
            return {}
        return {k: float(np.mean([getattr(f, k) for f in self.figures])) for k in ("s_type", "s_data", "s_text", "s_style")}

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "threshold": self.threshold,
            "n_figures": len(self.figures),
            "n_questions": sum(f.n_questions for f in self.figures),
            "mean_scores": self.mean_scores(),
            "question_accuracy": self.question_accuracy,
            "per_chart_type": self.per_chart_type,
            "per_family": self.per_family,
            "per_figure_accuracy": self.per_figure_accuracy,
            "conditional": {
                "accuracy": self.conditional_accuracy,
                "question_accuracy": self.conditional_question_accuracy,
                "n_figures": self.n_conditional,
            },
            "tool_usage": self.tool_usage,
            "sweep": [{"lambda": lam, "mean_s_data": v} for lam, v in self.sweep.items()],
            "figures": [f.to_dict() for f in self.figures],
        }


def _cases(dataset) -> dict[str, FigureCase]:
    if isinstance(dataset, (str, Path)):
        dataset = load_dataset(dataset)
    return {c.figure_id: c for c in dataset}


def _resolve(dataset, records: Iterable[RunRecord]) -> list[tuple[FigureCase, RunRecord]]:
    cases = _cases(dataset)
    pairs = []
    for rec in records:
        case = cases.get(rec.figure_id)
        if case is None:
            raise UnknownFigure(f"no figure {rec.figure_id!r} in the dataset")
        for idx, _ in rec.qa_answers:
            if not 0 <= idx < len(case.questions):
                raise IndexOutOfRange(
                    f"{rec.figure_id}: question index {idx} outside 0..{len(case.questions) - 1}"
                )
        if rec.question_tool_calls:
            for idx in rec.question_tool_calls:
                if not 0 <= idx < len(case.questions):
                    raise IndexOutOfRange(f"{rec.figure_id}: tool-call question index {idx} out of range")
        pairs.append((case, rec))
    return pairs


def _graded(case: FigureCase, rec: RunRecord) -> list[bool]:
    """Correctness per stored question; unanswered counts as wrong, the last answer wins."""
    given = dict(rec.qa_answers)
    return [given.get(i) is q.answer for i, q in enumerate(case.questions)]


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def _mean(values: list[float]) -> float | None:
    return float(np.mean(values)) if values else None


def tool_usage(pairs: list[tuple[FigureCase, RunRecord]]) -> dict:
    """Tool usage per figure session and per figure x question invocation."""
    n_sessions = len(pairs)
    sessions = Counter()
    totals = Counter()
    for _, rec in pairs:
        for name, count in rec.tool_calls.items():
            totals[name] += count
            if count > 0:
                sessions[name] += 1
    by_figure = {
        name: {"share": sessions[name] / n_sessions, "sessions": sessions[name], "total_calls": totals[name]}
        for name in sorted(totals)
    }
    out = {"by_figure": {"n_sessions": n_sessions, "tools": by_figure}}
    if any(rec.question_tool_calls is not None for _, rec in pairs):
        n_inv = 0
        inv = Counter()
        inv_totals = Counter()
        for case, rec in pairs:
            n_inv += len(case.questions)
            for counts in (rec.question_tool_calls or {}).values():
                for name, count in counts.items():
                    inv_totals[name] += count
                    if count > 0:
                        inv[name] += 1
        out["by_question"] = {
            "n_sessions": n_inv,
            "tools": {
                name: {
                    "share": inv[name] / n_inv if n_inv else 0.0,
                    "sessions": inv[name],
                    "total_calls": inv_totals[name],
                }
                for name in sorted(inv_totals)
            },
        }
    return out


def _scores(case: FigureCase, rec: RunRecord, lam: float) -> tuple[float, float, float, float]:
    if rec.predicted_spec is None:
        return 0.0, 0.0, 0.0, 0.0
    r = score_figure(case.spec, rec.predicted_spec, lam)
    return r.s_type, r.s_data, r.s_text, r.s_style


def evaluate_run(
    dataset,
    records: Iterable[RunRecord],
    lam: float = DEFAULT_LAMBDA,
    threshold: float = 0.9,
    lambdas: Sequence[float] = SWEEP_LAMBDAS,
) -> EvalSummary:
    """Score every record against its ground-truth figure and aggregate.

    ``dataset`` is a dataset directory or a list of :class:`FigureCase`. A record
    without a predicted spec scores 0 on every similarity component.
    """
    pairs = _resolve(dataset, records)
    figures: list[FigureResult] = []
    by_type: dict[str, list[bool]] = defaultdict(list)
    by_family: dict[str, list[bool]] = defaultdict(list)
    all_graded: list[bool] = []
    for case, rec in pairs:
        graded = _graded(case, rec)
        s_type, s_data, s_text, s_style = _scores(case, rec, lam)
        figures.append(
            FigureResult(case.figure_id, case.chart_type, s_type, s_data, s_text, s_style, len(graded), sum(graded))
        )
        all_graded += graded
        by_type[case.chart_type] += graded
        for q, ok in zip(case.questions, graded):
            by_family[q.family].append(ok)

    answered = [f for f in figures if f.n_questions]
    kept = [f for f in answered if f.s_data >= threshold]
    return EvalSummary(
        lam=lam,
        threshold=threshold,
        figures=figures,
        question_accuracy=_ratio(sum(all_graded), len(all_graded)),
        per_chart_type={k: sum(v) / len(v) for k, v in sorted(by_type.items()) if v},
        per_family={k: sum(v) / len(v) for k, v in sorted(by_family.items()) if v},
        per_figure_accuracy=_mean([f.accuracy for f in answered]),
        conditional_accuracy=_mean([f.accuracy for f in kept]),
        conditional_question_accuracy=_ratio(sum(f.n_correct for f in kept), sum(f.n_questions for f in kept)),
        n_conditional=len(kept),
        tool_usage=tool_usage(pairs),
        sweep=_sweep(pairs, lambdas),
    )


def _sweep(pairs, lambdas: Sequence[float]) -> dict[float, float]:
    if any(lam <= 0 for lam in lambdas):
        raise ValueError("lambdas must be positive")
    if not pairs:
        return {float(lam): float("nan") for lam in lambdas}
    sums = dict.fromkeys((float(lam) for lam in lambdas), 0.0)
    for case, rec in pairs:
        if rec.predicted_spec is None:
            continue
        for lam, v in lambda_sweep(case.spec, rec.predicted_spec, tuple(sums)).items():
            sums[lam] += v
    return {lam: total / len(pairs) for lam, total in sums.items()}


def sweep_report(dataset, records: Iterable[RunRecord], lambdas: Sequence[float] = SWEEP_LAMBDAS) -> dict[float, float]:
    """Mean S_data over the records at each lambda."""
    return _sweep(_resolve(dataset, records), lambdas)
