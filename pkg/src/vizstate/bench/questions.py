"""Question templates, instantiation over a figure, and yes/no balancing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from vizstate.bench.oracles import (
    LINE_TYPES,
    chart_type_of,
    oracle_aggregation,
    oracle_comparison,
    oracle_topology,
    series_of,
)
from vizstate.spec_model import FigureSpec


@dataclass(frozen=True)
class Template:
    template_id: int
    name: str
    family: str
    oracle: str
    arity: int
    text: str
    line_only: bool = False
    ordered: bool = True

    def to_dict(self) -> dict:
        return {
            "template_id": self.template_id,
            "name": self.name,
            "family": self.family,
            "arity": self.arity,
            "text": self.text,
            "chart_types": list(LINE_TYPES) if self.line_only else ["line", "dot_line", "vbar", "hbar", "pie"],
        }


TEMPLATES: tuple[Template, ...] = (
    Template(1, "is_min", "aggregation", "min", 1, "Is {0} the minimum?"),
    Template(2, "is_max", "aggregation", "max", 1, "Is {0} the maximum?"),
    Template(3, "is_low_median", "aggregation", "low_median", 1, "Is {0} the low median?"),
    Template(4, "is_high_median", "aggregation", "high_median", 1, "Is {0} the high median?"),
    Template(5, "is_less", "comparison", "less", 2, "Is {0} less than {1}?"),
    Template(6, "is_greater", "comparison", "greater", 2, "Is {0} greater than {1}?"),
    Template(7, "intersects", "topology", "intersect", 2, "Does {0} intersect {1}?", line_only=True, ordered=False),
    Template(8, "is_smoothest", "topology", "smoothest", 1, "Is {0} the smoothest?", line_only=True),
    Template(9, "is_roughest", "topology", "roughest", 1, "Is {0} the roughest?", line_only=True),
    Template(
        10, "has_min_auc", "topology", "auc_min", 1, "Does {0} have the minimum area under the curve?", line_only=True
    ),
    Template(
        11, "has_max_auc", "topology", "auc_max", 1, "Does {0} have the maximum area under the curve?", line_only=True
    ),
    Template(12, "has_lowest_value", "aggregation", "lowest_value", 1, "Does {0} have the lowest value?", line_only=True),
    Template(
        13, "has_highest_value", "aggregation", "highest_value", 1, "Does {0} have the highest value?", line_only=True
    ),
    Template(14, "is_strictly_less", "comparison", "strictly_less", 2, "Is {0} strictly less than {1}?", line_only=True),
    Template(
        15, "is_strictly_greater", "comparison", "strictly_greater", 2, "Is {0} strictly greater than {1}?", line_only=True
    ),
)

TEMPLATES_BY_ID = {t.template_id: t for t in TEMPLATES}
TEMPLATES_BY_NAME = {t.name: t for t in TEMPLATES}
FAMILIES = ("aggregation", "comparison", "topology")


@dataclass(frozen=True)
class QuestionInstance:
    template_id: int
    family: str
    text: str
    subjects: tuple[str, ...]
    answer: bool
    metadata: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = {
            "template_id": self.template_id,
            "family": self.family,
            "text": self.text,
            "subjects": list(self.subjects),
            "answer": self.answer,
        }
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "QuestionInstance":
        return cls(
            template_id=int(d["template_id"]),
            family=d["family"],
            text=d["text"],
            subjects=tuple(d["subjects"]),
            answer=bool(d["answer"]),
            metadata=dict(d.get("metadata", {})),
        )


def find_template(key: int | str) -> Template:
    if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
        return TEMPLATES_BY_ID[int(key)]
    if key in TEMPLATES_BY_NAME:
        return TEMPLATES_BY_NAME[key]
    for t in TEMPLATES:
        if t.oracle == key:
            return t
    raise KeyError(f"unknown template {key!r}")


def answer(spec: FigureSpec, template: Template, subjects: tuple[str, ...] | list[str]) -> bool:
    if template.family == "aggregation":
        return oracle_aggregation(spec, template.oracle, subjects[0])
    if template.family == "comparison":
        return oracle_comparison(spec, template.oracle, subjects[0], subjects[1])
    return oracle_topology(spec, template.oracle, list(subjects))


def _subject_tuples(names: list[str], template: Template):
    if template.arity == 1:
        return [(n,) for n in names]
    if template.ordered:
        return list(itertools.permutations(names, 2))
    return list(itertools.combinations(names, 2))


def enumerate_questions(spec: FigureSpec) -> list[QuestionInstance]:
    """Every applicable template x subject instantiation, with its oracle answer."""
    kind = chart_type_of(spec)
    names = [s.name for s in series_of(spec)]
    reduction = "mean" if kind in LINE_TYPES else "value"
    out = []
    for template in TEMPLATES:
        if template.line_only and kind not in LINE_TYPES:
            continue
        meta = {"template": template.name}
        if template.oracle in ("min", "max", "low_median", "high_median", "less", "greater"):
            meta["reduction"] = reduction
        for subjects in _subject_tuples(names, template):
            out.append(
                QuestionInstance(
                    template_id=template.template_id,
                    family=template.family,
                    text=template.text.format(*subjects),
                    subjects=subjects,
                    answer=answer(spec, template, subjects),
                    metadata=meta,
                )
            )
    return out


def balance_questions(instances: list[QuestionInstance], seed: int) -> list[QuestionInstance]:
    """Largest subset with equal yes and no counts.

    The majority class is down-sampled uniformly at random; survivors keep
    their original order.
    """
    yes = [i for i, q in enumerate(instances) if q.answer]
    no = [i for i, q in enumerate(instances) if not q.answer]
    k = min(len(yes), len(no))
    rng = np.random.default_rng(seed)
    if len(yes) > k:
        yes = sorted(rng.choice(yes, size=k, replace=False).tolist())
    if len(no) > k:
        no = sorted(rng.choice(no, size=k, replace=False).tolist())
    keep = sorted(yes + no)
    return [instances[i] for i in keep]
