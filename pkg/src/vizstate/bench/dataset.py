"""On-disk benchmark datasets.

Layout::

    <root>/manifest.json
    <root>/<chart_type>/<figure_id>/spec.json
    <root>/<chart_type>/<figure_id>/questions.json
    <root>/<chart_type>/<figure_id>/figure.svg
"""

from __future__ import annotations

import json
from pathlib import Path

from vizstate.bench.generate import GENERATOR, FigureCase, figure_seed, generate_case
from vizstate.bench.oracles import CHART_TYPES
from vizstate.bench.questions import TEMPLATES, QuestionInstance
from vizstate.renderer import RenderOptions, render
from vizstate.spec_model import parse_figure, serialize_figure
from vizstate.view_state import initial_view


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_case(root: Path, case: FigureCase, render_svg: bool = True) -> Path:
    folder = root / case.chart_type / case.figure_id
    folder.mkdir(parents=True, exist_ok=True)
    (folder / "spec.json").write_text(serialize_figure(case.spec), encoding="utf-8")
    (folder / "questions.json").write_text(_dump([q.to_dict() for q in case.questions]), encoding="utf-8")
    if render_svg:
        svg = render(case.spec, initial_view(case.spec), RenderOptions())
        (folder / "figure.svg").write_text(svg, encoding="utf-8")
    return folder


def generate_dataset(root: str | Path, seed: int, figures_per_type: int, render_svg: bool = True) -> dict:
    """Write ``figures_per_type`` figures for every chart type and return the manifest."""
    if figures_per_type < 1:
        raise ValueError("figures_per_type must be at least 1")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    figures = []
    for chart_type in CHART_TYPES:
        for i in range(figures_per_type):
            fseed = figure_seed(seed, chart_type, i)
            case = generate_case(chart_type, fseed, figure_id=f"{chart_type}_{i:04d}")
            folder = write_case(root, case, render_svg)
            figures.append(
                {
                    "figure_id": case.figure_id,
                    "chart_type": chart_type,
                    "seed": fseed,
                    "path": folder.relative_to(root).as_posix(),
                    "n_questions": len(case.questions),
                    "n_yes": case.yes_count,
                    "n_no": case.no_count,
                }
            )
    manifest = {
        "generator": GENERATOR,
        "seed": seed,
        "figures_per_type": figures_per_type,
        "chart_types": list(CHART_TYPES),
        "templates": [t.to_dict() for t in TEMPLATES],
        "figures": figures,
        "totals": {
            "figures": len(figures),
            "questions": sum(f["n_questions"] for f in figures),
        },
    }
    (root / "manifest.json").write_text(_dump(manifest), encoding="utf-8")
    return manifest


def load_manifest(root: str | Path) -> dict:
    return json.loads((Path(root) / "manifest.json").read_text(encoding="utf-8"))


def load_case(root: str | Path, entry: dict) -> FigureCase:
    folder = Path(root) / entry["path"]
    spec = parse_figure((folder / "spec.json").read_text(encoding="utf-8"))
    questions = [
        QuestionInstance.from_dict(d) for d in json.loads((folder / "questions.json").read_text(encoding="utf-8"))
    ]
    return FigureCase(entry["figure_id"], entry["chart_type"], spec, int(entry["seed"]), questions)


def load_dataset(root: str | Path) -> list[FigureCase]:
    manifest = load_manifest(root)
    return [load_case(root, entry) for entry in manifest["figures"]]
