"""Procedural chart-QA benchmark: figures, question templates, oracles, datasets."""

from vizstate.bench.dataset import generate_dataset, load_dataset
from vizstate.bench.generate import FigureCase, generate_case, generate_figure
from vizstate.bench.oracles import oracle_aggregation, oracle_comparison, oracle_topology
from vizstate.bench.questions import TEMPLATES, QuestionInstance, balance_questions, enumerate_questions

__all__ = [
    "TEMPLATES",
    "FigureCase",
    "QuestionInstance",
    "balance_questions",
    "enumerate_questions",
    "generate_case",
    "generate_dataset",
    "generate_figure",
    "load_dataset",
    "oracle_aggregation",
    "oracle_comparison",
    "oracle_topology",
]
