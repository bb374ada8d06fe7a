"""``vizstate`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from vizstate import __version__
from vizstate.errors import VizStateError
from vizstate.similarity import DEFAULT_LAMBDA, lambda_sweep, score_figure
from vizstate.spec_model import parse_figure


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_spec(path: str):
    return parse_figure(Path(path).read_bytes())


def _lambdas(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("lambdas must be positive")
    return values


def cmd_gen(args) -> int:
    from vizstate.bench.dataset import generate_dataset

    manifest = generate_dataset(args.out, args.seed, args.per_type, render_svg=not args.no_svg)
    _emit({"out": str(args.out), **manifest["totals"]}, None)
    return 0


def cmd_score(args) -> int:
    report = score_figure(_read_spec(args.gt), _read_spec(args.pred), args.lam)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_sweep(args) -> int:
    if args.dataset and args.run:
        from vizstate.evaluator import load_run, sweep_report

        table = sweep_report(args.dataset, load_run(args.run), args.lambdas)
    elif args.gt and args.pred:
        table = lambda_sweep(_read_spec(args.gt), _read_spec(args.pred), args.lambdas)
    else:
        raise SystemExit("sweep needs --gt/--pred or --dataset/--run")
    _emit([{"lambda": lam, "mean_s_data": v} for lam, v in table.items()], args.out)
    return 0


def cmd_answer(args) -> int:
    from vizstate.bench.questions import answer, find_template

    template = find_template(args.template)
    subjects = tuple(args.subjects)
    if len(subjects) != template.arity:
        raise SystemExit(f"template {template.name} takes {template.arity} subject(s)")
    result = answer(_read_spec(args.figure), template, subjects)
    _emit({"template": template.name, "subjects": list(subjects), "answer": result}, args.out)
    return 0


def cmd_serve(args) -> int:
    from vizstate.rpc import serve

    if not args.stdio:
        raise SystemExit("only --stdio transport is supported")
    return serve()


def cmd_report(args) -> int:
    from vizstate.evaluator import evaluate_run, load_run

    summary = evaluate_run(args.dataset, load_run(args.run), args.lam, args.threshold)
    _emit(summary.to_dict(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vizstate", description=__doc__)
    p.add_argument("--version", action="version", version=f"vizstate {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark dataset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--per-type", type=int, default=100)
    g.add_argument("--out", required=True)
    g.add_argument("--no-svg", action="store_true", help="skip rendering figure.svg")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("score", help="similarity of a predicted spec against ground truth")
    s.add_argument("--gt", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    s.add_argument("--out")
    s.set_defaults(func=cmd_score)

    w = sub.add_parser("sweep", help="S_data across lambda values")
    w.add_argument("--lambdas", type=_lambdas, default=[1.0, 3.0, 5.0, 7.0, 10.0])
    w.add_argument("--gt")
    w.add_argument("--pred")
    w.add_argument("--dataset")
    w.add_argument("--run")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    a = sub.add_parser("answer", help="oracle answer for one question")
    a.add_argument("--figure", required=True, help="figure spec JSON")
    a.add_argument("--template", required=True, help="template id or name")
    a.add_argument("--subjects", nargs="+", required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_answer)

    v = sub.add_parser("serve", help="run the tool server")
    v.add_argument("--stdio", action="store_true")
    v.set_defaults(func=cmd_serve)

    r = sub.add_parser("report", help="evaluate a run against a dataset")
    r.add_argument("--dataset", required=True)
    r.add_argument("--run", required=True, help="run record file or directory")
    r.add_argument("--threshold", type=float, default=0.9)
    r.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except VizStateError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
