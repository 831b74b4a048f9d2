"""Command-line interface: gen, eval, diff, bench, report.

Exit codes: 0 success (and diff-within-tolerance), 1 comparison failure,
2 usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .api import KINDS, evaluate_kind
from .bench import (
    CSV_HEADER,
    DEFAULT_DELTA,
    DEFAULT_L,
    DEFAULT_LOSSES,
    DEFAULT_M,
    record_to_csv,
    run_grid,
    summarize,
    summary_lines,
)
from .jsonl import DataFormatError, read_jsonl, write_jsonl
from .oracle import InstanceTooLarge
from .synth import SyntheticConfig, generate, metadata

EXIT_OK = 0
EXIT_DIFF = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankbucket",
        description="Ranking-loss toolkit: generate data, evaluate losses, compare implementations, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic detection set as JSONL")
    g.add_argument("--num-logits", type=int, required=True)
    g.add_argument("--positive-pct", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--pos-mean", type=float, default=-1.0)
    g.add_argument("--pos-std", type=float, default=1.0)
    g.add_argument("--neg-mean", type=float, default=1.0)
    g.add_argument("--neg-std", type=float, default=1.0)
    g.add_argument("--out", required=True)

    e = sub.add_parser("eval", help="evaluate one loss on a JSONL file")
    e.add_argument("--loss", required=True, choices=KINDS)
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--delta", type=float, default=0.5)
    e.add_argument("--no-grads", action="store_true", help="omit gradients from the report")
    e.add_argument("--discard-trivial", action="store_true",
                   help="reference kinds only: skip negatives below every positive minus delta")

    d = sub.add_parser("diff", help="compare two loss implementations on one file")
    d.add_argument("--a", required=True, choices=KINDS)
    d.add_argument("--b", required=True, choices=KINDS)
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--delta", type=float, default=0.5)
    d.add_argument("--tol", type=float, default=1e-9)

    b = sub.add_parser("bench", help="run the timing/op-count grid, emit CSV")
    b.add_argument("--L", default=",".join(str(v) for v in DEFAULT_L),
                   help="comma-separated logit counts")
    b.add_argument("--m", default=",".join(str(v) for v in DEFAULT_M),
                   help="comma-separated positive percentages")
    b.add_argument("--losses", default=",".join(DEFAULT_LOSSES))
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    b.add_argument("--seed", type=int, default=20_240)
    b.add_argument("--out", default=None, help="CSV path (default: stdout)")
    b.add_argument("--summary-json", default=None)
    b.add_argument("--figures", default=None,
                   help="directory for rendered figures alongside the CSV")
    b.add_argument("--parallel-gen", action="store_true",
                   help="generate scenario data with a worker pool (never affects timing)")
    b.add_argument("--quiet", action="store_true")

    r = sub.add_parser("report", help="render figures and a summary from a bench CSV")
    r.add_argument("--csv", required=True)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--formats", default="png", help="comma-separated: png,svg,pdf")

    return parser


def _grad_report(result, with_grads: bool) -> dict:
    rep = {
        "loss": result.loss,
        "ranking_component": result.ranking_component,
        "sorting_component": result.sorting_component,
    }
    if with_grads:
        rep["grads"] = [float(g) for g in result.grads]
    return rep


def _cmd_gen(args) -> int:
    if args.num_logits < 1:
        print("gen: --num-logits must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = SyntheticConfig(
            num_logits=args.num_logits,
            positive_pct=args.positive_pct,
            pos_mean=args.pos_mean,
            pos_std=args.pos_std,
            neg_mean=args.neg_mean,
            neg_std=args.neg_std,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"gen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ds = generate(cfg)
    try:
        write_jsonl(args.out, ds, header=metadata(cfg))
    except OSError as exc:
        print(f"gen: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _load(path: str, delta: float):
    ds, _ = read_jsonl(path, delta=delta)
    return ds


def _cmd_eval(args) -> int:
    ds = _load(args.infile, args.delta)
    result, _ = evaluate_kind(ds, args.loss, discard_trivial=args.discard_trivial)
    print(json.dumps(_grad_report(result, not args.no_grads)))
    return EXIT_OK


def _cmd_diff(args) -> int:
    ds = _load(args.infile, args.delta)
    res_a, _ = evaluate_kind(ds, args.a)
    res_b, _ = evaluate_kind(ds, args.b)
    ga, gb = res_a.grads, res_b.grads
    abs_diff = np.abs(ga - gb)
    denom = np.maximum(np.abs(ga), np.abs(gb))
    rel = np.where(denom > 0.0, abs_diff / np.where(denom > 0.0, denom, 1.0), 0.0)
    loss_diff = abs(res_a.loss - res_b.loss)
    within = bool(
        np.isclose(res_a.loss, res_b.loss, rtol=args.tol, atol=args.tol)
        and np.allclose(ga, gb, rtol=args.tol, atol=args.tol)
    )
    print(
        json.dumps(
            {
                "a": args.a,
                "b": args.b,
                "loss_a": res_a.loss,
                "loss_b": res_b.loss,
                "loss_abs_diff": loss_diff,
                "max_abs_grad_diff": float(abs_diff.max()) if abs_diff.size else 0.0,
                "max_rel_grad_diff": float(rel.max()) if np.size(rel) else 0.0,
                "tol": args.tol,
                "within_tol": within,
            }
        )
    )
    return EXIT_OK if within else EXIT_DIFF


def _parse_list(raw: str, cast):
    try:
        vals = [cast(item) for item in raw.split(",") if item.strip() != ""]
    except ValueError:
        raise ValueError(f"cannot parse list {raw!r}")
    if not vals:
        raise ValueError("empty list")
    return vals


def _cmd_bench(args) -> int:
    try:
        sizes = _parse_list(args.L, int)
        pcts = _parse_list(args.m, float)
        losses = _parse_list(args.losses, str)
    except ValueError as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return EXIT_USAGE
    bad = [k for k in losses if k not in KINDS]
    if bad:
        print(f"bench: unknown losses {bad}", file=sys.stderr)
        return EXIT_USAGE
    progress = None if args.quiet else (lambda msg: print(f"bench: {msg}", file=sys.stderr))
    try:
        records = run_grid(
            sizes=sizes,
            pcts=pcts,
            losses=losses,
            reps=args.reps,
            delta=args.delta,
            base_seed=args.seed,
            parallel_gen=args.parallel_gen,
            progress=progress,
        )
    except ValueError as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return EXIT_USAGE

    lines = [CSV_HEADER] + [record_to_csv(r) for r in records]
    if args.out is None:
        print("\n".join(lines))
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    summary = summarize(records)
    for line in summary_lines(summary):
        print(line, file=sys.stderr)
    if args.summary_json:
        with open(args.summary_json, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    if args.figures:
        from .report import render_figures

        rows = [
            {
                "loss": r.loss_kind,
                "L": r.L,
                "m": r.m,
                "delta": r.delta,
                "seed": r.seed,
                "rep": r.rep,
                "wall_time_s": r.wall_time_s,
                "diff_ops": r.diff_ops,
                "sort_ops": r.sort_ops,
                "total_ops": r.total_ops,
                "loss_value": r.loss_value,
            }
            for r in records
        ]
        for path in render_figures(rows, args.figures):
            print(f"bench: wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import load_csv, render_figures

    try:
        rows = load_csv(args.csv)
    except (OSError, ValueError) as exc:
        print(f"report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    formats = tuple(args.formats.split(","))
    for path in render_figures(rows, args.out_dir, formats=formats):
        print(f"report: wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "gen": _cmd_gen,
        "eval": _cmd_eval,
        "diff": _cmd_diff,
        "bench": _cmd_bench,
        "report": _cmd_report,
    }[args.command]
    try:
        return handler(args)
    except DataFormatError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceTooLarge as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
