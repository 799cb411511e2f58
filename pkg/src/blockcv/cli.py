"""Command-line front end: ``blockcv {splits,occurrence,bibd,cv,experiment}``.

stdout carries only the requested artifact; diagnostics go to stderr.
Exit status: 0 success, 1 internal consistency failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from . import bibd, occurrence
from .cv import cv_hv, mean_candidate
from .errors import BlockCVError, NotApplicable
from .experiment import ExperimentConfig, ols_candidate, run_experiment
from .splitter import SplitConfig, hv_splits, split_at, validate_config

SEED_ENV = "BLOCKCV_SEED"


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _fmt_indices(idx: Sequence[int]) -> str:
    return " ".join(map(str, idx))


def cmd_splits(args: argparse.Namespace) -> int:
    cfg = SplitConfig(n=args.n, h=args.h, v=args.v)
    validate_config(cfg, "counting")
    splits = [split_at(cfg, args.center)] if args.center is not None else list(hv_splits(cfg))
    out = sys.stdout
    if args.format == "json":
        payload: Any = splits[0].to_dict() if args.center is not None else [s.to_dict() for s in splits]
        out.write(_dumps(payload))
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["center", "test", "gap", "train"])
        for s in splits:
            writer.writerow([s.center, _fmt_indices(s.test), _fmt_indices(s.gap), _fmt_indices(s.train)])
    else:
        out.write(f"hv-block splits n={cfg.n} h={cfg.h} v={cfg.v}: {len(splits)} split(s)\n")
        for s in splits:
            out.write(f"center {s.center:>4}  test [{_fmt_indices(s.test)}]  gap [{_fmt_indices(s.gap)}]  train [{_fmt_indices(s.train)}]\n")
    return 0


def _pretty_matrix(profile: occurrence.OccurrenceProfile) -> str:
    width = max(len(str(int(profile.lam.max()))), 1)
    return "".join(" ".join(f"{int(x):>{width}}" for x in row) + "\n" for row in profile.lam)


def cmd_occurrence(args: argparse.Namespace) -> int:
    n, v = args.n, args.v
    profiles = {}
    if args.method in ("analytic", "both"):
        profiles["analytic"] = occurrence.occurrence_matrix(n, v)
    if args.method in ("bruteforce", "both"):
        profiles["bruteforce"] = occurrence.count_bruteforce(SplitConfig(n=n, v=v))
    diff = []
    if args.method == "both":
        # the diagonal carries r, so the matrix diff covers both
        diff = profiles["analytic"].diff(profiles["bruteforce"])

    out = sys.stdout
    if args.format == "json":
        if args.method == "both":
            payload = {name: p.to_dict() for name, p in profiles.items()}
            payload["diff"] = [list(d) for d in diff]
        else:
            payload = next(iter(profiles.values())).to_dict()
        out.write(_dumps(payload))
    else:
        render = (lambda p: p.to_csv()) if args.format == "csv" else _pretty_matrix
        if args.method == "both":
            for name, p in profiles.items():
                out.write(f"{name.upper()}\n")
                out.write(render(p))
            out.write("DIFF\n")
            for i, j, a, b in diff:
                out.write(f"{i},{j},{a},{b}\n")
        else:
            out.write(render(next(iter(profiles.values()))))
    if diff:
        print(f"analytic and brute-force counts differ in {len(diff)} entries", file=sys.stderr)
        return 1
    return 0


def _parse_hv(text: str) -> tuple[int, int]:
    try:
        n, v = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'n,v', got {text!r}") from None
    return n, v


def cmd_bibd(args: argparse.Namespace) -> int:
    certificate: dict[str, Any] | None = None
    if args.hv is not None:
        n, v = args.hv
        design = bibd.hv_design(n, v)
        try:
            certificate = bibd.not_bibd_certificate(n, v).to_dict()
        except NotApplicable as exc:
            certificate = {"n": n, "v": v, "degenerate": str(exc)}
    else:
        design = bibd.parse_design(Path(args.design).read_text(encoding="utf-8"))
    report = bibd.verify_bibd(design)

    out = sys.stdout
    if args.format == "json":
        payload: dict[str, Any] = {"report": report.to_dict()}
        if certificate is not None:
            payload["certificate"] = certificate
        out.write(_dumps(payload))
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["field", "value"])
        for key in ("n", "k", "b", "r", "lambda", "is_bibd"):
            writer.writerow([key, report.to_dict()[key]])
        for viol in report.violations:
            writer.writerow(["violation", json.dumps(viol.to_dict())])
    else:
        verdict = "is a BIBD" if report.is_bibd else "is NOT a BIBD"
        out.write(f"design {verdict}\n")
        out.write(f"(n, k, b, r, lambda) = {report.params}\n")
        for name, ok in report.identities.items():
            out.write(f"  identity {name}: {'holds' if ok else 'fails'}\n")
        for viol in report.violations:
            out.write(f"  violation: {viol.to_dict()}\n")
        if certificate is not None:
            if "degenerate" in certificate:
                out.write(f"certificate: {certificate['degenerate']}\n")
            else:
                e1, e2, e3 = certificate["e1"], certificate["e2"], certificate["e3"]
                out.write(f"E1 forced (x, y) = ({e1['x']}, {e1['y']}), integral={e1['integral']}, conclusive={e1['conclusive']}\n")
                out.write(f"E2 analytic r witness {e2['r']}, lambda witness {e2['lambda']}\n")
                out.write(f"E3 brute-force r witness {e3['r']}, agrees with analytic={e3['agrees_with_analytic']}\n")
    return 0


def _read_series(path: str) -> tuple[np.ndarray, np.ndarray] | np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if data.shape[1] == 1:
        return data[:, 0]
    # leading columns are regressors, the last one is the response
    return data[:, :-1], data[:, -1]


def cmd_cv(args: argparse.Namespace) -> int:
    series = _read_series(args.series)
    n = len(series[1]) if isinstance(series, tuple) else len(series)
    cfg = SplitConfig(n=n, h=args.h, v=args.v)
    if args.model == "mean":
        cand = mean_candidate()
    else:
        if not isinstance(series, tuple):
            raise BlockCVError("--model ols needs at least one regressor column before the response")
        X, y = series
        series = (np.column_stack([np.ones(n), X]), y)
        cand = ols_candidate(range(series[0].shape[1]), name="ols")
    result = cv_hv(series, cfg, cand.evaluator(), workers=args.workers)
    print(f"n_v/n_c = {result.nv_nc_ratio:.6g}", file=sys.stderr)
    out = sys.stdout
    if args.format == "json":
        out.write(_dumps(result.to_dict()))
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["center", "loss"])
        for c, loss in zip(result.centers, result.per_split):
            writer.writerow([c, repr(loss)])
    else:
        out.write(f"CV_hv = {result.score!r} over {len(result.per_split)} splits (n={n}, h={cfg.h}, v={cfg.v})\n")
    return 0


def _resolve_seed(arg_seed: int | None, config_seed: int) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise BlockCVError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return config_seed


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = ExperimentConfig.from_dict(raw)
    else:
        config = ExperimentConfig.default()
    seed = _resolve_seed(args.seed, config.seed)
    config = ExperimentConfig(
        dgp=config.dgp,
        candidates=config.candidates,
        methods=config.methods,
        replications=args.replications or config.replications,
        seed=seed,
    )
    for m in config.methods:
        print(f"method {m.name}: h={m.h} v={m.v}", file=sys.stderr)
    table = run_experiment(config, workers=args.workers)

    out = sys.stdout
    if args.format == "json":
        payload = table.to_dict()
        payload["config"] = config.to_dict()
        out.write(_dumps(payload))
    elif args.format == "csv":
        out.write(table.to_csv())
    else:
        for method, label, count, freq in table.rows():
            out.write(f"{method:<10} {label:<24} {count:>6} {freq:.3f}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockcv", description="hv-block cross-validation and BIBD analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p: argparse.ArgumentParser, default: str = "pretty") -> None:
        p.add_argument("--format", choices=("pretty", "csv", "json"), default=default)

    p = sub.add_parser("splits", help="list hv-block train/test/gap splits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--v", type=int, default=0)
    p.add_argument("--center", type=int)
    fmt(p)
    p.set_defaults(func=cmd_splits)

    p = sub.add_parser("occurrence", help="sample/pair occurrence matrix of the test blocks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--method", choices=("analytic", "bruteforce", "both"), default="analytic")
    fmt(p, "csv")
    p.set_defaults(func=cmd_occurrence)

    p = sub.add_parser("bibd", help="verify a design, or the hv-block design, as a BIBD")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--design", metavar="FILE")
    src.add_argument("--hv", type=_parse_hv, metavar="N,V")
    fmt(p)
    p.set_defaults(func=cmd_bibd)

    p = sub.add_parser("cv", help="hv-block CV score of a series read from CSV")
    p.add_argument("--series", required=True, metavar="FILE",
                   help="CSV; one column = response only, otherwise regressors then response")
    p.add_argument("--h", type=int, default=0)
    p.add_argument("--v", type=int, default=0)
    p.add_argument("--model", choices=("mean", "ols"), default="mean")
    p.add_argument("--workers", type=int, default=1)
    fmt(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("experiment", help="Monte-Carlo selection frequencies per CV method")
    p.add_argument("--config", metavar="FILE", help="JSON experiment config")
    p.add_argument("--seed", type=int, help=f"overrides the config seed and ${SEED_ENV}")
    p.add_argument("--replications", type=int)
    p.add_argument("--workers", type=int, default=1)
    fmt(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"blockcv {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
