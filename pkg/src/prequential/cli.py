"""Command line interface.

Exit codes: 0 success, 1 I/O failure, 2 usage or validation error.

    prequential simulate   --phi 0.5 --var 1 --n 101 --seed 7 --out x.txt
    prequential score      --series x.txt --p-phi 0.5 --p-var 1 --q-phi 0.1 --q-var 4
    prequential experiment --paper-defaults --contaminate 50:+7 --seed 1 --out-dir out/
    prequential linearity  --p-phi 0.5 --p-var 1 --q-phi 0.1 --q-var 4 --empirical
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys

from . import __version__
from .exceptions import (
    ConfigError,
    DegenerateInputError,
    PrequentialError,
    ReplicationError,
)
from .experiment import (
    Contamination,
    ExperimentConfig,
    outcome_category,
    paper_default_config,
    replication_series,
    run_experiment,
    summarize,
)
from .io_export import (
    config_from_mapping,
    dumps_config,
    load_config,
    render_scatter_svg,
    render_series_svg,
    write_results_csv,
    write_summary_json,
)
from .linearity import affine_relation, empirical_affine_residual
from .models import (
    ProcessModel,
    format_series,
    load_series,
    make_rng,
    save_series,
    simulate_series,
    stationary_distribution,
)
from .scoring import classify, cumulative_delta

log = logging.getLogger("prequential")

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2

_CONTAMINATION_RE = re.compile(r"^\s*(\d+)\s*:\s*([+-]\s*[0-9.eE+-]+)\s*$")


class UsageError(Exception):
    pass


def parse_contamination(text: str) -> Contamination:
    """Parse ``INDEX:SHIFT``; the index is 1-based and the shift needs a sign."""
    m = _CONTAMINATION_RE.match(text)
    if not m:
        raise UsageError(
            f"--contaminate expects INDEX:SHIFT with a signed shift, e.g. 50:+7; got {text!r}"
        )
    try:
        shift = float(m.group(2).replace(" ", ""))
    except ValueError:
        raise UsageError(f"--contaminate: bad shift {m.group(2)!r}") from None
    return Contamination(int(m.group(1)), shift)


def _model_args(parser: argparse.ArgumentParser, prefix: str, default: ProcessModel, who: str):
    flag = f"--{prefix}-" if prefix else "--"
    dest = f"{prefix}_" if prefix else ""
    parser.add_argument(f"{flag}mean", dest=f"{dest}mean", type=float, default=default.mean,
                        help=f"{who} process mean (default {default.mean:g})")
    parser.add_argument(f"{flag}phi", dest=f"{dest}phi", type=float, default=default.phi,
                        help=f"{who} AR(1) coefficient (default {default.phi:g})")
    parser.add_argument(f"{flag}var", dest=f"{dest}var", type=float,
                        default=default.innovation_variance,
                        help=f"{who} innovation variance (default {default.innovation_variance:g})")


def _model(args, prefix: str = "") -> ProcessModel:
    dest = f"{prefix}_" if prefix else ""
    try:
        return ProcessModel(
            getattr(args, f"{dest}mean"), getattr(args, f"{dest}phi"), getattr(args, f"{dest}var")
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt(x: float) -> str:
    return format(x, ".10g")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    model = _model(args)
    if not model.is_stationary:
        raise UsageError(f"stationarity bound violated: need |phi| < 1, got phi={model.phi!r}")
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    x = simulate_series(model, args.n, make_rng(args.seed))
    variance = stationary_distribution(model).variance
    if args.out:
        save_series(x, args.out)
        print(f"stationary_variance={variance!r}")
    else:
        sys.stdout.write(format_series(x))
        print(f"stationary_variance={variance!r}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


def cmd_score(args) -> int:
    p, q = _model(args, "p"), _model(args, "q")
    x = load_series(args.series)
    if x.size < 2:
        raise UsageError(f"{args.series}: scoring needs at least 2 observations, got {x.size}")
    path = cumulative_delta(x, p, q)
    print(f"delta_log={path.cumulative_log!r}")
    print(f"delta_hyv={path.cumulative_hyv!r}")
    print(f"decision_log={classify(path.cumulative_log, args.cutoff).value}")
    print(f"decision_hyv={classify(path.cumulative_hyv, args.cutoff).value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

_FLAG_KEYS = {
    "seed": "seed",
    "reps": "replications",
    "length": "series_length",
    "cutoff": "cutoff",
    "generator": "generator",
}


def _flag_overrides(args) -> dict:
    out = {}
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr)
        if value is not None:
            out[key] = value
    if args.contaminate is not None:
        c = parse_contamination(args.contaminate)
        out["contamination"] = {"index": c.index, "shift": c.shift}
    return out


def build_experiment_config(args) -> ExperimentConfig:
    overrides = _flag_overrides(args)
    base = paper_default_config()
    if args.config:
        from_flags = config_from_mapping(overrides, base)
        file_cfg = load_config(args.config, base=from_flags)
        clashes = _keys_in_file(args.config) & set(overrides)
        for key in sorted(clashes):
            log.warning("config file %s overrides command-line value for %s", args.config, key)
        return file_cfg
    return config_from_mapping(overrides, base)


def _keys_in_file(path) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return set(data) if isinstance(data, dict) else set()


FIGURE_SERIES = ("both_wrong", "only_hyv_wrong", "both_correct")


def cmd_experiment(args) -> int:
    config = build_experiment_config(args)
    results = run_experiment(config, workers=args.workers)
    summary = summarize(results, config.generator)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_config(config))
    write_results_csv(results, os.path.join(out_dir, "results.csv"))
    write_summary_json(summary, config, os.path.join(out_dir, "summary.json"))

    highlight = []
    if config.contamination is not None:
        for category in FIGURE_SERIES:
            rep = next(
                (r for r in results if outcome_category(r, config.generator) == category), None
            )
            if rep is None:
                continue
            highlight.append(rep.rep_id)
            x = replication_series(config, rep.rep_id)
            stem = os.path.join(out_dir, f"series_{category}")
            save_series(x, stem + ".txt")
            render_series_svg(
                x, config.contamination.index, stem + ".svg",
                title=f"replication {rep.rep_id}: {category.replace('_', ' ')}",
            )
    render_scatter_svg(results, config.generator, os.path.join(out_dir, "scatter.svg"), highlight)

    for key, value in summary.as_dict().items():
        print(f"{key}={value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# linearity
# ---------------------------------------------------------------------------


def cmd_linearity(args) -> int:
    p, q = _model(args, "p"), _model(args, "q")
    rel = affine_relation(p, q)
    if rel is None:
        print("none")
    else:
        print(f"a={_fmt(rel.intercept)} b={_fmt(rel.slope)} case={rel.case.value}")
    if args.empirical:
        if args.reps < 3:
            raise UsageError("--reps must be >= 3 for an affine fit")
        try:
            config = ExperimentConfig(
                replications=args.reps, series_length=args.length,
                model_p=p, model_q=q, seed=args.seed,
            )
        except ConfigError as exc:
            raise UsageError(str(exc)) from None
        if not p.is_stationary:
            raise UsageError(f"--empirical simulates from P; need |phi| < 1, got {p.phi!r}")
        results = run_experiment(config)
        pairs = [(r.cumulative_log, r.cumulative_hyv) for r in results]
        try:
            residual = empirical_affine_residual(pairs)
        except DegenerateInputError:
            print("empirical_residual=0 (degenerate: all delta_log values coincide)")
        else:
            print(f"empirical_residual={_fmt(residual)}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prequential",
        description="Prequential log-score vs Hyvarinen-score comparison of Gaussian AR(1) models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    paper = paper_default_config()

    sp = sub.add_parser("simulate", help="simulate one AR(1) series")
    _model_args(sp, "", ProcessModel(0.0, 0.0, 1.0), "generating")
    sp.add_argument("--n", type=int, required=True, help="series length")
    sp.add_argument("--seed", type=int, default=paper.seed)
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_simulate)

    sc = sub.add_parser("score", help="prequential deltas of a series file")
    sc.add_argument("--series", required=True, help="series file, one value per line")
    _model_args(sc, "p", paper.model_p, "model P")
    _model_args(sc, "q", paper.model_q, "model Q")
    sc.add_argument("--cutoff", type=float, default=0.0)
    sc.set_defaults(func=cmd_score)

    ex = sub.add_parser("experiment", help="Monte Carlo comparison")
    src = ex.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON config file (wins over flags)")
    src.add_argument("--paper-defaults", action="store_true",
                     help="100 series of length 101, P=AR(0.5, 1), Q=AR(0.1, 4)")
    ex.add_argument("--contaminate", metavar="INDEX:SHIFT",
                    help="add SHIFT to observation INDEX (1-based), e.g. 50:+7")
    ex.add_argument("--seed", type=int)
    ex.add_argument("--reps", type=int)
    ex.add_argument("--length", type=int)
    ex.add_argument("--cutoff", type=float)
    ex.add_argument("--generator", choices=("P", "Q"))
    ex.add_argument("--workers", type=int, default=1, help="worker threads (results unaffected)")
    ex.add_argument("--out-dir", default="out")
    ex.set_defaults(func=cmd_experiment)

    li = sub.add_parser("linearity", help="affine relation between the delta scores")
    _model_args(li, "p", paper.model_p, "model P")
    _model_args(li, "q", paper.model_q, "model Q")
    li.add_argument("--empirical", action="store_true",
                    help="also fit cumulative deltas from simulated replications")
    li.add_argument("--reps", type=int, default=100)
    li.add_argument("--length", type=int, default=paper.series_length)
    li.add_argument("--seed", type=int, default=paper.seed)
    li.set_defaults(func=cmd_linearity)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"prequential: config error{key}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, PrequentialError, ValueError) as exc:
        if isinstance(exc, ReplicationError):
            print(f"prequential: {exc}", file=sys.stderr)
        else:
            print(f"prequential: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"prequential: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
