"""Command-line entry point: ``curricula <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .bitdata import format_dataset
from .errors import EmptyProblemError, InfeasibleInstanceError, ParseError
from .harness import (
    load_config,
    read_records,
    resolve_gates,
    run_experiment,
    run_tau_sweep,
    summarize,
    write_summary_csv,
)
from .loss import LOSS_NAMES, Curriculum
from .minfs import estimate_curriculum
from .network import evaluate, format_network
from .optimizer import (
    DEFAULT_ITERATIONS,
    DEFAULT_RESTARTS,
    LahcConfig,
    default_history,
    lahc_train,
)
from .problems import GENERATORS, load_dataset, load_timeseries, timeseries_to_pairs


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)


def cmd_generate(args):
    ds = GENERATORS[args.kind](args.n)
    _write(format_dataset(ds), args.out)
    return 0


def cmd_pairs(args):
    ds, removed = timeseries_to_pairs(load_timeseries(args.input))
    _write(format_dataset(ds), args.out)
    report = {"examples": ds.n_examples, "inputs": ds.n_inputs, "targets": ds.n_targets,
              "removed_constant_targets": removed}
    print(json.dumps(report), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def cmd_minfs(args):
    ds = load_dataset(args.data)
    est = estimate_curriculum(ds, args.seed)
    report = {
        "feature_sets": [list(r.features) for r in est.per_target],
        "sizes": list(est.sizes),
        "order": list(est.order),
        "tie_groups": [list(g) for g in est.tie_groups],
        "overlap": est.overlap_matrix().round(6).tolist(),
        "nestedness": est.nestedness,
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def _parse_curriculum(text: str, ds, seed):
    if text == "identity":
        return Curriculum.identity(ds.n_targets)
    if text == "auto":
        return estimate_curriculum(ds, seed).order
    if text.startswith("given:"):
        return Curriculum(int(x) for x in text[len("given:"):].split(","))
    raise ValueError(f"curriculum must be identity, auto or given:i,j,..., got {text!r}")


def cmd_train(args):
    ds = load_dataset(args.data)
    curriculum = _parse_curriculum(args.curriculum, ds, args.seed)
    if len(curriculum) != ds.n_targets:
        raise ValueError(f"curriculum has {len(curriculum)} entries for {ds.n_targets} targets")
    config = LahcConfig(
        history_length=args.history or default_history(None),
        iteration_limit=args.iterations,
        restart_limit=args.restarts,
        loss=args.loss,
        curriculum=curriculum,
        return_best=args.return_best,
    )
    n_g = resolve_gates(args.gates, ds.n_targets)
    res = lahc_train(ds, config, n_g, args.seed)
    acc = (evaluate(res.network, ds.inputs).to_array() == ds.targets.to_array()).mean(axis=0)
    report = {
        "loss": args.loss,
        "curriculum": list(curriculum),
        "gates": n_g,
        "seed": args.seed,
        "final_training_loss": res.final_training_loss,
        "reached_zero": res.reached_zero,
        "iterations_used": res.iterations_used,
        "restarts_used": res.restarts_used,
        "training_accuracy": [float(a) for a in acc],
    }
    print(json.dumps(report))
    if args.network_out:
        _write(format_network(res.network), args.network_out)
    return 0


def _run(args, runner):
    cfg = load_config(args.config)
    output = args.out or cfg.output
    count = 0
    for _ in runner(cfg, output=output, workers=args.workers, resume=args.resume):
        count += 1
    logging.info("wrote %d records to %s", count, output)
    return 0


def cmd_experiment(args):
    return _run(args, run_experiment)


def cmd_tau_sweep(args):
    return _run(args, run_tau_sweep)


def cmd_summarize(args):
    rows = summarize(read_records(args.input), tuple(args.group_by.split(",")))
    if args.out in (None, "-"):
        write_summary_csv(rows, sys.stdout)
    else:
        write_summary_csv(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curricula", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a benchmark truth table")
    g.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    q = sub.add_parser("pairs", help="time series to state-transition dataset")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_pairs)

    f = sub.add_parser("minfs", help="per-target minimum feature sets and target order")
    f.add_argument("data")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out")
    f.set_defaults(func=cmd_minfs)

    t = sub.add_parser("train", help="train one network with LAHC")
    t.add_argument("--data", required=True)
    t.add_argument("--loss", choices=LOSS_NAMES, default="l1")
    t.add_argument("--curriculum", default="identity")
    t.add_argument("--gates", default="21m")
    t.add_argument("--history", type=int)
    t.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    t.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    t.add_argument("--return-best", action="store_true")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--network-out")
    t.set_defaults(func=cmd_train)

    for name, func, text in (("experiment", cmd_experiment, "paired loss comparison from a config"),
                             ("tau-sweep", cmd_tau_sweep, "random-order sweep from a config")):
        e = sub.add_parser(name, help=text)
        e.add_argument("--config", required=True)
        e.add_argument("--out", help="records file (overrides the config)")
        e.add_argument("--workers", type=int)
        e.add_argument("--resume", action="store_true", help="skip jobs already in the records file")
        e.set_defaults(func=func)

    s = sub.add_parser("summarize", help="CSV summary of a records file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--group-by", default="size,loss")
    s.add_argument("--out")
    s.set_defaults(func=cmd_summarize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, InfeasibleInstanceError, EmptyProblemError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
