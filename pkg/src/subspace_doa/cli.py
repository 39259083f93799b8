"""Command-line entry point: ``subspace-doa <command> --config run.toml``.

Commands:
    simulate  generate a dataset from [geometry] and [scene]
    train     fit a network on [train].data, write a checkpoint and metrics log
    evaluate  mean subspace distance and root-MUSIC MSE of a checkpoint
    sweep     Monte Carlo evaluation over the [sweep] grid
    report    reformat a sweep result file and print it as a table

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.
"""

import argparse
import json
import os
import sys

import numpy as np

from .array_sim import generate_dataset
from .dataset_io import read_dataset, write_dataset
from .errors import ConfigError, ContractError, EstimationFailure, NumericError
from .harness import config as cfgmod
from .harness.metrics import trial_error
from .harness.report import emit_report, format_table, read_report
from .harness.sweep import METHOD_MODES, run_sweep
from .learning.checkpoint import MetricsLog, load_checkpoint, save_checkpoint
from .learning.inference import mean_distance, predict_angles
from .learning.network import Network, NetworkSpec
from .learning.train import train

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _require(section, key):
    if key not in section:
        raise ConfigError(f"missing required key {key!r}")
    return section[key]


def _seed(args, section, default=0):
    return args.seed if args.seed is not None else int(section.get("seed", default))


def cmd_simulate(cfg, args):
    """generate a dataset file"""
    geom = cfgmod.geometry_from(cfg)
    spec = cfgmod.dataset_spec_from(cfg, geom)
    out = args.out or "dataset.bin"
    records = generate_dataset(geom, spec, _seed(args, cfg.get("scene", {})))
    write_dataset(out, geom, records, spec.T)
    print(f"wrote {len(records)} records to {out}")


def _load_data(path, geom):
    dgeom, _, records = read_dataset(path)
    if (dgeom.M, dgeom.S) != (geom.M, geom.S):
        raise ConfigError(f"{path} was generated for M={dgeom.M}, S={dgeom.S}")
    return records


def cmd_train(cfg, args):
    """train a network and write a checkpoint"""
    geom = cfgmod.geometry_from(cfg)
    t = cfg.get("train", {})
    tc = cfgmod.training_config_from(cfg)
    if args.seed is not None:
        tc.seed = args.seed
    data = _load_data(_require(t, "data"), geom)
    val = _load_data(t["validation"], geom) if "validation" in t else None
    spec = NetworkSpec(
        N=geom.N,
        M=geom.M,
        hidden=tuple(t.get("hidden", (256, 256, 256))),
        mode=cfgmod.model_mode_for(tc.loss),
        seed=int(t.get("model_seed", tc.seed)),
    )
    out = args.out or t.get("checkpoint", "model.ckpt")
    log = MetricsLog(t.get("metrics", out + ".metrics.jsonl"))
    model, history = train(Network(spec), data, tc, geom, validation=val, log=log)
    save_checkpoint(out, model)
    print(f"trained {tc.epochs} epochs, final loss {history[-1]['loss']:.6g}; wrote {out}")


def cmd_evaluate(cfg, args):
    """score a checkpoint on a dataset"""
    geom = cfgmod.geometry_from(cfg)
    t = cfg.get("train", {})
    model = load_checkpoint(_require(t, "checkpoint"))
    path = t.get("validation", t.get("data"))
    if path is None:
        raise ConfigError("[train] needs validation or data to evaluate on")
    records = _load_data(path, geom)
    kind = t.get("distance", "geodesic")
    result = {"records": len(records), "distance": kind}
    result["mean_distance"] = mean_distance(model, records, geom, kind)
    errs, failures = [], 0
    for rec in records:
        try:
            errs.append(trial_error(predict_angles(model, rec.scm, rec.k, geom), rec.theta))
        except EstimationFailure:
            failures += 1
    result["failures"] = failures
    result["mse"] = float(np.mean(errs)) if errs else None
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_sweep(cfg, args):
    """run the Monte Carlo grid"""
    geom = cfgmod.geometry_from(cfg)
    s = cfg.get("sweep", {})
    spec = cfgmod.sweep_spec_from(cfg, geom)
    if args.seed is not None:
        spec.seed = args.seed
    paths = s.get("checkpoints", {})
    models = {}
    for method in spec.methods:
        if METHOD_MODES[method] is not None:
            if method not in paths:
                raise ConfigError(f"[sweep.checkpoints] has no entry for {method!r}")
            models[method] = load_checkpoint(paths[method])
    cells = run_sweep(spec, models)
    out = args.out or s.get("results", "results.csv")
    emit_report(cells, out)
    flagged = sum(c.flagged for c in cells)
    print(f"wrote {len(cells)} cells to {out}" + (f" ({flagged} flagged)" if flagged else ""))


def cmd_report(cfg, args):
    """print and convert sweep results"""
    src = _require(cfg.get("sweep", {}), "results")
    cells = read_report(src)
    if args.out:
        emit_report(cells, args.out)
    print(format_table(cells))


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="subspace-doa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip() or None)
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--seed", type=int, default=None, help="override the section seed")
        p.add_argument("--out", default=None, help="override the output path")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if not os.path.exists(args.config):
            raise FileNotFoundError(args.config)
        cfg = cfgmod.load_config(args.config)
        COMMANDS[args.command](cfg, args)
    except (ConfigError, ContractError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
