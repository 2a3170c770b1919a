"""Command-line interface: ``phnet {profile,gen,split,train,evaluate,predict}``.

Exit status: 0 success, 2 input or configuration error, 3 numerical failure.
Every command writes a ``<out>.manifest.json`` describing the run.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .dataset import default_schema, load_csv, load_schema, split_70_30, write_csv
from .evaluation import evaluate, write_pairs_csv, write_scatter_csv
from .exceptions import NotPositiveDefinite, PhNetError
from .model import PhModel
from .estimator import MLPRegressorLM
from .synthgen import generate, load_profile, shipped_profile, write_profile
from .training import TrainConfig, Termination, read_key_values, write_trace_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
MSE_CEILING = 0.05


class UsageError(Exception):
    pass


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _stem(out):
    p = Path(out)
    return p.with_suffix("") if p.suffix else p


def _sibling(out, suffix):
    s = _stem(out)
    return s.with_name(s.name + suffix)


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_manifest(out, argv, inputs, outputs, seed=None, config=None):
    manifest = {
        "command": list(argv),
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "tool_version": __version__,
    }
    path = _sibling(out, ".manifest.json")
    _write_json(path, manifest)
    return path


def _schema(args):
    return load_schema(args.schema) if getattr(args, "schema", None) else default_schema()


def cmd_profile(args, argv):
    prof = shipped_profile(args.location)
    write_profile(prof, args.out)
    write_manifest(args.out, argv, [], [args.out], config={"location": args.location})
    return EXIT_OK


def cmd_gen(args, argv):
    if args.profile:
        if not Path(args.profile).is_file():
            raise UsageError(f"profile not found: {args.profile}")
        profile = load_profile(args.profile)
        inputs = [args.profile]
    elif args.location is not None:
        profile = shipped_profile(args.location)
        inputs = []
    else:
        raise UsageError("gen needs --profile or --location")
    data = generate(profile, args.n, args.seed, _schema(args))
    write_csv(data, args.out)
    write_manifest(args.out, argv, inputs, [args.out], seed=args.seed, config={"n": args.n})
    return EXIT_OK


def cmd_split(args, argv):
    data = load_csv(args.data, _schema(args))
    train, test = split_70_30(data, args.seed)
    stem = _stem(args.out)
    outs = [stem.with_name(stem.name + "_train.csv"), stem.with_name(stem.name + "_test.csv")]
    write_csv(train, outs[0])
    write_csv(test, outs[1])
    write_manifest(args.out, argv, [args.data], outs, seed=args.seed)
    return EXIT_OK


def _train_settings(args):
    kv = read_key_values(args.config) if args.config else {}
    n_hidden = int(kv.pop("n_hidden", 10))
    kv["seed"] = args.seed
    cfg = TrainConfig.from_mapping(kv)
    return cfg, n_hidden


def _regressor(cfg, n_hidden):
    return MLPRegressorLM(
        n_hidden=n_hidden,
        max_epochs=cfg.max_epochs,
        mse_goal=cfg.mse_goal,
        lambda_init=cfg.lambda_init,
        lambda_up=cfg.lambda_up,
        lambda_down=cfg.lambda_down,
        lambda_max=cfg.lambda_max,
        min_grad_norm=cfg.min_grad_norm,
        algorithm=cfg.algorithm,
        learning_rate=cfg.learning_rate,
        random_state=cfg.seed,
    )


def train_one(data, schema, cfg, n_hidden, include_target, out, scope="all"):
    """Split, fit and persist one model. Returns (exit status, output paths)."""
    train, test = split_70_30(data, cfg.seed)
    model = PhModel(schema, _regressor(cfg, n_hidden), include_target).fit(train)
    report = model.regressor.report_
    model.save(out)
    trace = _sibling(out, ".mse_trace.csv")
    write_trace_csv(report, trace)
    summary = {
        "scope": scope,
        "seed": cfg.seed,
        "n_hidden": n_hidden,
        "include_target_input": include_target,
        "input_names": list(model.input_names),
        "n_train": len(train),
        "n_test": len(test),
        "train_report": report.to_dict(),
        "train_evaluation": evaluate(model, train, scope).to_dict(),
        "test_evaluation": evaluate(model, test, scope).to_dict(),
    }
    rep = _sibling(out, ".report.json")
    _write_json(rep, summary)
    ok = report.termination == Termination.GOAL_REACHED or (
        report.termination == Termination.MAX_EPOCHS and report.final_train_mse <= MSE_CEILING
    )
    if not ok:
        print(
            f"training {scope}: {report.termination.value} with normalized MSE "
            f"{report.final_train_mse:.6g}",
            file=sys.stderr,
        )
    return (EXIT_OK if ok else EXIT_NUMERIC), [out, rep, trace]


def cmd_train(args, argv):
    schema = _schema(args)
    cfg, n_hidden = _train_settings(args)
    data = load_csv(args.data, schema)
    inputs = [args.data] + [p for p in (args.schema, args.config) if p]
    config = dict(cfg.to_dict(), n_hidden=n_hidden)
    status, outputs = EXIT_OK, []
    if args.per_location:
        for loc, subset in data.by_location().items():
            out = _sibling(args.out, f"_loc{loc}.json")
            st, outs = train_one(subset, schema, cfg, n_hidden, args.include_target_input, out,
                                 scope=f"location {loc}")
            status = max(status, st)
            outputs += outs
    else:
        status, outputs = train_one(data, schema, cfg, n_hidden, args.include_target_input, args.out)
    write_manifest(args.out, argv, inputs, outputs, seed=cfg.seed, config=config)
    return status


def cmd_evaluate(args, argv):
    model = PhModel.load(args.model)
    data = load_csv(args.data, model.schema)
    report = evaluate(model, data)
    warned = sum(1 for w in model.range_warnings(data) if w)
    d = report.to_dict()
    d["rows_with_range_warnings"] = warned
    _write_json(args.out, d)
    pairs = _sibling(args.out, "_pairs.csv")
    scatter = _sibling(args.out, "_scatter.csv")
    write_pairs_csv(report, pairs)
    write_scatter_csv(report, scatter)
    write_manifest(args.out, argv, [args.model, args.data], [args.out, pairs, scatter])
    return EXIT_OK


def cmd_predict(args, argv):
    model = PhModel.load(args.model)
    data = load_csv(args.data, model.schema)
    pred = model.predict(data)
    warnings = [";".join(w) for w in model.range_warnings(data)] if len(data) else []
    write_csv(data, args.out, {"predicted_ph": list(pred), "warnings": warnings})
    write_manifest(args.out, argv, [args.model, args.data], [args.out])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="phnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="write a built-in location profile")
    p.add_argument("--location", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    p.add_argument("--profile")
    p.add_argument("--location", type=int)
    p.add_argument("--n", type=int, default=48)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("split", help="write the seeded 70/30 partitions")
    p.add_argument("data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema")
    p.add_argument("--out", required=True, help="prefix for <out>_train.csv and <out>_test.csv")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="split, normalize and train a model")
    p.add_argument("data")
    p.add_argument("--schema")
    p.add_argument("--config", help="file of 'key = value' training settings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-location", action="store_true")
    p.add_argument("--include-target-input", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a model on a dataset")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="append predicted pH to a dataset")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, argv)
    except NotPositiveDefinite as exc:
        print(f"phnet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PhNetError, UsageError, OSError) as exc:
        print(f"phnet: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
