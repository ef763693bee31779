"""Command line interface.

Subcommands: clean, featurize, train-asc, train-head, calibrate, predict,
evaluate, importance. Stages communicate through artifacts in the run's
output directory, so they can be executed one by one or scripted.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .calib import (
    CalibrationThresholds,
    NumericalError,
    apply_thresholds,
    find_dependent_columns,
    grid_search_thresholds,
    pratt_importance,
    truncate_score,
)
from .config import ConfigError, RunConfig, parse_config
from .heads import (
    MultiLabelHead,
    Standardizer,
    VotingRegressionHead,
    train_multilabel,
    train_regression,
)
from .pipeline import (
    DataError,
    Dataset,
    TaskSpec,
    clean_tweets,
    evaluate_predictions,
    featurize_tweets,
    feature_matrix,
    format_report,
    gold_mapping,
    head_config_from,
    ingest_task,
    ingest_three_class,
    load_head,
    load_hidden_bundles,
    ordinal_to_unit,
    prune_sparse,
    read_feature_csv,
    read_groups_tsv,
    read_predictions,
    save_head,
    select_features,
    three_class_distribution,
    train_asc_from_config,
    write_cleaned_tsv,
    write_feature_csv,
    write_groups_tsv,
    write_meta,
    write_predictions,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

logger = logging.getLogger(__name__)


def _add_common(sub: argparse.ArgumentParser, need_task: bool = False) -> None:
    sub.add_argument("--config", required=True, help="run configuration file")
    sub.add_argument("--seed", type=int, help="override [run] seed")
    sub.add_argument("--out-dir", help="override [run] out_dir")
    if need_task:
        sub.add_argument("--task", required=True, help="V-reg, V-oc, EI-reg, EI-oc or E-c")
        sub.add_argument("--emotion", help="anger, fear, joy or sadness (EI tasks)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tweetmood",
        description="Tweet sentiment/emotion pipeline: clean, featurize, train, calibrate, predict, evaluate.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("clean", help="write both cleaned variants of a dataset")
    _add_common(s)
    s.add_argument("--input", help="dataset to clean (default: data.train)")
    s.add_argument("--three-class", action="store_true",
                   help="input is an id/text/{-1,0,1} corpus")
    s.add_argument("--task", help="task format of --input when not three-class")
    s.add_argument("--emotion")

    s = sub.add_parser("featurize", help="compute pruned feature matrices")
    _add_common(s, need_task=True)

    s = sub.add_parser("train-asc", help="train the combined classifier on a 3-class corpus")
    _add_common(s)

    s = sub.add_parser("train-head", help="train the task head on persisted features")
    _add_common(s, need_task=True)

    s = sub.add_parser("calibrate", help="grid-search ordinal thresholds on train scores")
    _add_common(s, need_task=True)

    s = sub.add_parser("predict", help="write predictions for the evaluation split")
    _add_common(s, need_task=True)

    s = sub.add_parser("evaluate", help="score predictions against gold data")
    s.add_argument("--task", required=True)
    s.add_argument("--emotion")
    s.add_argument("--pred", action="append", required=True,
                   help="prediction TSV; repeatable as emotion=path for EI macro-averages")
    s.add_argument("--gold", action="append", required=True,
                   help="gold dataset file; same form as --pred")
    s.add_argument("--report", help="optional report TSV output path")

    s = sub.add_parser("importance", help="Pratt variable importance on train features")
    _add_common(s, need_task=True)

    return p


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "out_dir", None):
        updates["out_dir"] = args.out_dir
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _task_spec(args) -> TaskSpec:
    return TaskSpec(task=args.task, emotion=getattr(args, "emotion", None))


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(path: Path, producer: str) -> Path:
    if not path.exists():
        raise ConfigError(f"missing artifact {path}; run '{producer}' first")
    return path


def cmd_clean(args) -> int:
    cfg = _load_config(args)
    source = args.input or cfg.train
    if not source:
        raise ConfigError("no input: pass --input or set data.train")
    if args.three_class:
        ds = ingest_three_class(source, compress_5to3=cfg.compress_5to3)
        dist = three_class_distribution(ds)
        print("class distribution:", json.dumps(dist, sort_keys=True))
    else:
        if not args.task:
            raise ConfigError("pass --task (or --three-class) to identify the input format")
        ds = ingest_task(source, TaskSpec(task=args.task, emotion=args.emotion))
    tweets = clean_tweets(ds)
    out = _out_dir(cfg)
    path = out / "cleaned.tsv"
    write_cleaned_tsv(path, tweets)
    write_meta(path, cfg, "clean")
    print(f"wrote {path} ({len(tweets)} tweets)")
    return EXIT_OK


def cmd_featurize(args) -> int:
    cfg = _load_config(args)
    spec = _task_spec(args)
    if not cfg.train:
        raise ConfigError("config lacks data.train")
    out = _out_dir(cfg)
    bundles = load_hidden_bundles(cfg)

    train_ds = ingest_task(cfg.train, spec)
    train_rows = featurize_tweets(clean_tweets(train_ds), cfg, bundles)
    retained = prune_sparse(train_rows, min_support=cfg.min_support)
    if not retained:
        raise DataError(
            f"no feature appears in at least {cfg.min_support} tweets; lower features.min_support"
        )
    train_rows = [select_features(r, retained) for r in train_rows]
    names, matrix = feature_matrix(train_rows)
    path = out / "features_train.csv"
    write_feature_csv(path, train_ds.ids, names, matrix)
    write_meta(path, cfg, "featurize")
    write_groups_tsv(out / "feature_groups.tsv", names, train_rows[0].groups)
    write_meta(out / "feature_groups.tsv", cfg, "featurize")
    print(f"wrote {path} ({len(train_ds)} rows, {len(names)} features)")

    if cfg.test:
        test_ds = ingest_task(cfg.test, spec)
        rows = [
            select_features(r, retained)
            for r in featurize_tweets(clean_tweets(test_ds), cfg, bundles)
        ]
        _, test_matrix = feature_matrix(rows)
        test_path = out / "features_test.csv"
        write_feature_csv(test_path, test_ds.ids, names, test_matrix)
        write_meta(test_path, cfg, "featurize")
        print(f"wrote {test_path} ({len(test_ds)} rows)")
    return EXIT_OK


def cmd_train_asc(args) -> int:
    cfg = _load_config(args)
    path = train_asc_from_config(cfg)
    print(f"wrote {path}")
    return EXIT_OK


def _aligned_labels(ds: Dataset, ids: list[str], path) -> np.ndarray:
    by_id = dict(zip(ds.ids, ds.labels))
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise DataError(f"feature rows without labels in {path}: {missing[:10]}")
    return np.asarray([by_id[i] for i in ids])


def cmd_train_head(args) -> int:
    cfg = _load_config(args)
    spec = _task_spec(args)
    out = _out_dir(cfg)
    ids, names, matrix = read_feature_csv(_require(out / "features_train.csv", "featurize"))
    labels = _aligned_labels(ingest_task(cfg.train, spec), ids, cfg.train)
    standardizer = Standardizer.fit(matrix, names=names)
    z = standardizer.transform(matrix)
    head_cfg = head_config_from(cfg, spec)
    if spec.is_multilabel:
        head = MultiLabelHead(
            d_in=len(names), n_labels=labels.shape[1],
            hidden_dim=head_cfg.hidden_dim, copies=head_cfg.copies, seed=cfg.seed,
        )
        history = train_multilabel(head, z, labels.astype(np.float64), head_cfg)
    else:
        y = ordinal_to_unit(labels, spec.class_values) if spec.is_ordinal else labels
        head = VotingRegressionHead(d_in=len(names), copies=head_cfg.copies, seed=cfg.seed)
        history = train_regression(head, z, y, head_cfg)
    path = out / "head.ckpt.json"
    save_head(path, head, standardizer, names, spec, cfg)
    write_meta(path, cfg, "train-head")
    print(f"wrote {path} (final loss {history[-1]:.6f})")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _load_config(args)
    spec = _task_spec(args)
    if not spec.is_ordinal:
        raise ConfigError(f"task {spec.task} is not ordinal; nothing to calibrate")
    out = _out_dir(cfg)
    head, standardizer, names = load_head(_require(out / "head.ckpt.json", "train-head"))
    ids, file_names, matrix = read_feature_csv(_require(out / "features_train.csv", "featurize"))
    if list(file_names) != list(names):
        raise DataError("feature CSV columns do not match the trained head")
    labels = _aligned_labels(ingest_task(cfg.train, spec), ids, cfg.train)
    scores = head.predict(standardizer.transform(matrix))
    thresholds = grid_search_thresholds(
        scores, labels, spec.class_values,
        resolution=cfg.calibration_resolution, beam_width=cfg.calibration_beam_width,
    )
    path = out / "thresholds.json"
    path.write_text(
        json.dumps(thresholds.as_dict(), sort_keys=True, separators=(",", ":")),
        encoding="utf-8",
    )
    write_meta(path, cfg, "calibrate")
    print(f"wrote {path} (cuts {thresholds.cuts})")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _load_config(args)
    spec = _task_spec(args)
    out = _out_dir(cfg)
    head, standardizer, names = load_head(_require(out / "head.ckpt.json", "train-head"))
    source = out / ("features_test.csv" if (out / "features_test.csv").exists() else "features_train.csv")
    ids, file_names, matrix = read_feature_csv(_require(source, "featurize"))
    if list(file_names) != list(names):
        raise DataError("feature CSV columns do not match the trained head")
    z = standardizer.transform(matrix)
    if spec.is_multilabel:
        values = head.predict(z)
    else:
        scores = head.predict(z)
        if spec.is_ordinal:
            tpath = _require(out / "thresholds.json", "calibrate")
            thresholds = CalibrationThresholds.from_dict(
                json.loads(tpath.read_text(encoding="utf-8"))
            )
            values = apply_thresholds(scores, thresholds)
        else:
            values = scores
    path = out / "predictions.tsv"
    write_predictions(path, ids, values, spec)
    write_meta(path, cfg, "predict")
    print(f"wrote {path} ({len(ids)} predictions)")
    return EXIT_OK


def _parse_labeled_paths(entries: list[str], flag: str) -> dict[str, str]:
    out = {}
    for entry in entries:
        if "=" in entry:
            label, path = entry.split("=", 1)
        else:
            label, path = "", entry
        if label in out:
            raise ConfigError(f"duplicate {flag} label {label!r}")
        out[label] = path
    return out


def cmd_evaluate(args) -> int:
    preds = _parse_labeled_paths(args.pred, "--pred")
    golds = _parse_labeled_paths(args.gold, "--gold")
    if set(preds) != set(golds):
        raise ConfigError("--pred and --gold labels must match up")
    scores: dict[str, float] = {}
    for label in preds:
        emotion = label or args.emotion
        spec = TaskSpec(task=args.task, emotion=emotion)
        pred = read_predictions(preds[label], spec)
        gold = gold_mapping(ingest_task(golds[label], spec))
        scores[label or spec.task] = evaluate_predictions(pred, gold, spec)
    metric = "jaccard" if args.task == "E-c" else "pearson"
    report = format_report(scores, metric)
    print(report, end="")
    if args.report:
        Path(args.report).write_text(report, encoding="utf-8")
        print(f"wrote {args.report}")
    return EXIT_OK


def cmd_importance(args) -> int:
    cfg = _load_config(args)
    spec = _task_spec(args)
    out = _out_dir(cfg)
    ids, names, matrix = read_feature_csv(_require(out / "features_train.csv", "featurize"))
    groups = read_groups_tsv(_require(out / "feature_groups.tsv", "featurize"))
    labels = _aligned_labels(ingest_task(cfg.train, spec), ids, cfg.train)
    if spec.is_multilabel:
        raise ConfigError("importance is defined for regression/ordinal tasks")
    y = ordinal_to_unit(labels, spec.class_values) if spec.is_ordinal else labels.astype(float)
    z = Standardizer.fit(matrix, names=names).transform(matrix)
    # Proportion-style groups are exactly collinear; drop the redundant
    # columns so the OLS decomposition is well posed.
    dependent = find_dependent_columns(z, names)
    if dependent:
        logger.warning("dropping exactly dependent feature columns: %s", dependent)
        keep = [j for j, n in enumerate(names) if n not in set(dependent)]
        z = z[:, keep]
        names = [names[j] for j in keep]
    report = pratt_importance(z, y, names=names, groups=groups)
    path = out / "importance.tsv"
    path.write_text(report.to_tsv(), encoding="utf-8")
    write_meta(path, cfg, "importance")
    chart = out / "importance_chart.tsv"
    chart.write_text(report.chart_data(), encoding="utf-8")
    write_meta(chart, cfg, "importance")
    print(f"wrote {path} and {chart} (R^2 {truncate_score(report.r_squared)})")
    return EXIT_OK


_COMMANDS = {
    "clean": cmd_clean,
    "featurize": cmd_featurize,
    "train-asc": cmd_train_asc,
    "train-head": cmd_train_head,
    "calibrate": cmd_calibrate,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "importance": cmd_importance,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
