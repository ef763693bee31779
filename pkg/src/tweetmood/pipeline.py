"""End-to-end driver: ingestion, featurization, training, calibration,
prediction, evaluation and importance reporting.

Every stage reads and writes plain-text artifacts (CSV/TSV/JSON) inside
the run's output directory, each stamped via a ``.meta.json`` sidecar
with the config digest and seed, so a run is reproducible from the
config file and input data alone and restartable from any intermediate.
"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .calib import (
    CalibrationThresholds,
    apply_thresholds,
    grid_search_thresholds,
    jaccard,
    macro_average,
    pearson,
    pratt_importance,
    truncate_score,
)
from .calib import NumericalError
from .checkpoint import load_checkpoint, restore_params, save_checkpoint
from .classifier import (
    ClassifierTrainConfig,
    CombinedClassifier,
    SubModel,
    SubModelConfig,
    Vocabulary,
    build_vocabularies,
    encode_tweets,
    extract_hidden,
    load_embedding_file,
    one_hot_labels,
    train_classifier,
)
from .config import ConfigError, RunConfig
from .heads import (
    MULTILABEL_EMOTIONS,
    MultiLabelConfig,
    MultiLabelHead,
    RegressionConfig,
    Standardizer,
    VotingRegressionHead,
    regression_config_for,
    train_multilabel,
    train_regression,
)
from .lexfeat import (
    FeatureVector,
    assemble,
    category_features,
    feature_matrix,
    nrc_hashtag_features,
    polarity_scorer,
    prune_sparse,
    select_features,
    syntactic_features,
)
from .nn import derive_rng
from .resources import (
    default_affect_lexicon,
    default_category_lexicon,
    default_dictionaries,
    default_polarity_lexicon,
    diminisher_words,
    magnifier_words,
)
from .textpipe import CleanedTweet, RawTweet, clean

logger = logging.getLogger(__name__)


class DataError(ValueError):
    """Malformed or inconsistent input data."""


# -- task specification ----------------------------------------------------------

TASK_NAMES = ("V-reg", "V-oc", "EI-reg", "EI-oc", "E-c")
EI_EMOTIONS = ("anger", "fear", "joy", "sadness")


@dataclass(frozen=True)
class TaskSpec:
    """One sub-task: valence or emotion intensity, regression or ordinal
    classification, or multi-label emotion detection."""

    task: str
    emotion: str | None = None

    def __post_init__(self):
        if self.task not in TASK_NAMES:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASK_NAMES}")
        if self.task.startswith("EI"):
            if self.emotion not in EI_EMOTIONS:
                raise ConfigError(f"task {self.task} needs an emotion from {EI_EMOTIONS}")
        elif self.emotion is not None:
            raise ConfigError(f"task {self.task} does not take an emotion")

    @property
    def metric(self) -> str:
        return "jaccard" if self.task == "E-c" else "pearson"

    @property
    def is_ordinal(self) -> bool:
        return self.task.endswith("-oc")

    @property
    def is_multilabel(self) -> bool:
        return self.task == "E-c"

    @property
    def class_values(self) -> tuple[int, ...] | None:
        if self.task == "V-oc":
            return (-3, -2, -1, 0, 1, 2, 3)
        if self.task == "EI-oc":
            return (0, 1, 2, 3)
        return None

    @property
    def dimension_name(self) -> str:
        return self.emotion if self.emotion else "valence"


# -- ingestion ----------------------------------------------------------------


@dataclass(frozen=True)
class Dataset:
    ids: tuple[str, ...]
    texts: tuple[str, ...]
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


def _read_rows(path, expected_cols: int) -> list[tuple[int, list[str]]]:
    rows = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != expected_cols:
            raise DataError(
                f"{path}:{lineno}: expected {expected_cols} tab-separated fields, got {len(parts)}"
            )
        rows.append((lineno, parts))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return rows


def ingest_three_class(path, compress_5to3: bool = False) -> Dataset:
    """Parse an ``id<TAB>text<TAB>label`` corpus with labels in
    {-1, 0, 1}; with ``compress_5to3`` a 5-level scale is folded down
    ({-2,-1} -> -1, {1,2} -> 1)."""
    ids, texts, labels = [], [], []
    for lineno, parts in _read_rows(path, 3):
        tid, text, raw = parts
        try:
            label = int(raw)
        except ValueError:
            raise DataError(f"{path}:{lineno}: label {raw!r} is not an integer") from None
        if compress_5to3:
            if label not in (-2, -1, 0, 1, 2):
                raise DataError(f"{path}:{lineno}: label {label} outside the 5-level scale")
            label = max(-1, min(1, label))
        elif label not in (-1, 0, 1):
            raise DataError(f"{path}:{lineno}: label {label} outside {{-1, 0, 1}}")
        ids.append(tid)
        texts.append(text)
        labels.append(label)
    return Dataset(tuple(ids), tuple(texts), np.asarray(labels, dtype=np.int64))


def three_class_distribution(ds: Dataset) -> dict[str, dict]:
    """Class counts and rounded percentage shares."""
    names = {1: "positive", 0: "neutral", -1: "negative"}
    total = len(ds)
    out = {}
    for value, name in names.items():
        count = int((ds.labels == value).sum())
        out[name] = {"count": count, "percent": round(100.0 * count / total)}
    return out


def ingest_task(path, spec: TaskSpec) -> Dataset:
    """Parse a task-formatted dataset and validate its label domain.

    Regression/ordinal rows are ``id<TAB>text<TAB>dimension<TAB>label``;
    multi-label rows carry 11 binary columns after the text."""
    ids, texts, labels = [], [], []
    if spec.is_multilabel:
        for lineno, parts in _read_rows(path, 2 + len(MULTILABEL_EMOTIONS)):
            tid, text, *flags = parts
            row = []
            for f in flags:
                if f not in ("0", "1"):
                    raise DataError(f"{path}:{lineno}: multi-label flag {f!r} is not 0/1")
                row.append(int(f))
            ids.append(tid)
            texts.append(text)
            labels.append(row)
        return Dataset(tuple(ids), tuple(texts), np.asarray(labels, dtype=np.int64))

    for lineno, parts in _read_rows(path, 4):
        tid, text, dimension, raw = parts
        if dimension != spec.dimension_name:
            raise DataError(
                f"{path}:{lineno}: dimension {dimension!r} does not match task "
                f"dimension {spec.dimension_name!r}"
            )
        if spec.is_ordinal:
            try:
                label = int(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: ordinal label {raw!r} is not an integer") from None
            if label not in spec.class_values:
                raise DataError(
                    f"{path}:{lineno}: class {label} outside {spec.class_values}"
                )
        else:
            try:
                label = float(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: score {raw!r} is not a number") from None
            if not 0.0 <= label <= 1.0:
                raise DataError(f"{path}:{lineno}: score {label} outside [0, 1]")
        ids.append(tid)
        texts.append(text)
        labels.append(label)
    dtype = np.int64 if spec.is_ordinal else np.float64
    return Dataset(tuple(ids), tuple(texts), np.asarray(labels, dtype=dtype))


# -- model persistence for hidden-feature extraction ------------------------------


def save_hidden_model(
    path,
    model,
    vocabs: Mapping[str, Vocabulary],
    layer: str,
    prefix: str,
    seed: int,
    config_digest: str,
) -> None:
    """Checkpoint a classifier together with everything needed to re-run
    its hidden layer on new tweets: vocabularies, sub-model configs, and
    the feature naming (layer + prefix)."""
    if isinstance(model, CombinedClassifier):
        extra = {
            "kind": "combined",
            "sub_configs": [asdict(sm.cfg) for sm in model.submodels.values()],
            "combiner_hidden": model.w1.shape[1],
        }
    elif isinstance(model, SubModel):
        extra = {"kind": "submodel", "sub_configs": [asdict(model.cfg)]}
    else:
        raise ValueError(f"cannot checkpoint model of type {type(model).__name__}")
    extra.update({
        "layer": layer,
        "prefix": prefix,
        "vocabs": {v: dict(vocab.token_to_id) for v, vocab in vocabs.items()},
    })
    save_checkpoint(path, model.parameters(), seed=seed, config_digest=config_digest, extra=extra)


@dataclass(frozen=True)
class HiddenModelBundle:
    model: object
    vocabs: dict[str, Vocabulary]
    layer: str
    prefix: str
    seq_len: int


def load_hidden_model(path) -> HiddenModelBundle:
    payload = load_checkpoint(path)
    extra = payload["extra"]
    cfgs = [SubModelConfig(**{**d, "filter_widths": tuple(d["filter_widths"])})
            for d in extra["sub_configs"]]
    vocabs = {v: Vocabulary(token_to_id=m) for v, m in extra["vocabs"].items()}
    if extra["kind"] == "combined":
        model = CombinedClassifier(
            cfgs, vocabs, combiner_hidden=extra["combiner_hidden"], seed=payload["seed"]
        )
    else:
        (cfg,) = cfgs
        model = SubModel(cfg, vocabs[cfg.cleaning_variant].size, seed=payload["seed"])
    restore_params(model.parameters(), payload)
    return HiddenModelBundle(
        model=model,
        vocabs=vocabs,
        layer=extra["layer"],
        prefix=extra["prefix"],
        seq_len=cfgs[0].seq_len,
    )


# -- featurization ----------------------------------------------------------------


def clean_tweets(ds: Dataset) -> list[CleanedTweet]:
    dicts = default_dictionaries()
    return [clean(RawTweet(tid, text), dicts) for tid, text in zip(ds.ids, ds.texts)]


def featurize_tweets(
    tweets: Sequence[CleanedTweet],
    cfg: RunConfig,
    hidden_models: Sequence[HiddenModelBundle] = (),
) -> list[FeatureVector]:
    """Assemble the configured feature groups for every tweet."""
    parts_per_tweet: list[list[FeatureVector]] = [[] for _ in tweets]
    if cfg.syntactic:
        mags, dims = magnifier_words(), diminisher_words()
        for i, tw in enumerate(tweets):
            parts_per_tweet[i].append(syntactic_features(tw, mags, dims))
    if cfg.category:
        lex = default_category_lexicon()
        for i, tw in enumerate(tweets):
            parts_per_tweet[i].append(category_features(tw, lex))
    if cfg.nrc_hashtags:
        lex = default_affect_lexicon()
        for i, tw in enumerate(tweets):
            parts_per_tweet[i].append(nrc_hashtag_features(tw, lex))
    if cfg.polarity:
        lex = default_polarity_lexicon()
        for i, tw in enumerate(tweets):
            parts_per_tweet[i].append(polarity_scorer(tw, lex))
    for bundle in hidden_models:
        batch = encode_tweets(tweets, bundle.vocabs, bundle.seq_len)
        for i, fv in enumerate(extract_hidden(bundle.model, batch, bundle.layer, bundle.prefix)):
            parts_per_tweet[i].append(fv)
    rows = [assemble(parts) for parts in parts_per_tweet]
    if rows and len(rows[0]) == 0:
        raise ConfigError("all feature groups are disabled")
    return rows


def load_hidden_bundles(cfg: RunConfig) -> list[HiddenModelBundle]:
    bundles = []
    if cfg.asc_checkpoint:
        bundles.append(load_hidden_model(cfg.asc_checkpoint))
    for path in cfg.hidden_checkpoints:
        bundles.append(load_hidden_model(path))
    return bundles


# -- artifact io ----------------------------------------------------------------


def write_meta(path: Path, cfg: RunConfig, stage: str) -> None:
    meta = {"config_digest": cfg.digest, "seed": cfg.seed, "stage": stage}
    Path(str(path) + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )


def write_feature_csv(path, ids: Sequence[str], names: Sequence[str], matrix: np.ndarray) -> None:
    lines = ["id," + ",".join(names)]
    for tid, row in zip(ids, matrix):
        lines.append(tid + "," + ",".join(repr(v) for v in row.tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_feature_csv(path) -> tuple[list[str], list[str], np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError(f"{path}: empty feature file")
    header = lines[0].split(",")
    if header[0] != "id":
        raise DataError(f"{path}: feature CSV must start with an id column")
    names = header[1:]
    ids, rows = [], []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} columns")
        ids.append(parts[0])
        rows.append([float(v) for v in parts[1:]])
    return ids, names, np.asarray(rows, dtype=np.float64)


def write_groups_tsv(path, names: Sequence[str], groups: Mapping[str, str]) -> None:
    Path(path).write_text(
        "".join(f"{n}\t{groups[n]}\n" for n in names), encoding="utf-8"
    )


def read_groups_tsv(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        name, group = line.split("\t")
        out[name] = group
    return out


def write_cleaned_tsv(path, tweets: Sequence[CleanedTweet]) -> None:
    lines = []
    for tw in tweets:
        lines.append("\t".join([
            tw.id,
            tw.text,
            " ".join(tw.simple_surfaces()),
            " ".join(t.pos for t in tw.simple),
            " ".join(tw.complex_surfaces()),
            " ".join(t.pos for t in tw.complex),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_predictions(path, ids: Sequence[str], values: np.ndarray, spec: TaskSpec) -> None:
    lines = []
    if spec.is_multilabel:
        for tid, row in zip(ids, values):
            lines.append(tid + "\t" + "\t".join(str(int(v)) for v in row))
    elif spec.is_ordinal:
        for tid, v in zip(ids, values):
            lines.append(f"{tid}\t{int(v)}")
    else:
        for tid, v in zip(ids, values):
            lines.append(f"{tid}\t{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_predictions(path, spec: TaskSpec) -> dict[str, np.ndarray | float | int]:
    out = {}
    if spec.is_multilabel:
        for lineno, parts in _read_rows(path, 1 + len(MULTILABEL_EMOTIONS)):
            out[parts[0]] = np.asarray([int(v) for v in parts[1:]], dtype=np.int64)
    else:
        for lineno, parts in _read_rows(path, 2):
            out[parts[0]] = int(parts[1]) if spec.is_ordinal else float(parts[1])
    return out


@contextmanager
def run_lock(out_dir: Path):
    """A run owns its output directory exclusively."""
    lock = Path(out_dir) / ".lock"
    try:
        lock.touch(exist_ok=False)
    except FileExistsError:
        raise ConfigError(f"output directory {out_dir} is locked by another run") from None
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


# -- evaluation ----------------------------------------------------------------


def evaluate_predictions(pred: Mapping, gold: Mapping, spec: TaskSpec) -> float:
    """Metric over id-aligned predictions; ids must match exactly."""
    missing_pred = sorted(set(gold) - set(pred))
    missing_gold = sorted(set(pred) - set(gold))
    if missing_pred or missing_gold:
        raise DataError(
            "prediction/gold id mismatch; "
            f"missing from predictions: {missing_pred[:10]}, "
            f"missing from gold: {missing_gold[:10]}"
        )
    order = sorted(gold)
    if spec.metric == "jaccard":
        return jaccard(
            np.stack([np.asarray(gold[i]) for i in order]),
            np.stack([np.asarray(pred[i]) for i in order]),
        )
    return pearson(
        np.asarray([pred[i] for i in order], dtype=np.float64),
        np.asarray([gold[i] for i in order], dtype=np.float64),
    )


def gold_mapping(ds: Dataset) -> dict:
    return dict(zip(ds.ids, ds.labels))


def format_report(scores: Mapping[str, float], metric: str) -> str:
    """TSV report: one row per entry plus a macro-average row when there
    are several, using the truncation reporting rule."""
    lines = ["name\tmetric\traw\treported"]
    for name in scores:
        lines.append(f"{name}\t{metric}\t{scores[name]!r}\t{truncate_score(scores[name])}")
    if len(scores) > 1:
        avg = macro_average(list(scores.values()))
        lines.append(f"macro-average\t{metric}\t{avg!r}\t{truncate_score(avg)}")
    return "\n".join(lines) + "\n"


# -- head training stages ------------------------------------------------------


def ordinal_to_unit(labels: np.ndarray, class_values: Sequence[int]) -> np.ndarray:
    """Map ordinal classes onto [0, 1] regression targets."""
    lo, hi = min(class_values), max(class_values)
    return (labels.astype(np.float64) - lo) / (hi - lo)


def head_config_from(cfg: RunConfig, spec: TaskSpec) -> RegressionConfig | MultiLabelConfig:
    """[head] settings; for EI tasks, unset keys fall back to the
    per-emotion training presets."""
    if spec.is_multilabel:
        return MultiLabelConfig(
            learning_rate=cfg.head_learning_rate,
            batch_size=cfg.head_batch_size,
            epochs=cfg.head_epochs,
            copies=cfg.head_copies,
            hidden_dim=cfg.head_hidden,
            seed=cfg.seed,
        )
    explicit = {key for key, _ in cfg.raw_items}
    base = regression_config_for(spec.emotion)
    return RegressionConfig(
        learning_rate=cfg.head_learning_rate
        if "head.learning_rate" in explicit else base.learning_rate,
        batch_size=cfg.head_batch_size if "head.batch_size" in explicit else base.batch_size,
        epochs=cfg.head_epochs if "head.epochs" in explicit else base.epochs,
        copies=cfg.head_copies,
        seed=cfg.seed,
    )


def save_head(path, head, standardizer: Standardizer, names: Sequence[str],
              spec: TaskSpec, cfg: RunConfig) -> None:
    extra = {
        "head_kind": "multilabel" if spec.is_multilabel else "regression",
        "feature_names": list(names),
        "standardizer_mean": standardizer.mean.tolist(),
        "standardizer_sd": standardizer.sd.tolist(),
        "d_in": head.d_in,
        "copies": head.copies,
    }
    if spec.is_multilabel:
        extra["hidden_dim"] = head.hidden_dim
        extra["n_labels"] = head.n_labels
    save_checkpoint(path, head.parameters(), seed=cfg.seed, config_digest=cfg.digest, extra=extra)


def load_head(path):
    payload = load_checkpoint(path)
    extra = payload["extra"]
    if extra["head_kind"] == "multilabel":
        head = MultiLabelHead(
            d_in=extra["d_in"], n_labels=extra["n_labels"],
            hidden_dim=extra["hidden_dim"], copies=extra["copies"],
        )
    else:
        head = VotingRegressionHead(d_in=extra["d_in"], copies=extra["copies"])
    restore_params(head.parameters(), payload)
    standardizer = Standardizer(
        mean=np.asarray(extra["standardizer_mean"]),
        sd=np.asarray(extra["standardizer_sd"]),
    )
    return head, standardizer, extra["feature_names"]


# -- full pipeline ----------------------------------------------------------------


def run_pipeline(cfg: RunConfig, spec: TaskSpec) -> dict:
    """clean -> featurize (with pruning) -> standardize -> train head ->
    (ordinal tasks) calibrate -> predict -> evaluate.

    Returns artifact paths and the evaluation score. Prediction and
    evaluation run on the test set when configured, else on train.
    """
    if not cfg.train:
        raise ConfigError("config lacks data.train")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, object] = {}
    with run_lock(out):
        stage = "ingest"
        try:
            train_ds = ingest_task(cfg.train, spec)
            eval_ds = ingest_task(cfg.test, spec) if cfg.test else train_ds

            stage = "clean"
            train_tweets = clean_tweets(train_ds)
            eval_tweets = clean_tweets(eval_ds) if cfg.test else train_tweets
            cleaned_path = out / "cleaned_train.tsv"
            write_cleaned_tsv(cleaned_path, train_tweets)
            write_meta(cleaned_path, cfg, "clean")
            artifacts["cleaned"] = cleaned_path

            stage = "featurize"
            bundles = load_hidden_bundles(cfg)
            train_rows = featurize_tweets(train_tweets, cfg, bundles)
            retained = prune_sparse(train_rows, min_support=cfg.min_support)
            if not retained:
                raise DataError(
                    f"no feature appears in at least {cfg.min_support} tweets; "
                    "lower features.min_support"
                )
            train_rows = [select_features(r, retained) for r in train_rows]
            names, train_x = feature_matrix(train_rows)
            eval_rows = [
                select_features(r, retained)
                for r in featurize_tweets(eval_tweets, cfg, bundles)
            ]
            _, eval_x = feature_matrix(eval_rows)

            features_path = out / "features_train.csv"
            write_feature_csv(features_path, train_ds.ids, names, train_x)
            write_meta(features_path, cfg, "featurize")
            groups_path = out / "feature_groups.tsv"
            write_groups_tsv(groups_path, names, train_rows[0].groups)
            write_meta(groups_path, cfg, "featurize")
            if cfg.test:
                eval_features_path = out / "features_test.csv"
                write_feature_csv(eval_features_path, eval_ds.ids, names, eval_x)
                write_meta(eval_features_path, cfg, "featurize")
            artifacts["features"] = features_path

            standardizer = Standardizer.fit(train_x, names=names)
            train_z = standardizer.transform(train_x)
            eval_z = standardizer.transform(eval_x)

            stage = "train-head"
            head_cfg = head_config_from(cfg, spec)
            if spec.is_multilabel:
                head = MultiLabelHead(
                    d_in=len(names), n_labels=train_ds.labels.shape[1],
                    hidden_dim=head_cfg.hidden_dim, copies=head_cfg.copies, seed=cfg.seed,
                )
                train_multilabel(head, train_z, train_ds.labels.astype(np.float64), head_cfg)
            else:
                y = (
                    ordinal_to_unit(train_ds.labels, spec.class_values)
                    if spec.is_ordinal else train_ds.labels
                )
                head = VotingRegressionHead(d_in=len(names), copies=head_cfg.copies, seed=cfg.seed)
                train_regression(head, train_z, y, head_cfg)
            head_path = out / "head.ckpt.json"
            save_head(head_path, head, standardizer, names, spec, cfg)
            write_meta(head_path, cfg, "train-head")
            artifacts["head"] = head_path

            thresholds = None
            if spec.is_ordinal:
                stage = "calibrate"
                train_scores = head.predict(train_z)
                thresholds = grid_search_thresholds(
                    train_scores, train_ds.labels, spec.class_values,
                    resolution=cfg.calibration_resolution,
                    beam_width=cfg.calibration_beam_width,
                )
                thresholds_path = out / "thresholds.json"
                thresholds_path.write_text(
                    json.dumps(thresholds.as_dict(), sort_keys=True, separators=(",", ":")),
                    encoding="utf-8",
                )
                write_meta(thresholds_path, cfg, "calibrate")
                artifacts["thresholds"] = thresholds_path

            stage = "predict"
            if spec.is_multilabel:
                pred_values = head.predict(eval_z)
            else:
                scores = head.predict(eval_z)
                pred_values = apply_thresholds(scores, thresholds) if spec.is_ordinal else scores
            pred_path = out / "predictions.tsv"
            write_predictions(pred_path, eval_ds.ids, pred_values, spec)
            write_meta(pred_path, cfg, "predict")
            artifacts["predictions"] = pred_path

            stage = "evaluate"
            score = evaluate_predictions(
                read_predictions(pred_path, spec), gold_mapping(eval_ds), spec
            )
            report_path = out / "report.tsv"
            report_path.write_text(
                format_report({spec.task: score}, spec.metric), encoding="utf-8"
            )
            write_meta(report_path, cfg, "evaluate")
            artifacts["report"] = report_path
            artifacts["score"] = score
        except (DataError, ConfigError, NumericalError) as e:
            raise type(e)(f"[stage {stage}] {e}") from e
        except Exception as e:
            raise RuntimeError(f"[stage {stage}] {e}") from e
    return artifacts


# -- ASC training entry point ------------------------------------------------------


def train_asc_from_config(cfg: RunConfig) -> Path:
    """Train the combined classifier on a 3-class corpus and checkpoint
    it (with vocabularies) for hidden-feature extraction."""
    if not cfg.train:
        raise ConfigError("config lacks data.train")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds = ingest_three_class(cfg.train, compress_5to3=cfg.compress_5to3)
    logger.info("class distribution: %s", three_class_distribution(ds))
    tweets = clean_tweets(ds)
    vocabs = build_vocabularies(tweets, min_count=cfg.asc_min_count)
    sub_cfgs = [
        SubModelConfig(
            slot=slot, word_embed_dim=dim, cleaning_variant=variant,
            pos_embed_dim=cfg.asc_pos_dim, seq_len=cfg.asc_seq_len,
            gru_hidden=cfg.asc_gru_hidden, penultimate_dim=cfg.asc_penultimate,
            filter_widths=cfg.asc_filter_widths,
            filters_per_width=cfg.asc_filters_per_width,
        )
        for slot, dim, variant in (
            ("w2v", cfg.asc_word_dim_simple, "simple"),
            ("w2v", cfg.asc_word_dim_complex, "complex"),
            ("ft", cfg.asc_word_dim_simple, "simple"),
            ("ft", cfg.asc_word_dim_complex, "complex"),
        )
    ]
    word_vectors = {}
    emb_rng = derive_rng(cfg.seed, "embedding-files")
    for c in sub_cfgs:
        source = cfg.asc_embeddings_simple if c.cleaning_variant == "simple" else cfg.asc_embeddings_complex
        if source:
            word_vectors[c.key] = load_embedding_file(
                source, vocabs[c.cleaning_variant], c.word_embed_dim, emb_rng
            )
    model = CombinedClassifier(
        sub_cfgs, vocabs, combiner_hidden=cfg.asc_combiner_hidden,
        seed=cfg.seed, word_vectors=word_vectors or None,
    )
    batch = encode_tweets(tweets, vocabs, seq_len=cfg.asc_seq_len)
    train_cfg = ClassifierTrainConfig(
        optimizer=cfg.asc_optimizer, learning_rate=cfg.asc_learning_rate,
        batch_size=cfg.asc_batch_size, epochs=cfg.asc_epochs, seed=cfg.seed,
    )
    train_classifier(model, batch, one_hot_labels(ds.labels.tolist()), train_cfg)
    path = out / "asc.ckpt.json"
    save_hidden_model(
        path, model, vocabs, layer="combiner_hidden", prefix="ASC",
        seed=cfg.seed, config_digest=cfg.digest,
    )
    write_meta(path, cfg, "train-asc")
    return path
