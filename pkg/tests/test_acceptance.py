"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or
in failure output) and enforces both the stated tolerance and the stated
runtime bound. Run the whole gate with:

    pytest tests/test_acceptance.py -v -s
"""

import itertools
import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from tweetmood import autodiff as ad
from tweetmood import nn
from tweetmood.autodiff import Tensor, grad_check
from tweetmood.calib import (
    grid_search_thresholds,
    jaccard,
    macro_average,
    pearson,
    pratt_importance,
    truncate_score,
)
from tweetmood.classifier import (
    ClassifierTrainConfig,
    CombinedClassifier,
    DistantSchedule,
    SubModel,
    SubModelConfig,
    train_classifier,
    accuracy,
)
from tweetmood.heads import (
    MultiLabelConfig,
    MultiLabelHead,
    RegressionConfig,
    VotingRegressionHead,
    score_map_f,
    train_multilabel,
    train_regression,
)
from tweetmood.nn import ConvFilterBank, GRUCell
from tweetmood.resources import default_dictionaries
from tweetmood.textpipe import RawTweet, clean

from synthetic import encoded_sentiment_batch, toy_sub_configs


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:2d}: FAIL  {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE {number:2d}: PASS  {description} ({elapsed:.2f}s)")
    assert elapsed < budget_seconds, (
        f"criterion {number} exceeded its {budget_seconds}s budget: {elapsed:.2f}s"
    )


def test_criterion_01_cleaning_golden():
    with criterion(1, "two-track cleaning golden round trip", 1.0):
        dicts = default_dictionaries()
        ct = clean(
            RawTweet("g", "@USAIRWAYS is right :-) ! Flying in September #NiceToFly"),
            dicts,
        )
        assert " ".join(ct.simple_surfaces()) == (
            "twitter-entity is right happy-smily ! flying in september nice to fly"
        )
        assert " ".join(ct.complex_surfaces()) == (
            "twitter-entity be right happy-smily ! fly in _date_ pleasant to fly"
        )


def test_criterion_02_gradient_suite():
    with criterion(2, "finite-difference gradient suite for all layers and losses", 60.0):
        worst = 0.0
        rng = np.random.default_rng(0)

        def bump(err):
            nonlocal worst
            worst = max(worst, err)

        # dense (with and without bias)
        x = Tensor(rng.standard_normal((4, 3)), requires_grad=True)
        w = Tensor(rng.standard_normal((3, 2)), requires_grad=True)
        b = Tensor(rng.standard_normal(2), requires_grad=True)
        bump(grad_check(lambda: ad.tensor_sum(nn.dense(x, w, b)), [x, w, b]))
        bump(grad_check(lambda: ad.tensor_sum(ad.mul(nn.dense(x, w), nn.dense(x, w))), [x, w]))

        # activations
        for fn in (ad.tanh, ad.sigmoid):
            t = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
            bump(grad_check(lambda: ad.tensor_sum(ad.mul(fn(t), rng.standard_normal((3, 4)))), [t]))
        t = Tensor(rng.standard_normal((3, 5)), requires_grad=True)
        weights = rng.standard_normal((3, 5))
        bump(grad_check(lambda: ad.tensor_sum(ad.mul(ad.softmax(t), weights)), [t]))

        # embedding lookup (repeated ids, padding row)
        table = Tensor(rng.standard_normal((5, 3)), requires_grad=True)
        ids = np.array([[1, 2, 1, 0], [4, 4, 3, 2]])
        bump(grad_check(
            lambda: ad.tensor_sum(ad.mul(ad.embedding_lookup(table, ids),
                                         ad.embedding_lookup(table, ids))),
            [table],
        ))

        # bi-directional GRU (T=3, h=2, d_in=2)
        fw, bw = GRUCell.create(rng, 2, 2), GRUCell.create(rng, 2, 2)
        seq = Tensor(rng.standard_normal((3, 2)), requires_grad=True)
        params = [seq] + list(fw.parameters().values()) + list(bw.parameters().values())
        bump(grad_check(lambda: ad.tensor_sum(nn.bi_gru(seq, fw, bw)), params, max_coords=12))

        # conv + max-pool attention (T=7, D=3, widths 1..6, 2 filters each)
        bank = ConvFilterBank.create(rng, 3, (1, 2, 3, 4, 5, 6), 2)
        h = Tensor(rng.standard_normal((7, 3)), requires_grad=True)
        bump(grad_check(
            lambda: ad.tensor_sum(nn.conv_maxpool_attention(h, bank)),
            [h] + list(bank.parameters().values()),
            max_coords=10,
        ))

        # losses
        logits = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        onehot = np.eye(4)[[0, 2, 1]]
        bump(grad_check(lambda: nn.cross_entropy(ad.softmax(logits), onehot), [logits]))
        pred = Tensor(rng.standard_normal(6), requires_grad=True)
        bump(grad_check(lambda: nn.mse(pred, rng.standard_normal(6)), [pred]))
        raw = Tensor(rng.standard_normal((2, 5)), requires_grad=True)
        targets = (rng.uniform(size=(2, 5)) > 0.5).astype(float)
        bump(grad_check(lambda: nn.tanimoto(ad.sigmoid(raw), targets), [raw]))

        assert worst < 1e-3, f"max relative gradient error {worst:.2e}"


def test_criterion_03_architecture_shapes():
    with criterion(3, "architecture shape chain assertions", 1.0):
        sub = SubModel(SubModelConfig(), vocab_size=40, seed=0)
        assert sub.shape_chain() == (40, (40, 208), (40, 400), 600, 30, 3)

        _, vocabs, _, _ = encoded_sentiment_batch()
        combined = CombinedClassifier(toy_sub_configs(penultimate_dim=30), vocabs, seed=0)
        assert combined.combiner_shape() == (120, 25, 3)

        valence_head = VotingRegressionHead(d_in=212, copies=300)
        assert valence_head.w.shape == (212, 900)

        multilabel_head = MultiLabelHead(d_in=217)
        assert multilabel_head.w1.shape == (217, 100)
        assert multilabel_head.w2.shape == (100, 3300)
        assert multilabel_head.predict_proba(np.zeros((1, 217))).shape == (1, 11)


def test_criterion_04_tanimoto_formula():
    with criterion(4, "Tanimoto loss matches the closed-form definition", 1.0):
        eps = 1e-7
        got = nn.tanimoto(Tensor(np.array([0.5, 0.5])), np.array([1.0, 0.0])).item()
        independent = 1.0 - 0.5 / (1.5 + eps)
        assert abs(got - independent) < 1e-9

        onehot = np.array([0.0, 1.0, 0.0])
        self_sim = nn.tanimoto(Tensor(onehot), onehot).item()
        assert self_sim == 1.0 - 1.0 / (1.0 + eps)

        disjoint = nn.tanimoto(Tensor(np.array([1.0, 0.0])), np.array([0.0, 1.0])).item()
        assert disjoint == 1.0


def test_criterion_05_score_map():
    with criterion(5, "score map f on certainty and uniform inputs", 1.0):
        assert score_map_f((1.0, 0.0, 0.0)) == 1.0
        assert score_map_f((0.0, 1.0, 0.0)) == 0.5
        assert score_map_f((0.0, 0.0, 1.0)) == 0.0
        assert score_map_f((1 / 3, 1 / 3, 1 / 3)) == 0.5


def _oracle_thresholds(scores, gold, class_values):
    """Independent brute force: enumerate all midpoint cut subsets in
    lexicographic order; score with numpy's corrcoef."""
    distinct = np.unique(scores)
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    vals = np.asarray(class_values, dtype=float)
    best_cuts, best_r = None, -np.inf
    for combo in itertools.combinations(mids, len(class_values) - 1):
        cuts = np.asarray(combo)
        assign = vals[(scores[:, None] >= cuts[None, :]).sum(axis=1)]
        if np.all(assign == assign[0]):
            continue
        r = float(np.corrcoef(assign, gold)[0, 1])
        if r > best_r:
            best_cuts, best_r = combo, r
    return best_cuts, best_r


def test_criterion_06_calibration_matches_brute_force():
    with criterion(6, "grid search equals exhaustive brute force on 50 instances", 120.0):
        rng = np.random.default_rng(2024)
        class_sets = {2: (0, 1), 4: (0, 1, 2, 3), 7: (-3, -2, -1, 0, 1, 2, 3)}
        checked = 0
        while checked < 50:
            k = int(rng.choice([2, 4, 7]))
            values = class_sets[k]
            n = int(rng.integers(max(k, 8), 21))
            scores = rng.uniform(size=n)
            gold = np.asarray(values)[rng.integers(0, k, size=n)]
            if len(np.unique(gold)) < 2:
                continue
            result = grid_search_thresholds(scores, gold, class_values=values)
            oracle_cuts, oracle_r = _oracle_thresholds(scores, gold, values)
            got_r = pearson(
                np.asarray(values)[(scores[:, None] >= np.asarray(result.cuts)).sum(axis=1)],
                gold,
            )
            assert abs(got_r - oracle_r) < 1e-12, (k, n, got_r, oracle_r)
            assert result.cuts == pytest.approx(oracle_cuts, abs=0), (k, n)
            checked += 1


def test_criterion_07_pratt_identity():
    with criterion(7, "Pratt importance shares sum to one; single feature exact", 10.0):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p = int(rng.integers(2, 11))
            x = rng.standard_normal((200, p))
            x = (x - x.mean(axis=0)) / x.std(axis=0)
            y = x @ rng.standard_normal(p) + rng.normal(0, 0.5, 200)
            report = pratt_importance(x, y)
            assert abs(report.d.sum() - 1.0) < 1e-6

        x1 = rng.standard_normal((200, 1))
        x1 = (x1 - x1.mean(axis=0)) / x1.std(axis=0)
        y1 = 2.0 * x1[:, 0] + rng.normal(0, 0.3, 200)
        single = pratt_importance(x1, y1)
        assert single.d[0] == 1.0


def test_criterion_08_memorization_smoke_tests():
    with criterion(8, "memorization: classifier, valence head, multi-label head", 600.0):
        # (a) combined classifier memorizes a 20-tweet 3-class corpus
        _, vocabs, batch, y = encoded_sentiment_batch()
        model = CombinedClassifier(toy_sub_configs(), vocabs, combiner_hidden=8, seed=0)
        train_classifier(
            model, batch, y,
            ClassifierTrainConfig(learning_rate=0.1, batch_size=20, epochs=200, seed=0),
        )
        assert accuracy(model, batch, y) == 1.0

        # (b) valence head reaches MSE < 1e-3 on a 30-sample regression set
        rng = np.random.default_rng(8)
        x = rng.normal(size=(30, 5))
        x = (x - x.mean(axis=0)) / x.std(axis=0)
        target = np.clip(0.5 + x @ np.array([0.15, -0.1, 0.05, 0.2, -0.05]), 0.0, 1.0)
        head = VotingRegressionHead(d_in=5, copies=30, seed=9)
        history = train_regression(
            head, x, target,
            RegressionConfig(learning_rate=0.01, epochs=400, batch_size=400, seed=9),
        )
        assert history[-1] < 1e-3

        # (c) multi-label head reaches Jaccard > 0.95 on a 20-sample toy set
        xm = rng.normal(size=(20, 6))
        xm = (xm - xm.mean(axis=0)) / xm.std(axis=0)
        ym = (xm @ rng.normal(size=(6, 11)) > 0).astype(float)
        ml = MultiLabelHead(d_in=6, copies=20, seed=16)
        train_multilabel(
            ml, xm, ym,
            MultiLabelConfig(learning_rate=0.01, batch_size=10, epochs=500, seed=16),
        )
        assert jaccard(ym.astype(int), ml.predict(xm)) > 0.95


def test_criterion_09_freeze_contract():
    with criterion(9, "embeddings frozen for one epoch, trainable afterwards", 60.0):
        _, vocabs, batch, y = encoded_sentiment_batch()
        model = CombinedClassifier(toy_sub_configs(), vocabs, combiner_hidden=8, seed=4)
        before = {k: t.data.copy() for k, t in model.embedding_tables().items()}
        cfg = ClassifierTrainConfig(learning_rate=0.05, batch_size=20, seed=4)

        train_classifier(model, batch, y, cfg,
                         schedule=DistantSchedule(frozen_epochs=1, trainable_epochs=0))
        for k, t in model.embedding_tables().items():
            assert t.data.tobytes() == before[k].tobytes(), f"{k} changed while frozen"

        train_classifier(model, batch, y, cfg,
                         schedule=DistantSchedule(frozen_epochs=0, trainable_epochs=1))
        changed = [
            k for k, t in model.embedding_tables().items()
            if t.data.tobytes() != before[k].tobytes()
        ]
        assert changed, "no embedding table changed in the trainable phase"


def test_criterion_10_pipeline_determinism(tmp_path):
    with criterion(10, "identical config+seed reruns are byte-identical", 120.0):
        from tweetmood.config import parse_config
        from tweetmood.pipeline import TaskSpec, run_pipeline
        from synthetic import NEGATIVE_TEXTS, NEUTRAL_TEXTS, POSITIVE_TEXTS

        texts = POSITIVE_TEXTS + NEGATIVE_TEXTS + NEUTRAL_TEXTS
        scores = [0.9, 0.85, 0.8, 0.95, 0.75, 0.9, 0.8,
                  0.1, 0.15, 0.2, 0.05, 0.25, 0.1, 0.2,
                  0.5, 0.45, 0.55, 0.5, 0.5, 0.45]
        data = tmp_path / "vreg.tsv"
        data.write_text(
            "\n".join(
                f"v{i}\t{t}\tvalence\t{s!r}" for i, (t, s) in enumerate(zip(texts, scores))
            ) + "\n",
            encoding="utf-8",
        )
        ini = tmp_path / "run.ini"
        ini.write_text(
            "\n".join([
                "[run]", "seed = 21", f"out_dir = {tmp_path / 'out'}",
                "[data]", f"train = {data}",
                "[features]", "min_support = 2",
                "[head]", "learning_rate = 0.01", "epochs = 25", "copies = 15",
            ]) + "\n",
            encoding="utf-8",
        )
        captured = []
        for name in ("one", "two"):
            import dataclasses

            cfg = dataclasses.replace(parse_config(ini), out_dir=str(tmp_path / name))
            artifacts = run_pipeline(cfg, TaskSpec("V-reg"))
            captured.append({
                key: Path(artifacts[key]).read_bytes()
                for key in ("features", "head", "predictions")
            })
        assert captured[0]["features"] == captured[1]["features"]
        assert captured[0]["head"] == captured[1]["head"]
        assert captured[0]["predictions"] == captured[1]["predictions"]


def test_criterion_11_metric_arithmetic():
    with criterion(11, "macro-average reporting and metric hand values", 1.0):
        avg = macro_average([0.748, 0.670, 0.748, 0.721])
        assert avg == pytest.approx(0.72175, abs=1e-12)
        assert truncate_score(avg) == 0.721

        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)
        gold = np.array([[1, 0, 1]])
        pred = np.array([[1, 1, 0]])
        assert jaccard(gold, pred) == pytest.approx(1 / 3, abs=1e-12)
        assert jaccard(gold, gold) == 1.0
