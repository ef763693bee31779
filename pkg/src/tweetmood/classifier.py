"""The GRU/CNN tweet sentiment classifier and its training schedules.

A sub-model maps a padded sequence of word ids and POS-tag ids through
word and tag embeddings, a bi-directional GRU, multi-width convolutional
attention with max-over-time pooling, a tanh penultimate layer and a
3-way softmax. The combined classifier runs four sub-models (two per
cleaning variant, nominally word2vec- and fasttext-initialized slots),
concatenates their penultimate layers and stacks a small tanh combiner
on top.

Distant supervision reuses a single sub-model per emotion with a
freeze-then-unfreeze schedule: one epoch with embeddings fixed, then six
with them trainable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .lexfeat import FeatureVector
from .nn import ConvFilterBank, GRUCell, bi_gru, conv_maxpool_attention, cross_entropy, dense, derive_rng, glorot_uniform
from .optim import make_optimizer
from .textpipe import TAGSET, CleanedTweet

PAD_ID = 0
UNK_ID = 1
POS_VOCAB_SIZE = len(TAGSET) + 1  # 25 tags + padding row

CLEANING_VARIANTS = ("simple", "complex")
EMBEDDING_SLOTS = ("w2v", "ft")

# Sentiment class order everywhere: index 0 positive, 1 neutral, 2 negative.
SENTIMENT_CLASSES = ("positive", "neutral", "negative")
LABEL_TO_INDEX = {1: 0, 0: 1, -1: 2}

# Distant-supervision labels reuse the 3-way head with the middle slot
# unused: has-keyword tweets take the first class, the rest the last.
DISTANT_WITH_INDEX = 0
DISTANT_WITHOUT_INDEX = 2

_POS_TO_ID = {tag: i + 1 for i, tag in enumerate(TAGSET)}


@dataclass(frozen=True)
class SubModelConfig:
    """Dimensions of one sub-model.

    The canonical geometry pairs 200-dim word embeddings with the simple
    cleaning variant and 150-dim with the complex variant; that pairing
    is enforced whenever those dimensions are used. Scaled-down toy
    configurations are allowed for tests and gradient checks.
    """

    slot: str = "w2v"
    word_embed_dim: int = 200
    cleaning_variant: str = "simple"
    pos_embed_dim: int = 8
    seq_len: int = 40
    gru_hidden: int = 200
    penultimate_dim: int = 30
    num_classes: int = 3
    filter_widths: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    filters_per_width: int = 100

    def validate(self) -> None:
        if self.slot not in EMBEDDING_SLOTS:
            raise ValueError(f"unknown embedding slot {self.slot!r}")
        if self.cleaning_variant not in CLEANING_VARIANTS:
            raise ValueError(f"unknown cleaning variant {self.cleaning_variant!r}")
        pairing = {200: "simple", 150: "complex"}
        expected = pairing.get(self.word_embed_dim)
        if expected is not None and self.cleaning_variant != expected:
            raise ValueError(
                f"embedding dim {self.word_embed_dim} is paired with the "
                f"{expected!r} variant, not {self.cleaning_variant!r}"
            )
        if self.seq_len < max(self.filter_widths):
            raise ValueError("seq_len shorter than the widest attention filter")

    @property
    def key(self) -> str:
        return f"{self.slot}_{self.word_embed_dim}"

    @property
    def gru_input_dim(self) -> int:
        return self.word_embed_dim + self.pos_embed_dim

    @property
    def attention_dim(self) -> int:
        return len(self.filter_widths) * self.filters_per_width


def canonical_sub_configs(**overrides) -> list[SubModelConfig]:
    """The four canonical sub-model slots."""
    return [
        SubModelConfig(slot="w2v", word_embed_dim=200, cleaning_variant="simple", **overrides),
        SubModelConfig(slot="w2v", word_embed_dim=150, cleaning_variant="complex", **overrides),
        SubModelConfig(slot="ft", word_embed_dim=200, cleaning_variant="simple", **overrides),
        SubModelConfig(slot="ft", word_embed_dim=150, cleaning_variant="complex", **overrides),
    ]


# -- vocabulary and encoding ----------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-id map; id 0 is padding, id 1 the unknown-word row."""

    token_to_id: Mapping[str, int]

    @classmethod
    def from_corpus(cls, token_seqs: Sequence[Sequence[str]], min_count: int = 1) -> "Vocabulary":
        counts: dict[str, int] = {}
        for seq in token_seqs:
            for tok in seq:
                counts[tok] = counts.get(tok, 0) + 1
        # Deterministic id assignment: frequency, then lexicographic.
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        mapping = {tok: i + 2 for i, (tok, n) in enumerate(ordered) if n >= min_count}
        return cls(token_to_id=mapping)

    @property
    def size(self) -> int:
        return len(self.token_to_id) + 2

    def encode(self, tokens: Sequence[str], seq_len: int) -> np.ndarray:
        ids = [self.token_to_id.get(t, UNK_ID) for t in tokens[:seq_len]]
        ids.extend([PAD_ID] * (seq_len - len(ids)))
        return np.asarray(ids, dtype=np.int64)


def encode_pos(tags: Sequence[str], seq_len: int) -> np.ndarray:
    ids = [_POS_TO_ID[t] for t in tags[:seq_len]]
    ids.extend([PAD_ID] * (seq_len - len(ids)))
    return np.asarray(ids, dtype=np.int64)


EncodedBatch = dict[str, tuple[np.ndarray, np.ndarray]]


def encode_tweets(
    tweets: Sequence[CleanedTweet],
    vocabs: Mapping[str, Vocabulary],
    seq_len: int,
) -> EncodedBatch:
    """Encode the cleaning variants covered by ``vocabs`` into padded
    (word ids, POS ids) arrays keyed by variant."""
    batch: EncodedBatch = {}
    for variant in (v for v in CLEANING_VARIANTS if v in vocabs):
        words = np.stack([
            vocabs[variant].encode([t.surface for t in getattr(tw, variant)], seq_len)
            for tw in tweets
        ])
        pos = np.stack([
            encode_pos([t.pos for t in getattr(tw, variant)], seq_len) for tw in tweets
        ])
        batch[variant] = (words, pos)
    return batch


def slice_batch(batch: EncodedBatch, idx: np.ndarray) -> EncodedBatch:
    return {v: (w[idx], p[idx]) for v, (w, p) in batch.items()}


def batch_size_of(batch: EncodedBatch) -> int:
    sizes = {w.shape[0] for w, _ in batch.values()}
    if len(sizes) != 1:
        raise ValueError("inconsistent batch sizes across variants")
    return sizes.pop()


def build_vocabularies(tweets: Sequence[CleanedTweet], min_count: int = 1) -> dict[str, Vocabulary]:
    return {
        variant: Vocabulary.from_corpus(
            [[t.surface for t in getattr(tw, variant)] for tw in tweets], min_count
        )
        for variant in CLEANING_VARIANTS
    }


def load_embedding_file(path, vocab: Vocabulary, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Build an embedding matrix aligned with a vocabulary.

    File format: optional first line ``count dim``, then one
    ``token v1 ... vd`` per line. Vocabulary words missing from the file
    (including the unknown-word row) are randomly initialized.
    """
    scale = 1.0 / np.sqrt(dim)
    table = rng.uniform(-scale, scale, size=(vocab.size, dim))
    table[PAD_ID] = 0.0
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    start = 0
    if lines:
        head = lines[0].split()
        if len(head) == 2 and all(p.isdigit() for p in head):
            if int(head[1]) != dim:
                raise ValueError(f"{path}: embedding dim {head[1]} does not match expected {dim}")
            start = 1
    for lineno, line in enumerate(lines[start:], start + 1):
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise ValueError(f"{path}:{lineno}: expected token and {dim} values")
        token = parts[0]
        idx = vocab.token_to_id.get(token)
        if idx is not None:
            table[idx] = np.asarray([float(v) for v in parts[1:]])
    return table


# -- models -----------------------------------------------------------------


class SubModel:
    """One embeddings -> bi-GRU -> conv attention -> dense stack."""

    def __init__(
        self,
        cfg: SubModelConfig,
        vocab_size: int,
        seed: int = 0,
        word_vectors: np.ndarray | None = None,
    ):
        cfg.validate()
        self.cfg = cfg
        self.embeddings_trainable = True
        rng = derive_rng(seed, f"submodel-{cfg.key}-{cfg.cleaning_variant}")
        if word_vectors is not None:
            if word_vectors.shape != (vocab_size, cfg.word_embed_dim):
                raise ValueError(
                    f"word vectors shape {word_vectors.shape} does not match "
                    f"(vocab={vocab_size}, dim={cfg.word_embed_dim})"
                )
            word_table = word_vectors.copy()
            word_table[PAD_ID] = 0.0
        else:
            scale = 1.0 / np.sqrt(cfg.word_embed_dim)
            word_table = rng.uniform(-scale, scale, size=(vocab_size, cfg.word_embed_dim))
            word_table[PAD_ID] = 0.0
        pos_scale = 1.0 / np.sqrt(cfg.pos_embed_dim)
        pos_table = rng.uniform(-pos_scale, pos_scale, size=(POS_VOCAB_SIZE, cfg.pos_embed_dim))
        pos_table[PAD_ID] = 0.0

        self.word_table = Tensor(word_table, requires_grad=True)
        self.pos_table = Tensor(pos_table, requires_grad=True)
        self.gru_fw = GRUCell.create(rng, cfg.gru_input_dim, cfg.gru_hidden)
        self.gru_bw = GRUCell.create(rng, cfg.gru_input_dim, cfg.gru_hidden)
        self.bank = ConvFilterBank.create(
            rng, 2 * cfg.gru_hidden, cfg.filter_widths, cfg.filters_per_width
        )
        self.w_pen = Tensor(
            glorot_uniform(rng, cfg.attention_dim, cfg.penultimate_dim), requires_grad=True
        )
        self.b_pen = Tensor(np.zeros(cfg.penultimate_dim), requires_grad=True)
        self.w_out = Tensor(
            glorot_uniform(rng, cfg.penultimate_dim, cfg.num_classes), requires_grad=True
        )
        self.b_out = Tensor(np.zeros(cfg.num_classes), requires_grad=True)
        self._assert_shape_chain()

    def _assert_shape_chain(self):
        cfg = self.cfg
        chain = (
            cfg.seq_len,
            (cfg.seq_len, cfg.gru_input_dim),
            (cfg.seq_len, 2 * cfg.gru_hidden),
            self.bank.output_dim,
            self.w_pen.shape[1],
            self.w_out.shape[1],
        )
        assert chain[1][1] == self.gru_fw.wz.shape[0]
        assert chain[2][1] == self.bank.weights[0].shape[0] // self.bank.widths[0]
        assert chain[3] == self.w_pen.shape[0]

    def shape_chain(self) -> tuple:
        """(seq_len, gru input, hidden-state matrix, attention, penultimate, classes)."""
        cfg = self.cfg
        return (
            cfg.seq_len,
            (cfg.seq_len, cfg.gru_input_dim),
            (cfg.seq_len, 2 * cfg.gru_hidden),
            cfg.attention_dim,
            cfg.penultimate_dim,
            cfg.num_classes,
        )

    def embedding_tables(self) -> dict[str, Tensor]:
        return {"word_table": self.word_table, "pos_table": self.pos_table}

    def parameters(
        self, include_embeddings: bool = True, include_head: bool = True
    ) -> dict[str, Tensor]:
        params: dict[str, Tensor] = {}
        if include_embeddings:
            params.update(self.embedding_tables())
        for name, t in self.gru_fw.parameters().items():
            params[f"gru_fw.{name}"] = t
        for name, t in self.gru_bw.parameters().items():
            params[f"gru_bw.{name}"] = t
        params.update(self.bank.parameters())
        params.update({"w_pen": self.w_pen, "b_pen": self.b_pen})
        if include_head:
            # The softmax head only exists in the standalone sub-model;
            # the combined classifier reads the penultimate layer.
            params.update({"w_out": self.w_out, "b_out": self.b_out})
        return params

    def _inputs_for(self, batch: EncodedBatch) -> tuple[np.ndarray, np.ndarray]:
        try:
            return batch[self.cfg.cleaning_variant]
        except KeyError:
            raise ValueError(f"batch lacks the {self.cfg.cleaning_variant!r} variant") from None

    def penultimate(self, batch: EncodedBatch) -> Tensor:
        word_ids, pos_ids = self._inputs_for(batch)
        if word_ids.shape[1] != self.cfg.seq_len:
            raise ValueError(
                f"sequence length {word_ids.shape[1]} does not match config {self.cfg.seq_len}"
            )
        words = ad.embedding_lookup(self.word_table, word_ids, self.embeddings_trainable)
        tags = ad.embedding_lookup(self.pos_table, pos_ids, self.embeddings_trainable)
        x = ad.concat([words, tags], axis=2)
        states = bi_gru(x, self.gru_fw, self.gru_bw)
        pooled = conv_maxpool_attention(states, self.bank)
        return ad.tanh(dense(pooled, self.w_pen, self.b_pen))

    def forward(self, batch: EncodedBatch) -> Tensor:
        return ad.softmax(dense(self.penultimate(batch), self.w_out, self.b_out), axis=-1)


class CombinedClassifier:
    """Four sub-models joined by a small dense combiner."""

    def __init__(
        self,
        sub_configs: Sequence[SubModelConfig],
        vocabs: Mapping[str, Vocabulary],
        combiner_hidden: int = 25,
        seed: int = 0,
        word_vectors: Mapping[str, np.ndarray] | None = None,
    ):
        sub_configs = list(sub_configs)
        if len(sub_configs) != 4:
            raise ValueError(f"expected exactly 4 sub-model configs, got {len(sub_configs)}")
        combos = {(c.slot, c.cleaning_variant) for c in sub_configs}
        if len(combos) != 4:
            raise ValueError("sub-model configs must cover each slot/variant combination once")
        if len({c.penultimate_dim for c in sub_configs}) != 1:
            raise ValueError("sub-models must share a penultimate dimension")
        if len({c.num_classes for c in sub_configs}) != 1:
            raise ValueError("sub-models must share the class count")

        self.submodels: dict[str, SubModel] = {}
        for i, cfg in enumerate(sub_configs):
            vectors = word_vectors.get(cfg.key) if word_vectors else None
            self.submodels[cfg.key] = SubModel(
                cfg, vocabs[cfg.cleaning_variant].size, seed=seed + i, word_vectors=vectors
            )
        concat_dim = 4 * sub_configs[0].penultimate_dim
        n_classes = sub_configs[0].num_classes
        rng = derive_rng(seed, "combiner-init")
        self.w1 = Tensor(glorot_uniform(rng, concat_dim, combiner_hidden), requires_grad=True)
        self.b1 = Tensor(np.zeros(combiner_hidden), requires_grad=True)
        self.w2 = Tensor(glorot_uniform(rng, combiner_hidden, n_classes), requires_grad=True)
        self.b2 = Tensor(np.zeros(n_classes), requires_grad=True)

    @property
    def embeddings_trainable(self) -> bool:
        return next(iter(self.submodels.values())).embeddings_trainable

    @embeddings_trainable.setter
    def embeddings_trainable(self, flag: bool) -> None:
        for sm in self.submodels.values():
            sm.embeddings_trainable = flag

    def combiner_shape(self) -> tuple[int, int, int]:
        return (self.w1.shape[0], self.w1.shape[1], self.w2.shape[1])

    def embedding_tables(self) -> dict[str, Tensor]:
        out = {}
        for key, sm in self.submodels.items():
            for name, t in sm.embedding_tables().items():
                out[f"{key}.{name}"] = t
        return out

    def parameters(self, include_embeddings: bool = True) -> dict[str, Tensor]:
        params: dict[str, Tensor] = {}
        for key, sm in self.submodels.items():
            for name, t in sm.parameters(include_embeddings, include_head=False).items():
                params[f"{key}.{name}"] = t
        params.update({"combiner.w1": self.w1, "combiner.b1": self.b1,
                       "combiner.w2": self.w2, "combiner.b2": self.b2})
        return params

    def combiner_hidden(self, batch: EncodedBatch) -> Tensor:
        parts = [sm.penultimate(batch) for sm in self.submodels.values()]
        return ad.tanh(dense(ad.concat(parts, axis=1), self.w1, self.b1))

    def forward(self, batch: EncodedBatch) -> Tensor:
        return ad.softmax(dense(self.combiner_hidden(batch), self.w2, self.b2), axis=-1)


# -- training -----------------------------------------------------------------


@dataclass(frozen=True)
class DistantSchedule:
    """Freeze-then-unfreeze: embeddings fixed for the first phase."""

    frozen_epochs: int = 1
    trainable_epochs: int = 6

    def __post_init__(self):
        if self.frozen_epochs < 0 or self.trainable_epochs < 0:
            raise ValueError("epoch counts must be non-negative")


@dataclass(frozen=True)
class ClassifierTrainConfig:
    optimizer: str = "adagrad"
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 10
    seed: int = 0


def one_hot_labels(labels: Sequence[int]) -> np.ndarray:
    """Map {-1, 0, 1} sentiment labels to one-hot rows ordered
    (positive, neutral, negative)."""
    out = np.zeros((len(labels), 3))
    for i, lab in enumerate(labels):
        if lab not in LABEL_TO_INDEX:
            raise ValueError(f"sentiment label {lab!r} outside {{-1, 0, 1}}")
        out[i, LABEL_TO_INDEX[lab]] = 1.0
    return out


def _run_epochs(model, batch, y, cfg, epochs, include_embeddings, rng, history, phase):
    params = list(model.parameters(include_embeddings=include_embeddings).values())
    opt = make_optimizer(cfg.optimizer, params, lr=cfg.learning_rate)
    n = y.shape[0]
    for _ in range(epochs):
        losses = []
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            opt.zero_grad()
            loss = cross_entropy(model.forward(slice_batch(batch, idx)), y[idx])
            loss.backward()
            opt.step()
            losses.append(loss.item())
        history.append({"phase": phase, "loss": float(np.mean(losses))})


def train_classifier(
    model,
    batch: EncodedBatch,
    y_onehot: np.ndarray,
    cfg: ClassifierTrainConfig,
    schedule: DistantSchedule | None = None,
) -> list[dict]:
    """Cross-entropy training; with a schedule, embeddings stay frozen
    (and excluded from the optimizer) for the first phase."""
    n = batch_size_of(batch)
    if n == 0:
        raise ValueError("empty training data")
    if y_onehot.shape[0] != n:
        raise ValueError("labels do not match the batch size")
    rng = derive_rng(cfg.seed, "classifier-batches")
    history: list[dict] = []
    if schedule is None:
        _run_epochs(model, batch, y_onehot, cfg, cfg.epochs, True, rng, history, "plain")
        return history
    model.embeddings_trainable = False
    _run_epochs(model, batch, y_onehot, cfg, schedule.frozen_epochs, False, rng, history, "frozen")
    model.embeddings_trainable = True
    _run_epochs(model, batch, y_onehot, cfg, schedule.trainable_epochs, True, rng, history, "trainable")
    return history


def accuracy(model, batch: EncodedBatch, y_onehot: np.ndarray) -> float:
    probs = model.forward(batch).data
    return float((probs.argmax(axis=1) == y_onehot.argmax(axis=1)).mean())


# -- distant supervision datasets ------------------------------------------------


def build_distant_datasets(
    corpus: Sequence[CleanedTweet],
    keywords: Mapping[str, Sequence[str]],
) -> dict[str, tuple[list[CleanedTweet], list[CleanedTweet]]]:
    """Partition the corpus per emotion into (with-keyword, without) by
    matching simple-variant tokens."""
    out = {}
    for emotion, words in keywords.items():
        if not words:
            raise ValueError(f"empty keyword list for {emotion!r}")
        wordset = {w.lower() for w in words}
        with_kw, without = [], []
        for tw in corpus:
            if wordset & set(tw.simple_surfaces()):
                with_kw.append(tw)
            else:
                without.append(tw)
        out[emotion] = (with_kw, without)
    return out


def distant_labels(n_with: int, n_without: int) -> np.ndarray:
    y = np.zeros((n_with + n_without, 3))
    y[:n_with, DISTANT_WITH_INDEX] = 1.0
    y[n_with:, DISTANT_WITHOUT_INDEX] = 1.0
    return y


# -- hidden-layer feature extraction ----------------------------------------------

HIDDEN_LAYERS = ("submodel_penultimate", "combiner_hidden")


def extract_hidden(
    model,
    batch: EncodedBatch,
    layer: str,
    prefix: str,
) -> list[FeatureVector]:
    """Deterministic forward pass to a named hidden layer, emitted as one
    feature vector per tweet with names ``{prefix}_{i}``."""
    if layer == "combiner_hidden":
        if not isinstance(model, CombinedClassifier):
            raise ValueError("combiner_hidden requires the combined classifier")
        values = model.combiner_hidden(batch).data
    elif layer == "submodel_penultimate":
        if not isinstance(model, SubModel):
            raise ValueError("submodel_penultimate requires a sub-model")
        values = model.penultimate(batch).data
    else:
        raise ValueError(f"unknown hidden layer {layer!r}; expected one of {HIDDEN_LAYERS}")
    names = tuple(f"{prefix}_{i}" for i in range(values.shape[1]))
    groups = {n: prefix for n in names}
    return [FeatureVector(names=names, values=row, groups=groups) for row in values]
