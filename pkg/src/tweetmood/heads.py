"""Task-specific shallow networks over feature vectors.

Two heads, both soft-voting ensembles trained jointly end to end through
a shared mean:

* a regression head of 300 bias-free dense(d_in -> 3) softmax copies,
  each mapped to [0, 1] by f(x) = (x0 - x2) / 2 + 0.5 and averaged;
* a multi-label head: dense(d_in -> 100, tanh), then 300 copies of
  dense(100 -> 11, sigmoid), averaged elementwise.

Class probabilities are ordered (positive, neutral, negative), so f sends
certain-positive to 1, certain-neutral to 0.5 and certain-negative to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .nn import derive_rng, glorot_uniform, mse, tanimoto
from .optim import Adam

CLASS_ORDER = ("positive", "neutral", "negative")
_F_WEIGHTS = np.array([0.5, 0.0, -0.5])

MULTILABEL_EMOTIONS = (
    "anger", "anticipation", "disgust", "fear", "joy", "love",
    "optimism", "pessimism", "sadness", "surprise", "trust",
)


def score_map_f(x) -> float:
    """f(x) = (x0 - x2) / 2 + 0.5 on a probability 3-vector ordered
    (positive, neutral, negative)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (3,):
        raise ValueError(f"expected a probability 3-vector, got shape {x.shape}")
    return float((x[0] - x[2]) / 2.0 + 0.5)


@dataclass(frozen=True)
class Standardizer:
    """Column-wise zero-mean unit-SD transform, fit on training rows only."""

    mean: np.ndarray
    sd: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray, names=None) -> "Standardizer":
        x = np.asarray(x, dtype=np.float64)
        mean = x.mean(axis=0)
        sd = x.std(axis=0)
        degenerate = np.nonzero(sd == 0.0)[0]
        if degenerate.size:
            which = (
                [names[i] for i in degenerate] if names is not None else degenerate.tolist()
            )
            raise ValueError(
                f"constant features cannot be standardized: {which}; "
                "drop them first (see prune_sparse)"
            )
        return cls(mean=mean, sd=sd)

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.mean.shape[0]:
            raise ValueError(
                f"feature length mismatch: {x.shape[-1]} vs {self.mean.shape[0]}"
            )
        return (x - self.mean) / self.sd


@dataclass(frozen=True)
class RegressionConfig:
    learning_rate: float = 0.001
    batch_size: int = 400
    epochs: int = 65
    copies: int = 300
    seed: int = 0


# Training presets for the per-emotion intensity regressions.
EI_REGRESSION_PRESETS = {
    "anger": RegressionConfig(learning_rate=1e-4, epochs=330),
    "fear": RegressionConfig(learning_rate=1e-5, epochs=700),
    "joy": RegressionConfig(learning_rate=1e-5, epochs=700),
    "sadness": RegressionConfig(learning_rate=3e-5, epochs=1000),
}


def regression_config_for(emotion: str | None = None, **overrides) -> RegressionConfig:
    base = EI_REGRESSION_PRESETS.get(emotion, RegressionConfig()) if emotion else RegressionConfig()
    return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class MultiLabelConfig:
    learning_rate: float = 0.001
    batch_size: int = 10
    epochs: int = 40
    copies: int = 300
    hidden_dim: int = 100
    seed: int = 0


class VotingRegressionHead:
    """300 independent bias-free dense(d_in -> 3) softmax layers whose
    f-mapped outputs are averaged into one score in [0, 1]."""

    def __init__(self, d_in: int, copies: int = 300, seed: int = 0):
        self.d_in = d_in
        self.copies = copies
        rng = derive_rng(seed, "voting-regression-init")
        # One (d_in, 3) block per copy; glorot bounds use the per-copy fan.
        blocks = [glorot_uniform(rng, d_in, 3) for _ in range(copies)]
        self.w = Tensor(np.concatenate(blocks, axis=1), requires_grad=True)

    def parameters(self) -> dict[str, Tensor]:
        return {"w": self.w}

    def copy_weights(self, i: int) -> np.ndarray:
        return self.w.data[:, 3 * i : 3 * (i + 1)]

    def forward(self, x: np.ndarray) -> Tensor:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.d_in:
            raise ValueError(f"feature length mismatch: {x.shape} vs d_in={self.d_in}")
        n = x.shape[0]
        logits = ad.reshape(ad.matmul(Tensor(x), self.w), (n, self.copies, 3))
        probs = ad.softmax(logits, axis=-1)
        votes = ad.add(ad.tensor_sum(ad.mul(probs, _F_WEIGHTS), axis=2), 0.5)
        return ad.tensor_mean(votes, axis=1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x).data


def train_regression(
    head: VotingRegressionHead,
    x: np.ndarray,
    y: np.ndarray,
    cfg: RegressionConfig,
) -> list[float]:
    """Minimize MSE with Adam; returns the per-epoch loss history."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y.min() < 0.0 or y.max() > 1.0:
        raise ValueError("regression labels must lie in [0, 1]")
    if x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise ValueError("need matching, nonempty features and labels")
    opt = Adam(list(head.parameters().values()), lr=cfg.learning_rate)
    rng = derive_rng(cfg.seed, "train-regression-batches")
    history = []
    for _ in range(cfg.epochs):
        losses = []
        for idx in _minibatches(x.shape[0], cfg.batch_size, rng):
            opt.zero_grad()
            loss = mse(head.forward(x[idx]), y[idx])
            loss.backward()
            opt.step()
            losses.append(loss.item())
        history.append(float(np.mean(losses)))
    return history


class MultiLabelHead:
    """dense(d_in -> hidden, tanh) into 300 sigmoid dense(hidden -> 11)
    copies whose outputs are averaged elementwise."""

    def __init__(
        self,
        d_in: int,
        n_labels: int = len(MULTILABEL_EMOTIONS),
        hidden_dim: int = 100,
        copies: int = 300,
        seed: int = 0,
    ):
        self.d_in = d_in
        self.n_labels = n_labels
        self.hidden_dim = hidden_dim
        self.copies = copies
        rng = derive_rng(seed, "multilabel-init")
        self.w1 = Tensor(glorot_uniform(rng, d_in, hidden_dim), requires_grad=True)
        self.b1 = Tensor(np.zeros(hidden_dim), requires_grad=True)
        blocks = [glorot_uniform(rng, hidden_dim, n_labels) for _ in range(copies)]
        self.w2 = Tensor(np.concatenate(blocks, axis=1), requires_grad=True)
        self.b2 = Tensor(np.zeros(copies * n_labels), requires_grad=True)

    def parameters(self) -> dict[str, Tensor]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def forward(self, x: np.ndarray) -> Tensor:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.d_in:
            raise ValueError(f"feature length mismatch: {x.shape} vs d_in={self.d_in}")
        n = x.shape[0]
        h = ad.tanh(ad.add(ad.matmul(Tensor(x), self.w1), self.b1))
        out = ad.sigmoid(ad.add(ad.matmul(h, self.w2), self.b2))
        per_copy = ad.reshape(out, (n, self.copies, self.n_labels))
        return ad.tensor_mean(per_copy, axis=1)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x).data

    def predict(self, x: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(x) >= threshold).astype(np.int64)


def train_multilabel(
    head: MultiLabelHead,
    x: np.ndarray,
    y: np.ndarray,
    cfg: MultiLabelConfig,
) -> list[float]:
    """Minimize the Tanimoto dissimilarity loss with Adam."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("multi-label targets must be binary")
    if x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise ValueError("need matching, nonempty features and labels")
    opt = Adam(list(head.parameters().values()), lr=cfg.learning_rate)
    rng = derive_rng(cfg.seed, "train-multilabel-batches")
    history = []
    for _ in range(cfg.epochs):
        losses = []
        for idx in _minibatches(x.shape[0], cfg.batch_size, rng):
            opt.zero_grad()
            loss = tanimoto(head.forward(x[idx]), y[idx])
            loss.backward()
            opt.step()
            losses.append(loss.item())
        history.append(float(np.mean(losses)))
    return history


def _minibatches(n: int, batch_size: int, rng: np.random.Generator):
    """Shuffled fixed-size batches; the final partial batch is kept."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]
