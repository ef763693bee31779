"""Network layers and losses on top of the autodiff core.

Everything here is expressed through :mod:`tweetmood.autodiff` primitives,
so analytic gradients come from composition and are verified end to end by
finite differences in the test suite.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor


def derive_rng(seed: int, label: str) -> np.random.Generator:
    """Deterministic per-stage random stream derived from one run seed.

    The label is hashed so adding or reordering stages never perturbs the
    streams of other stages.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()[:8]
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest, "big")])
    )


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    if shape is None:
        shape = (fan_in, fan_out)
    return rng.uniform(-bound, bound, size=shape)


def dense(x: Tensor, w: Tensor, b: Tensor | None = None) -> Tensor:
    """Affine map ``x @ w (+ b)``. The bias is optional by contract:
    the voting regression head uses bias-free layers."""
    if x.shape[-1] != w.shape[0]:
        raise ValueError(f"dense shape mismatch: input {x.shape} vs weight {w.shape}")
    out = ad.matmul(x, w)
    if b is not None:
        out = ad.add(out, b)
    return out


# -- GRU -----------------------------------------------------------------


@dataclass
class GRUCell:
    """One direction of a GRU layer.

    Gate equations (h' is the new state):
        z = sigmoid(x Wz + h Uz + bz)
        r = sigmoid(x Wr + h Ur + br)
        hc = tanh(x Wh + (r * h) Uh + bh)
        h' = (1 - z) * h + z * hc
    """

    wz: Tensor
    wr: Tensor
    wh: Tensor
    uz: Tensor
    ur: Tensor
    uh: Tensor
    bz: Tensor
    br: Tensor
    bh: Tensor

    @classmethod
    def create(cls, rng: np.random.Generator, input_dim: int, hidden_dim: int) -> "GRUCell":
        def w():
            return Tensor(glorot_uniform(rng, input_dim, hidden_dim), requires_grad=True)

        def u():
            return Tensor(glorot_uniform(rng, hidden_dim, hidden_dim), requires_grad=True)

        def b():
            return Tensor(np.zeros(hidden_dim), requires_grad=True)

        return cls(wz=w(), wr=w(), wh=w(), uz=u(), ur=u(), uh=u(), bz=b(), br=b(), bh=b())

    @property
    def hidden_dim(self) -> int:
        return self.uz.shape[0]

    def parameters(self) -> dict[str, Tensor]:
        return {
            "wz": self.wz, "wr": self.wr, "wh": self.wh,
            "uz": self.uz, "ur": self.ur, "uh": self.uh,
            "bz": self.bz, "br": self.br, "bh": self.bh,
        }

    def run(self, x: Tensor, reverse: bool = False) -> list[Tensor]:
        """Run over a (B, T, d) input; returns T states of shape (B, h),
        aligned to the original time order regardless of direction."""
        batch, steps, _ = x.shape
        h_dim = self.hidden_dim
        # Input projections for the whole sequence in three matmuls.
        xz = ad.add(ad.matmul(x, self.wz), self.bz)
        xr = ad.add(ad.matmul(x, self.wr), self.br)
        xh = ad.add(ad.matmul(x, self.wh), self.bh)
        h = Tensor(np.zeros((batch, h_dim)))
        states: list[Tensor] = [None] * steps
        order = range(steps - 1, -1, -1) if reverse else range(steps)
        for t in order:
            sl = (slice(None), t, slice(None))
            z = ad.sigmoid(ad.add(xz[sl], ad.matmul(h, self.uz)))
            r = ad.sigmoid(ad.add(xr[sl], ad.matmul(h, self.ur)))
            hc = ad.tanh(ad.add(xh[sl], ad.matmul(ad.mul(r, h), self.uh)))
            h = ad.add(ad.mul(ad.sub(1.0, z), h), ad.mul(z, hc))
            states[t] = h
        return states


def bi_gru(x: Tensor, forward: GRUCell, backward: GRUCell) -> Tensor:
    """Bi-directional GRU over the time axis.

    Accepts (T, d) or (B, T, d); emits (T, 2h) or (B, T, 2h) with forward
    and backward states concatenated per step.
    """
    squeeze = x.ndim == 2
    if squeeze:
        x = ad.reshape(x, (1,) + x.shape)
    if x.shape[1] < 1:
        raise ValueError("bi_gru requires at least one time step")
    fw = ad.stack(forward.run(x), axis=1)
    bw = ad.stack(backward.run(x, reverse=True), axis=1)
    out = ad.concat([fw, bw], axis=2)
    if squeeze:
        out = ad.reshape(out, out.shape[1:])
    return out


# -- convolutional attention ------------------------------------------------


@dataclass
class ConvFilterBank:
    """Valid 1-D convolutions of several widths with max-over-time pooling."""

    widths: tuple[int, ...]
    weights: list[Tensor] = field(default_factory=list)  # (width*D, channels) each
    biases: list[Tensor] = field(default_factory=list)

    @classmethod
    def create(
        cls,
        rng: np.random.Generator,
        input_dim: int,
        widths: tuple[int, ...],
        channels: int,
    ) -> "ConvFilterBank":
        bank = cls(widths=tuple(widths))
        for w in bank.widths:
            bank.weights.append(
                Tensor(glorot_uniform(rng, w * input_dim, channels), requires_grad=True)
            )
            bank.biases.append(Tensor(np.zeros(channels), requires_grad=True))
        return bank

    @property
    def output_dim(self) -> int:
        return sum(w.shape[1] for w in self.weights)

    def parameters(self) -> dict[str, Tensor]:
        out = {}
        for width, w, b in zip(self.widths, self.weights, self.biases):
            out[f"conv{width}.w"] = w
            out[f"conv{width}.b"] = b
        return out


def conv_maxpool_attention(h: Tensor, bank: ConvFilterBank) -> Tensor:
    """Convolve GRU hidden states with every filter width, max-pool over
    time, and concatenate the pooled channels into one vector.

    Input (T, D) or (B, T, D); output (sum of channels,) or (B, sum)."""
    squeeze = h.ndim == 2
    if squeeze:
        h = ad.reshape(h, (1,) + h.shape)
    steps = h.shape[1]
    if steps < max(bank.widths):
        raise ValueError(
            f"sequence length {steps} shorter than widest filter {max(bank.widths)}"
        )
    pooled = []
    for width, w, b in zip(bank.widths, bank.weights, bank.biases):
        windows = ad.sliding_windows(h, width)
        conv = ad.add(ad.matmul(windows, w), b)
        pooled.append(conv.max(axis=1))
    out = ad.concat(pooled, axis=1)
    if squeeze:
        out = ad.reshape(out, (out.shape[1],))
    return out


# -- losses -----------------------------------------------------------------


def cross_entropy(p: Tensor, y_onehot: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of one-hot targets under probabilities p."""
    y = np.asarray(y_onehot, dtype=np.float64)
    if p.ndim == 1:
        p = ad.reshape(p, (1, p.shape[0]))
        y = y.reshape(1, -1)
    if p.shape != y.shape:
        raise ValueError(f"cross_entropy shape mismatch: {p.shape} vs {y.shape}")
    n = p.shape[0]
    return ad.mul(ad.tensor_sum(ad.mul(ad.log(p), y)), -1.0 / n)


def mse(pred: Tensor, y) -> Tensor:
    y = np.asarray(y, dtype=np.float64)
    if pred.shape != y.shape:
        raise ValueError(f"mse shape mismatch: {pred.shape} vs {y.shape}")
    diff = ad.sub(pred, y)
    return ad.tensor_mean(ad.mul(diff, diff))


def tanimoto(pred: Tensor, y, eps: float = 1e-7) -> Tensor:
    """Tanimoto dissimilarity 1 - (p.y) / (|p+y|_1 - p.y + eps).

    Inputs must lie in [0, 1] elementwise, so the L1 norm reduces to a
    plain sum. For 2-D inputs the loss is the mean over rows.
    """
    y = np.asarray(y, dtype=np.float64)
    if pred.shape != y.shape:
        raise ValueError(f"tanimoto shape mismatch: {pred.shape} vs {y.shape}")
    if pred.data.min() < 0.0 or pred.data.max() > 1.0 or y.min() < 0.0 or y.max() > 1.0:
        raise ValueError("tanimoto inputs must lie in [0, 1]")
    p = pred if pred.ndim == 2 else ad.reshape(pred, (1, pred.shape[0]))
    yy = y.reshape(p.shape)
    dot = ad.tensor_sum(ad.mul(p, yy), axis=1)
    l1 = ad.tensor_sum(ad.add(p, yy), axis=1)
    denom = ad.add(ad.sub(l1, dot), eps)
    return ad.sub(1.0, ad.tensor_mean(ad.div(dot, denom)))
