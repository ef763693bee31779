"""AdaGrad and Adam optimizers for autodiff parameters."""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor


class Optimizer:
    """Base: owns a fixed parameter list and per-parameter state."""

    kind = "base"

    def __init__(self, params: list[Tensor]):
        self.params = list(params)
        if not self.params:
            raise ValueError("optimizer needs at least one parameter")

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def _grads(self) -> list[np.ndarray]:
        grads = []
        for i, p in enumerate(self.params):
            if p.grad is None:
                raise ValueError(f"missing gradient for parameter {i} (shape {p.shape})")
            grads.append(p.grad)
        return grads

    # State (de)serialization keyed by external parameter names.

    def _state_entries(self) -> list[dict]:
        raise NotImplementedError

    def _load_state_entries(self, entries: list[dict]) -> None:
        raise NotImplementedError

    def hyperparameters(self) -> dict:
        raise NotImplementedError

    def state_dict(self, named_params: dict[str, Tensor]) -> dict:
        by_id = {id(t): name for name, t in named_params.items()}
        state = {}
        for p, entry in zip(self.params, self._state_entries()):
            name = by_id.get(id(p))
            if name is None:
                raise ValueError("optimizer parameter missing from the named set")
            state[name] = entry
        return {"type": self.kind, "hyper": self.hyperparameters(), "state": state}

    def load_state_dict(self, named_params: dict[str, Tensor], payload: dict) -> None:
        if payload["type"] != self.kind:
            raise ValueError(f"optimizer type mismatch: {payload['type']} vs {self.kind}")
        by_id = {id(t): name for name, t in named_params.items()}
        entries = []
        for p in self.params:
            name = by_id.get(id(p))
            if name is None or name not in payload["state"]:
                raise ValueError("checkpoint lacks state for an optimizer parameter")
            entries.append(payload["state"][name])
        self._load_state_entries(entries)
        self._load_hyper(payload.get("hyper", {}))

    def _load_hyper(self, hyper: dict) -> None:
        pass


class AdaGrad(Optimizer):
    """theta <- theta - lr * g / (sqrt(sum g^2) + eps)."""

    kind = "adagrad"

    def __init__(self, params: list[Tensor], lr: float = 0.01, eps: float = 1e-8):
        super().__init__(params)
        self.lr = float(lr)
        self.eps = float(eps)
        self.accum = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        for p, acc, g in zip(self.params, self.accum, self._grads()):
            acc += g * g
            p.data -= self.lr * g / (np.sqrt(acc) + self.eps)

    def hyperparameters(self) -> dict:
        return {"lr": self.lr, "eps": self.eps}

    def _state_entries(self) -> list[dict]:
        return [{"accum": a.ravel().tolist()} for a in self.accum]

    def _load_state_entries(self, entries: list[dict]) -> None:
        for acc, entry in zip(self.accum, entries):
            acc[...] = np.asarray(entry["accum"], dtype=np.float64).reshape(acc.shape)


class Adam(Optimizer):
    """Adam with bias-corrected moment estimates; Kingma-Ba defaults."""

    kind = "adam"

    def __init__(
        self,
        params: list[Tensor],
        lr: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        super().__init__(params)
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        grads = self._grads()
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, m, v, g in zip(self.params, self.m, self.v, grads):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p.data -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def hyperparameters(self) -> dict:
        return {
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "t": self.t,
        }

    def _state_entries(self) -> list[dict]:
        return [
            {"m": m.ravel().tolist(), "v": v.ravel().tolist()}
            for m, v in zip(self.m, self.v)
        ]

    def _load_state_entries(self, entries: list[dict]) -> None:
        for m, v, entry in zip(self.m, self.v, entries):
            m[...] = np.asarray(entry["m"], dtype=np.float64).reshape(m.shape)
            v[...] = np.asarray(entry["v"], dtype=np.float64).reshape(v.shape)

    def _load_hyper(self, hyper: dict) -> None:
        self.t = int(hyper.get("t", 0))


def make_optimizer(name: str, params: list[Tensor], **kwargs) -> Optimizer:
    name = name.lower()
    if name == "adagrad":
        return AdaGrad(params, **kwargs)
    if name == "adam":
        return Adam(params, **kwargs)
    raise ValueError(f"unknown optimizer '{name}'")
