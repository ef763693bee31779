"""Self-describing JSON checkpoints.

A checkpoint records a format version, every named parameter tensor
(shape plus row-major float64 payload), optional optimizer state, the run
seed, and the digest of the configuration that produced it. Serialization
is canonical (sorted keys, fixed separators, shortest-roundtrip floats),
so identical training runs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .autodiff import Tensor
from .optim import Optimizer

FORMAT_VERSION = 1


def save_checkpoint(
    path,
    params: dict[str, Tensor],
    seed: int,
    config_digest: str,
    optimizer: Optimizer | None = None,
    extra: dict | None = None,
) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "seed": int(seed),
        "config_digest": config_digest,
        "params": {
            name: {"shape": list(t.shape), "data": t.data.ravel().tolist()}
            for name, t in params.items()
        },
        "optimizer": optimizer.state_dict(params) if optimizer is not None else None,
        "extra": extra or {},
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")), encoding="utf-8"
    )


def load_checkpoint(path) -> dict:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != FORMAT_VERSION:
        raise ValueError(
            f"unsupported checkpoint format version {payload.get('format_version')}"
        )
    return payload


def restore_params(params: dict[str, Tensor], payload: dict) -> None:
    """Copy checkpointed values into an existing named parameter set."""
    stored = payload["params"]
    missing = sorted(set(params) - set(stored))
    if missing:
        raise ValueError(f"checkpoint lacks parameters: {missing}")
    for name, t in params.items():
        entry = stored[name]
        arr = np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"])
        if tuple(arr.shape) != t.shape:
            raise ValueError(
                f"parameter '{name}' shape mismatch: {t.shape} vs {tuple(arr.shape)}"
            )
        t.data[...] = arr
