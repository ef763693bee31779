"""Run configuration: a sectioned key=value file, strictly validated.

Unknown sections or keys are rejected so stored configs stay faithful
records of what a run actually did. Every artifact a run produces is
stamped with the sha256 digest of the canonicalized config plus the seed.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Bad run configuration or usage."""


def _to_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def _to_widths(s: str) -> tuple[int, ...]:
    return tuple(int(p) for p in s.split(",") if p.strip())


def _to_paths(s: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in s.split(",") if p.strip())


_SCHEMA: dict[str, dict[str, object]] = {
    "run": {"seed": int, "out_dir": str},
    "data": {"train": str, "dev": str, "test": str, "compress_5to3": _to_bool},
    "features": {
        "syntactic": _to_bool,
        "category": _to_bool,
        "nrc_hashtags": _to_bool,
        "polarity": _to_bool,
        "min_support": int,
        "asc_checkpoint": str,
        "hidden_checkpoints": _to_paths,
    },
    "head": {
        "learning_rate": float,
        "batch_size": int,
        "epochs": int,
        "copies": int,
        "hidden": int,
    },
    "calibration": {"resolution": int, "beam_width": int},
    "asc": {
        "word_dim_simple": int,
        "word_dim_complex": int,
        "pos_dim": int,
        "seq_len": int,
        "gru_hidden": int,
        "penultimate": int,
        "combiner_hidden": int,
        "filter_widths": _to_widths,
        "filters_per_width": int,
        "optimizer": str,
        "learning_rate": float,
        "batch_size": int,
        "epochs": int,
        "min_count": int,
        "embeddings_simple": str,
        "embeddings_complex": str,
    },
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out_dir: str = "run-out"
    train: str | None = None
    dev: str | None = None
    test: str | None = None
    compress_5to3: bool = False
    syntactic: bool = True
    category: bool = True
    nrc_hashtags: bool = True
    polarity: bool = True
    min_support: int = 8
    asc_checkpoint: str | None = None
    hidden_checkpoints: tuple[str, ...] = ()
    head_learning_rate: float = 0.001
    head_batch_size: int = 400
    head_epochs: int = 65
    head_copies: int = 300
    head_hidden: int = 100
    calibration_resolution: int = 200
    calibration_beam_width: int = 1000
    asc_word_dim_simple: int = 200
    asc_word_dim_complex: int = 150
    asc_pos_dim: int = 8
    asc_seq_len: int = 40
    asc_gru_hidden: int = 200
    asc_penultimate: int = 30
    asc_combiner_hidden: int = 25
    asc_filter_widths: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    asc_filters_per_width: int = 100
    asc_optimizer: str = "adagrad"
    asc_learning_rate: float = 0.01
    asc_batch_size: int = 32
    asc_epochs: int = 10
    asc_min_count: int = 1
    asc_embeddings_simple: str | None = None
    asc_embeddings_complex: str | None = None
    raw_items: tuple[tuple[str, str], ...] = field(default=(), repr=False)

    @property
    def digest(self) -> str:
        canon = "\n".join(f"{k}={v}" for k, v in sorted(self.raw_items))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


_FIELD_BY_SECTION_KEY = {
    ("run", "seed"): "seed",
    ("run", "out_dir"): "out_dir",
    ("data", "train"): "train",
    ("data", "dev"): "dev",
    ("data", "test"): "test",
    ("data", "compress_5to3"): "compress_5to3",
    ("features", "syntactic"): "syntactic",
    ("features", "category"): "category",
    ("features", "nrc_hashtags"): "nrc_hashtags",
    ("features", "polarity"): "polarity",
    ("features", "min_support"): "min_support",
    ("features", "asc_checkpoint"): "asc_checkpoint",
    ("features", "hidden_checkpoints"): "hidden_checkpoints",
    ("head", "learning_rate"): "head_learning_rate",
    ("head", "batch_size"): "head_batch_size",
    ("head", "epochs"): "head_epochs",
    ("head", "copies"): "head_copies",
    ("head", "hidden"): "head_hidden",
    ("calibration", "resolution"): "calibration_resolution",
    ("calibration", "beam_width"): "calibration_beam_width",
}
_FIELD_BY_SECTION_KEY.update(
    {("asc", key): f"asc_{key}" for key in _SCHEMA["asc"]}
)


def parse_config(path) -> RunConfig:
    """Load and validate a config file into a RunConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"cannot parse config: {e}") from e

    values: dict[str, object] = {}
    raw_items: list[tuple[str, str]] = []
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            raw = raw.strip()
            raw_items.append((f"{section}.{key}", raw))
            if raw == "":
                continue
            convert = _SCHEMA[section][key]
            try:
                values[_FIELD_BY_SECTION_KEY[(section, key)]] = convert(raw)
            except (ValueError, TypeError) as e:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({e})") from e
    return RunConfig(raw_items=tuple(raw_items), **values)
