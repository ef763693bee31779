"""Metrics, ordinal threshold calibration, and Pratt variable importance.

The calibration search partitions regression scores in [0, 1] into k
ordered classes by choosing k-1 cut points that maximize the Pearson
correlation between assigned class values and gold labels. Candidates are
midpoints between consecutive distinct sorted scores (subsampled to a
uniform grid past ``resolution``); the search is exhaustive when the
subset count is small and a deterministic beam search otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

import numpy as np

EXHAUSTIVE_LIMIT = 100_000
DEFAULT_RESOLUTION = 200
DEFAULT_BEAM_WIDTH = 1000

VOC_CLASS_VALUES = (-3, -2, -1, 0, 1, 2, 3)
EIOC_CLASS_VALUES = (0, 1, 2, 3)


class NumericalError(ValueError):
    """A quantity is mathematically undefined for the given data."""


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation; undefined for constant input."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"pearson expects equal-length vectors, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValueError("pearson needs at least two samples")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        raise NumericalError("undefined correlation: constant input")
    return float((xc * yc).sum() / denom)


def jaccard(gold, pred) -> float:
    """Mean Jaccard similarity over rows of two binary matrices.

    A row where both label sets are empty counts as a perfect match."""
    gold = np.asarray(gold)
    pred = np.asarray(pred)
    if gold.shape != pred.shape or gold.ndim != 2:
        raise ValueError(f"jaccard expects equal-shape matrices, got {gold.shape} and {pred.shape}")
    for m in (gold, pred):
        if not np.isin(m, (0, 1)).all():
            raise ValueError("jaccard inputs must be binary")
    inter = np.logical_and(gold, pred).sum(axis=1).astype(np.float64)
    union = np.logical_or(gold, pred).sum(axis=1).astype(np.float64)
    per_row = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
    return float(per_row.mean())


def truncate_score(x: float, places: int = 3) -> float:
    """Reporting rule for metric scores: truncate toward zero.

    Matches the convention that a macro-average of 0.72175 is reported
    as 0.721."""
    scale = 10**places
    return int(x * scale) / scale


def macro_average(values: Sequence[float]) -> float:
    return float(np.mean(np.asarray(values, dtype=np.float64)))


# -- ordinal calibration ----------------------------------------------------


@dataclass(frozen=True)
class CalibrationThresholds:
    """Monotone partition of [0, 1] scores into ordered classes.

    ``cuts`` are k-1 strictly increasing interior points; a score equal
    to a cut belongs to the upper class."""

    cuts: tuple[float, ...]
    class_values: tuple[int, ...]

    def __post_init__(self):
        k = len(self.class_values)
        if k < 2:
            raise ValueError("need at least two classes")
        if list(self.class_values) != sorted(self.class_values):
            raise ValueError("class_values must be ascending")
        if len(self.cuts) != k - 1:
            raise ValueError(f"expected {k - 1} cuts for {k} classes, got {len(self.cuts)}")
        if any(b <= a for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValueError("cuts must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.class_values)

    def as_dict(self) -> dict:
        return {"cuts": list(self.cuts), "class_values": list(self.class_values)}

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationThresholds":
        return cls(cuts=tuple(d["cuts"]), class_values=tuple(d["class_values"]))


def apply_thresholds(scores, thresholds: CalibrationThresholds) -> np.ndarray:
    """Map scores to ordinal class values; monotone in the score."""
    scores = np.asarray(scores, dtype=np.float64)
    cuts = np.asarray(thresholds.cuts, dtype=np.float64)
    idx = np.searchsorted(cuts, scores, side="right")
    return np.asarray(thresholds.class_values)[idx]


def _midpoint_candidates(scores: np.ndarray, resolution: int) -> np.ndarray:
    distinct = np.unique(scores)
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    if mids.size > resolution:
        # Too many exact midpoints to search; fall back to an evenly
        # spaced interior grid on [0, 1].
        return np.linspace(0.0, 1.0, resolution + 2)[1:-1]
    return mids


def _pearson_rows(assign: np.ndarray, gold_centered: np.ndarray, gold_norm: float) -> np.ndarray:
    """Pearson of each row of ``assign`` against centered gold labels.
    Rows with zero variance score -inf (undefined, never optimal)."""
    a = assign.astype(np.float64)
    ac = a - a.mean(axis=1, keepdims=True)
    norms = np.sqrt((ac * ac).sum(axis=1)) * gold_norm
    dots = ac @ gold_centered
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(norms > 0, dots / np.where(norms > 0, norms, 1.0), -np.inf)
    return r


def grid_search_thresholds(
    scores,
    gold,
    class_values: Sequence[int],
    resolution: int = DEFAULT_RESOLUTION,
    beam_width: int = DEFAULT_BEAM_WIDTH,
) -> CalibrationThresholds:
    """Choose cuts maximizing pearson(assigned class values, gold).

    Exhaustive over all (k-1)-subsets of the candidate cuts while that
    count stays within EXHAUSTIVE_LIMIT, otherwise a width-limited beam
    over cut subsets (partial prefixes scored with provisional class
    ranks). Ties break toward the lexicographically smallest cuts.
    """
    scores = np.asarray(scores, dtype=np.float64)
    gold = np.asarray(gold, dtype=np.float64)
    class_values = tuple(int(v) for v in class_values)
    k = len(class_values)
    if scores.ndim != 1 or scores.shape != gold.shape:
        raise ValueError("scores and gold must be equal-length vectors")
    if scores.size < k:
        raise ValueError(f"need at least {k} samples for {k} classes")
    if not set(np.unique(gold)) <= set(float(v) for v in class_values):
        raise ValueError("gold labels outside the class value set")
    gold_centered = gold - gold.mean()
    gold_norm = float(np.sqrt((gold_centered**2).sum()))
    if gold_norm == 0.0:
        raise NumericalError("undefined correlation: constant gold labels")

    cands = _midpoint_candidates(scores, resolution)
    m = cands.size
    if m < k - 1:
        raise ValueError(f"only {m} candidate cuts for {k - 1} required")

    # indicator[i, j] = 1 if scores[j] >= cands[i]; a cut subset's class
    # assignment is the sum of its indicator rows (equal-to-cut goes up).
    indicator = (scores[None, :] >= cands[:, None]).astype(np.int64)
    values = np.asarray(class_values, dtype=np.float64)

    def final_score(idx_tuple: tuple[int, ...]) -> float:
        assign = values[indicator[list(idx_tuple)].sum(axis=0)]
        r = _pearson_rows(assign[None, :], gold_centered, gold_norm)
        return float(r[0])

    if comb(m, k - 1) <= EXHAUSTIVE_LIMIT:
        best_idx, best_r = None, -np.inf
        for combo in itertools.combinations(range(m), k - 1):
            r = final_score(combo)
            if r > best_r:
                best_idx, best_r = combo, r
    else:
        best_idx, best_r = _beam_search(
            indicator, gold_centered, gold_norm, k, beam_width, values
        )
    if best_idx is None or not np.isfinite(best_r):
        raise NumericalError("no cut subset yields a defined correlation")
    return CalibrationThresholds(
        cuts=tuple(float(cands[i]) for i in best_idx), class_values=class_values
    )


def _beam_search(indicator, gold_centered, gold_norm, k, width, values):
    m = indicator.shape[0]
    # (cut indices, bin-count assignment); partial prefixes are scored
    # with provisional ranks 0..j, final states with the real values.
    beam: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.zeros(indicator.shape[1], dtype=np.int64))]
    for depth in range(k - 1):
        remaining = k - 2 - depth
        scored: list[tuple[float, tuple[int, ...], np.ndarray]] = []
        for state, base in beam:
            start = state[-1] + 1 if state else 0
            stop = m - remaining
            if start >= stop:
                continue
            assigns = base[None, :] + indicator[start:stop]
            rs = _pearson_rows(assigns, gold_centered, gold_norm)
            for offset, r in enumerate(rs):
                scored.append((-r, state + (start + offset,), assigns[offset]))
        scored.sort(key=lambda t: (t[0], t[1]))
        beam = [(s, a) for _, s, a in scored[:width]]
        if not beam:
            return None, -np.inf
    best_idx, best_r = None, -np.inf
    for state, base in beam:
        assign = values[base]
        r = float(_pearson_rows(assign[None, :], gold_centered, gold_norm)[0])
        if r > best_r or (r == best_r and (best_idx is None or state < best_idx)):
            best_idx, best_r = state, r
    return best_idx, best_r


# -- Pratt importance ----------------------------------------------------------


@dataclass(frozen=True)
class ImportanceReport:
    """Per-feature R-squared shares d_i = beta_i * rho_i / R^2 and the
    aggregate share of each feature group, in percent.

    Negative d_i (suppressor features) are reported as-is."""

    names: tuple[str, ...]
    d: np.ndarray
    r_squared: float
    groups: Mapping[str, str]

    def group_shares(self) -> dict[str, float]:
        shares: dict[str, float] = {}
        for name, di in zip(self.names, self.d):
            g = self.groups[name]
            shares[g] = shares.get(g, 0.0) + float(di) * 100.0
        return shares

    def to_tsv(self) -> str:
        shares = self.group_shares()
        lines = ["feature\tgroup\td_i\tgroup_percent"]
        for name, di in zip(self.names, self.d):
            g = self.groups[name]
            lines.append(f"{name}\t{g}\t{di!r}\t{shares[g]:.2f}")
        return "\n".join(lines) + "\n"

    def chart_data(self) -> str:
        """(group, share) rows for a bar chart, largest share first."""
        shares = sorted(self.group_shares().items(), key=lambda kv: -kv[1])
        return "\n".join(f"{g}\t{s:.2f}" for g, s in shares) + "\n"


def find_dependent_columns(x, names: Sequence[str]) -> list[str]:
    """Columns that are exact linear combinations of earlier ones.

    Dropping these restores full column rank. Proportion-style feature
    groups (values summing to 1) always contain one such column."""
    x = np.asarray(x, dtype=np.float64)
    bad = []
    rank = 0
    for j in range(x.shape[1]):
        new_rank = np.linalg.matrix_rank(x[:, : j + 1])
        if new_rank == rank:
            bad.append(names[j])
        rank = new_rank
    return bad


def pratt_importance(
    x,
    y,
    names: Sequence[str] | None = None,
    groups: Mapping[str, str] | None = None,
) -> ImportanceReport:
    """Decompose the R^2 of an OLS fit into per-feature shares.

    ``x`` must be column-standardized (zero mean, unit SD); the target is
    standardized internally so the coefficients are in standardized units
    and the shares sum to one. R^2 is computed as sum(beta_i * rho_i),
    which coincides with the usual residual definition for an OLS fit on
    standardized features.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
        raise ValueError("expected x of shape (n, p) and y of length n")
    n, p = x.shape
    if names is None:
        names = tuple(f"x{i}" for i in range(p))
    names = tuple(names)
    if len(names) != p:
        raise ValueError("one name per column required")
    if n <= p:
        raise ValueError(f"OLS needs n > p, got n={n}, p={p}")
    col_means = x.mean(axis=0)
    col_sds = x.std(axis=0)
    if np.abs(col_means).max() > 1e-6 or np.abs(col_sds - 1).max() > 1e-3:
        raise ValueError("features must be standardized (zero mean, unit SD)")
    if np.linalg.matrix_rank(x) < p:
        bad = find_dependent_columns(x, names)
        raise ValueError(f"rank-deficient features; dependent columns: {bad}")

    y_sd = y.std()
    if y_sd == 0.0:
        raise NumericalError("undefined importance: constant target")
    yc = (y - y.mean()) / y_sd
    design = np.column_stack([np.ones(n), x])
    beta = np.linalg.lstsq(design, yc, rcond=None)[0][1:]
    rho = np.array([pearson(x[:, j], yc) for j in range(p)])
    r_squared = float(beta @ rho)
    if r_squared <= 0.0:
        raise NumericalError("undefined importance: non-positive R^2")
    d = beta * rho / r_squared
    if groups is None:
        groups = {name: name for name in names}
    return ImportanceReport(names=names, d=d, r_squared=r_squared, groups=dict(groups))
