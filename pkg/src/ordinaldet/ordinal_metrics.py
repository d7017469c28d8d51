"""Ordinal error metrics over matched detections: MAOE, Top-k, confusion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import CLASS_NAMES, NUM_CLASSES
from .matching import MatchResult

TOP_K_LEVELS = tuple(range(NUM_CLASSES))


class UndefinedMetricError(ValueError):
    """Raised for ordinal metrics over an empty match set."""


@dataclass(frozen=True)
class OrdinalScores:
    maoe: Optional[float]  # None when nothing matched
    top_k_accuracy: dict[int, Optional[float]]
    matched_count: int
    match_rate: float  # matched / ground-truth count
    unmatched_detections: int
    unmatched_ground_truth: int


@dataclass(frozen=True)
class OrdinalConfusionMatrix:
    counts: np.ndarray  # rows: true class, columns: predicted class
    row_normalized: np.ndarray
    empty_rows: tuple[int, ...]

    def to_csv(self, normalized: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true\\pred", *CLASS_NAMES])
        data = self.row_normalized if normalized else self.counts
        for k, name in enumerate(CLASS_NAMES):
            cells = [f"{v:.12g}" for v in data[k]] if normalized else [str(int(v)) for v in data[k]]
            writer.writerow([name, *cells])
        return buf.getvalue()


def _gaps(matches: MatchResult) -> np.ndarray:
    if not matches.matched:
        raise UndefinedMetricError("no matched detections")
    return matches.gaps()


def maoe(matches: MatchResult) -> float:
    gaps = _gaps(matches)
    return float(gaps.sum()) / len(gaps)


def ordinal_top_k(matches: MatchResult, k: int) -> float:
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    gaps = _gaps(matches)
    return int((gaps <= k).sum()) / len(gaps)


def gap_histogram(matches: MatchResult) -> np.ndarray:
    """Count of matched pairs at each ordinal distance 0..4."""
    return np.bincount(_gaps(matches), minlength=NUM_CLASSES)


def confusion(matches: MatchResult) -> OrdinalConfusionMatrix:
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for m in matches.matched:
        counts[int(m.true_class), int(m.predicted_class)] += 1
    totals = counts.sum(axis=1)
    normalized = np.zeros((NUM_CLASSES, NUM_CLASSES))
    nonempty = totals > 0
    normalized[nonempty] = counts[nonempty] / totals[nonempty, None]
    empty = tuple(int(k) for k in np.flatnonzero(~nonempty))
    return OrdinalConfusionMatrix(counts, normalized, empty)


def ordinal_scores(matches: MatchResult) -> OrdinalScores:
    n = matches.matched_count
    n_gt = n + len(matches.unmatched_ground_truth)
    if n:
        value = maoe(matches)
        top_k = {k: ordinal_top_k(matches, k) for k in TOP_K_LEVELS}
    else:
        value = None
        top_k = {k: None for k in TOP_K_LEVELS}
    return OrdinalScores(
        maoe=value,
        top_k_accuracy=top_k,
        matched_count=n,
        match_rate=n / n_gt if n_gt else 0.0,
        unmatched_detections=len(matches.unmatched_detections),
        unmatched_ground_truth=len(matches.unmatched_ground_truth),
    )
