"""Precision/recall curves, 101-point interpolated AP, mAP@0.5 and F1."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import NUM_CLASSES, DamageState
from .ingestion import Dataset, PredictionSet
from .matching import MatchResult, match_greedy

RECALL_SAMPLES = 101


class EmptyGroundTruthError(ValueError):
    """Raised when there is no ground truth to evaluate against."""


@dataclass(frozen=True)
class PrecisionRecallCurve:
    # (confidence, precision, recall), one point per detection, descending confidence
    points: tuple[tuple[float, float, float], ...]
    tp_cumulative: tuple[int, ...] = ()
    num_ground_truth: int = 0


@dataclass(frozen=True)
class DetectionScores:
    per_class_ap: tuple[Optional[float], ...]
    map50: float
    precision: float
    recall: float
    f1: float
    f1_threshold: Optional[float]
    f1_mode: str = "max"
    macro_f1: float = 0.0
    per_class_f1: tuple[Optional[float], ...] = ()
    empty_classes: tuple[int, ...] = field(default=())


def pr_curve(confidences, is_tp, num_ground_truth: int) -> PrecisionRecallCurve:
    """Precision/recall after each detection, visited by descending confidence.

    Equal confidences keep their given order.
    """
    conf = np.asarray(confidences, dtype=np.float64)
    tp = np.asarray(is_tp, dtype=bool)
    order = np.argsort(-conf, kind="stable")
    conf, tp = conf[order], tp[order]
    tp_cum = np.cumsum(tp, dtype=np.int64)
    seen = np.arange(1, len(tp) + 1, dtype=np.int64)
    precision = tp_cum / seen
    recall = tp_cum / num_ground_truth if num_ground_truth else np.zeros(len(tp))
    points = tuple(zip(conf.tolist(), precision.tolist(), recall.tolist()))
    return PrecisionRecallCurve(points, tuple(tp_cum.tolist()), num_ground_truth)


def interpolated_ap(curve: PrecisionRecallCurve) -> float:
    """Mean over r = 0.00, 0.01, ..., 1.00 of the best precision at recall >= r.

    Recall comparisons are done on integer counts (100 * tp >= i * n_gt), so
    sample points land exactly on recall values like 0.03 or 0.29.
    """
    n_gt = curve.num_ground_truth
    if n_gt <= 0:
        raise ValueError("AP undefined without ground truth")
    if not curve.points:
        return 0.0
    precision = np.array([p for _, p, _ in curve.points])
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    scaled_tp = 100 * np.asarray(curve.tp_cumulative, dtype=np.int64)
    needed = np.arange(RECALL_SAMPLES, dtype=np.int64) * n_gt
    first = np.searchsorted(scaled_tp, needed, side="left")
    sampled = [envelope[j] if j < len(envelope) else 0.0 for j in first.tolist()]
    return math.fsum(sampled) / RECALL_SAMPLES


def _per_class_tp(preds: PredictionSet, matches: MatchResult) -> np.ndarray:
    tp = np.zeros(len(preds.detections), dtype=bool)
    for m in matches.matched:
        tp[m.detection] = True
    return tp


def average_precision(
    cls: DamageState,
    dataset: Dataset,
    preds: PredictionSet,
    iou_threshold: float = 0.5,
    matches: Optional[MatchResult] = None,
) -> Optional[float]:
    """101-point AP for one class, or ``None`` if the class has no ground truth.

    ``matches`` must come from class-aware matching; it is computed if omitted.
    """
    n_gt = sum(1 for g in dataset.ground_truth if g.true_class == cls)
    if n_gt == 0:
        return None
    if matches is None:
        matches = match_greedy(dataset, preds, iou_threshold, class_aware=True)
    elif not matches.class_aware:
        raise ValueError("average_precision needs class-aware matches")
    tp = _per_class_tp(preds, matches)
    idx = [i for i, d in enumerate(preds.detections) if d.predicted_class == cls]
    conf = [preds.detections[i].confidence for i in idx]
    return interpolated_ap(pr_curve(conf, tp[idx], n_gt))


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def f1_sweep(confidences, is_tp, num_ground_truth: int):
    """(threshold, precision, recall, f1) at every distinct confidence, descending.

    A threshold keeps every detection with confidence >= it, so tied
    detections enter together.
    """
    conf = np.asarray(confidences, dtype=np.float64)
    tp = np.asarray(is_tp, dtype=bool)
    order = np.argsort(-conf, kind="stable")
    conf, tp = conf[order], tp[order]
    if conf.size == 0:
        return []
    tp_cum = np.cumsum(tp)
    # last position of each run of equal confidences
    ends = np.flatnonzero(np.append(conf[1:] != conf[:-1], True))
    rows = []
    for e in ends.tolist():
        kept = e + 1
        p = tp_cum[e] / kept
        r = tp_cum[e] / num_ground_truth
        rows.append((float(conf[e]), float(p), float(r), _f1(float(p), float(r))))
    return rows


def _at_threshold(confidences, is_tp, num_ground_truth: int, threshold: float):
    conf = np.asarray(confidences, dtype=np.float64)
    keep = conf >= threshold
    kept = int(keep.sum())
    tp = int(np.asarray(is_tp, dtype=bool)[keep].sum())
    p = tp / kept if kept else 0.0
    r = tp / num_ground_truth
    return p, r, _f1(p, r)


def map_at_50(
    dataset: Dataset,
    preds: PredictionSet,
    iou_threshold: float = 0.5,
    f1_threshold: Optional[float] = None,
    matches: Optional[MatchResult] = None,
    threads: int = 1,
) -> DetectionScores:
    """Per-class AP, mAP over populated classes and pooled F1.

    F1 is pooled over all classes (micro-averaged) using class-aware true
    positives. With ``f1_threshold=None`` the threshold maximising F1 is
    searched (ties keep the highest threshold); otherwise F1 is reported at
    the given threshold. ``macro_f1`` averages per-class F1 at that same
    threshold over populated classes.
    """
    n_total = len(dataset.ground_truth)
    if n_total == 0:
        raise EmptyGroundTruthError("dataset has no ground-truth instances")
    if matches is None:
        matches = match_greedy(dataset, preds, iou_threshold, class_aware=True, threads=threads)

    counts = dataset.class_counts()
    tp = _per_class_tp(preds, matches)
    conf = np.array([d.confidence for d in preds.detections], dtype=np.float64)
    cls = np.array([int(d.predicted_class) for d in preds.detections], dtype=np.int64)

    per_class_ap: list[Optional[float]] = []
    for k in range(NUM_CLASSES):
        if counts[k] == 0:
            per_class_ap.append(None)
            continue
        sel = cls == k
        per_class_ap.append(interpolated_ap(pr_curve(conf[sel], tp[sel], counts[k])))
    populated = [ap for ap in per_class_ap if ap is not None]
    map50 = math.fsum(populated) / len(populated)

    if f1_threshold is None:
        mode = "max"
        best = None
        for row in f1_sweep(conf, tp, n_total):
            if best is None or row[3] > best[3]:
                best = row
        if best is None:
            threshold, precision, recall, f1 = None, 0.0, 0.0, 0.0
        else:
            threshold, precision, recall, f1 = best
    else:
        mode = "fixed"
        threshold = float(f1_threshold)
        precision, recall, f1 = _at_threshold(conf, tp, n_total, threshold)

    per_class_f1: list[Optional[float]] = []
    for k in range(NUM_CLASSES):
        if counts[k] == 0:
            per_class_f1.append(None)
        elif threshold is None:
            per_class_f1.append(0.0)
        else:
            sel = cls == k
            per_class_f1.append(_at_threshold(conf[sel], tp[sel], counts[k], threshold)[2])
    macro = [v for v in per_class_f1 if v is not None]

    return DetectionScores(
        per_class_ap=tuple(per_class_ap),
        map50=map50,
        precision=float(precision),
        recall=float(recall),
        f1=float(f1),
        f1_threshold=threshold,
        f1_mode=mode,
        macro_f1=math.fsum(macro) / len(macro),
        per_class_f1=tuple(per_class_f1),
        empty_classes=tuple(k for k in range(NUM_CLASSES) if counts[k] == 0),
    )
