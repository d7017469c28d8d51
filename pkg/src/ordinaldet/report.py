"""Full evaluation pass and its serialised report."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .detection_metrics import DetectionScores, EmptyGroundTruthError, map_at_50
from .domain import CLASS_NAMES
from .ingestion import Dataset, PredictionSet, check_references
from .matching import match_greedy
from .ordinal_metrics import OrdinalConfusionMatrix, OrdinalScores, confusion, ordinal_scores

SCHEMA_VERSION = 1
ORDINAL_MATCHING = ("class-agnostic", "class-aware")


@dataclass(frozen=True)
class EvaluationConfig:
    iou_threshold: float = 0.5
    ordinal_matching: str = "class-agnostic"
    f1_threshold: Optional[float] = None  # None: search for max F1

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValueError(f"iou threshold must be in (0, 1], got {self.iou_threshold}")
        if self.ordinal_matching not in ORDINAL_MATCHING:
            raise ValueError(f"ordinal matching must be one of {ORDINAL_MATCHING}")
        if self.f1_threshold is not None and not 0.0 <= self.f1_threshold <= 1.0:
            raise ValueError(f"F1 threshold must be in [0, 1], got {self.f1_threshold}")

    def echo(self) -> dict:
        return {
            "iou_threshold": self.iou_threshold,
            "ordinal_matching": self.ordinal_matching,
            "f1": "max" if self.f1_threshold is None else f"fixed:{self.f1_threshold!r}",
            "ap_interpolation": "101-point",
            "ap_matching": "class-aware",
        }


@dataclass(frozen=True)
class EvaluationReport:
    detection: DetectionScores
    ordinal: OrdinalScores
    confusion: OrdinalConfusionMatrix
    config_echo: dict
    provenance: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def evaluate(
    dataset: Dataset,
    preds: PredictionSet,
    config: EvaluationConfig = EvaluationConfig(),
    threads: int = 1,
    provenance: Optional[dict] = None,
) -> EvaluationReport:
    if not dataset.ground_truth:
        raise EmptyGroundTruthError("dataset has no ground-truth instances")
    check_references(dataset, preds)

    aware = match_greedy(dataset, preds, config.iou_threshold, class_aware=True, threads=threads)
    if config.ordinal_matching == "class-aware":
        ordinal_matches = aware
    else:
        ordinal_matches = match_greedy(dataset, preds, config.iou_threshold, class_aware=False, threads=threads)

    detection = map_at_50(dataset, preds, config.iou_threshold, config.f1_threshold, matches=aware)
    counts = {
        "images": len(dataset.images),
        "ground_truth": len(dataset.ground_truth),
        "detections": len(preds.detections),
        "ground_truth_per_class": dict(zip(CLASS_NAMES, dataset.class_counts())),
    }
    prov = {"tool": "ordinaldet", "version": __version__}
    prov.update(provenance or {})
    return EvaluationReport(
        detection=detection,
        ordinal=ordinal_scores(ordinal_matches),
        confusion=confusion(ordinal_matches),
        config_echo=config.echo(),
        provenance=prov,
        counts=counts,
    )


def _num(x):
    if x is None:
        return None
    return float(f"{float(x):.12g}")


def _per_class(values) -> dict:
    return {name: _num(v) for name, v in zip(CLASS_NAMES, values)}


def report_document(report: EvaluationReport) -> dict:
    det, ordn, conf = report.detection, report.ordinal, report.confusion
    return {
        "schema_version": SCHEMA_VERSION,
        "config": report.config_echo,
        "provenance": report.provenance,
        "counts": report.counts,
        "detection": {
            "map50": _num(det.map50),
            "per_class_ap": _per_class(det.per_class_ap),
            "empty_classes": [CLASS_NAMES[k] for k in det.empty_classes],
            "precision": _num(det.precision),
            "recall": _num(det.recall),
            "f1": _num(det.f1),
            "f1_threshold": _num(det.f1_threshold),
            "f1_mode": det.f1_mode,
            "macro_f1": _num(det.macro_f1),
            "per_class_f1": _per_class(det.per_class_f1),
        },
        "ordinal": {
            "maoe": _num(ordn.maoe),
            "top_k_accuracy": {str(k): _num(v) for k, v in ordn.top_k_accuracy.items()},
            "matched_count": ordn.matched_count,
            "match_rate": _num(ordn.match_rate),
            "unmatched_detections": ordn.unmatched_detections,
            "unmatched_ground_truth": ordn.unmatched_ground_truth,
        },
        "confusion": {
            "labels": list(CLASS_NAMES),
            "counts": conf.counts.tolist(),
            "row_normalized": [[_num(v) for v in row] for row in conf.row_normalized.tolist()],
            "empty_rows": [CLASS_NAMES[k] for k in conf.empty_rows],
        },
    }


def render_report(report: EvaluationReport) -> bytes:
    return (json.dumps(report_document(report), indent=2, sort_keys=True) + "\n").encode("utf-8")
