"""Greedy, confidence-ordered IoU matching of detections to ground truth."""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .domain import DamageState, corners_array, iou_matrix
from .ingestion import Dataset, PredictionSet, SemanticError


@dataclass(frozen=True)
class MatchedPair:
    detection: int  # index into PredictionSet.detections
    ground_truth: int  # index into Dataset.ground_truth
    iou: float
    predicted_class: DamageState
    true_class: DamageState


@dataclass(frozen=True)
class MatchResult:
    matched: tuple[MatchedPair, ...]
    unmatched_detections: tuple[int, ...]
    unmatched_ground_truth: tuple[int, ...]
    iou_threshold: float
    class_aware: bool

    @property
    def matched_count(self) -> int:
        return len(self.matched)

    def gaps(self) -> np.ndarray:
        """Absolute ordinal distance for each matched pair."""
        return np.array(
            [abs(int(m.predicted_class) - int(m.true_class)) for m in self.matched], dtype=np.int64
        )


def _match_image(gt_idx, det_idx, dataset, preds, iou_threshold, class_aware):
    gts = sorted(gt_idx, key=lambda i: dataset.ground_truth[i].instance_id)
    # stable sort keeps input order among equal confidences
    dets = sorted(det_idx, key=lambda i: -preds.detections[i].confidence)
    if not gts or not dets:
        return [], dets, gts

    gt_objs = [dataset.ground_truth[i] for i in gts]
    det_objs = [preds.detections[i] for i in dets]
    ious = iou_matrix(
        corners_array([d.box for d in det_objs]), corners_array([g.box for g in gt_objs])
    ).tolist()
    gt_classes = [g.true_class for g in gt_objs]

    taken = [False] * len(gts)
    matched, unmatched_dets = [], []
    for row, det, di in zip(ious, det_objs, dets):
        best, best_iou = -1, -1.0
        for j, value in enumerate(row):
            if taken[j] or value < iou_threshold or value <= best_iou:
                continue
            if class_aware and gt_classes[j] != det.predicted_class:
                continue
            best, best_iou = j, value
        if best < 0:
            unmatched_dets.append(di)
        else:
            taken[best] = True
            matched.append(MatchedPair(di, gts[best], best_iou, det.predicted_class, gt_classes[best]))
    unmatched_gts = [gi for gi, t in zip(gts, taken) if not t]
    return matched, unmatched_dets, unmatched_gts


def match_greedy(
    dataset: Dataset,
    preds: PredictionSet,
    iou_threshold: float = 0.5,
    class_aware: bool = False,
    threads: int = 1,
) -> MatchResult:
    """Match detections to ground truth image by image.

    Within an image detections are visited by descending confidence (input
    order breaks ties); each takes the still-free ground truth with the
    highest IoU at or above ``iou_threshold``, preferring the lowest
    instance id on IoU ties. With ``class_aware`` only ground truths of the
    detection's predicted class are eligible.

    Images are processed independently and merged in ascending image id, so
    the result does not depend on ``threads``.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")

    known = dataset.image_ids
    gt_by_image: dict[int, list[int]] = defaultdict(list)
    det_by_image: dict[int, list[int]] = defaultdict(list)
    for i, g in enumerate(dataset.ground_truth):
        gt_by_image[g.image_id].append(i)
    for i, d in enumerate(preds.detections):
        if d.image_id not in known:
            raise SemanticError(f"detection {i} references unknown image id {d.image_id}", f"$[{i}].image_id")
        det_by_image[d.image_id].append(i)

    image_ids = sorted(set(gt_by_image) | set(det_by_image))

    def work(image_id):
        return _match_image(
            gt_by_image.get(image_id, ()), det_by_image.get(image_id, ()),
            dataset, preds, iou_threshold, class_aware,
        )

    if threads > 1 and len(image_ids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, image_ids))
    else:
        parts = [work(image_id) for image_id in image_ids]

    matched, unmatched_dets, unmatched_gts = [], [], []
    for m, ud, ug in parts:
        matched.extend(m)
        unmatched_dets.extend(ud)
        unmatched_gts.extend(ug)
    return MatchResult(tuple(matched), tuple(unmatched_dets), tuple(unmatched_gts), iou_threshold, class_aware)
