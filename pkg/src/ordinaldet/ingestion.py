"""Parsing and validation of ground-truth and prediction documents.

Ground truth follows the COCO annotation layout with categories fixed to
``DS0``..``DS4`` (ids 0..4).  Predictions follow the COCO results layout,
optionally extended with a ``probs`` array of five class scores.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from .domain import (
    CLASS_NAMES,
    NUM_CLASSES,
    BoundingBox,
    DamageState,
    Detection,
    GroundTruthInstance,
    InputError,
    argmax_lowest,
)

Source = Union[bytes, str]


class DocumentSyntaxError(InputError):
    kind = "syntax error"


class SchemaError(InputError):
    kind = "schema error"


class SemanticError(InputError):
    kind = "semantic error"


@dataclass(frozen=True)
class ImageInfo:
    image_id: int
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class Dataset:
    images: tuple[ImageInfo, ...]
    ground_truth: tuple[GroundTruthInstance, ...]
    class_names: tuple[str, ...] = CLASS_NAMES

    @property
    def image_ids(self) -> frozenset[int]:
        return frozenset(im.image_id for im in self.images)

    def class_counts(self) -> list[int]:
        counts = Counter(int(g.true_class) for g in self.ground_truth)
        return [counts.get(k, 0) for k in range(NUM_CLASSES)]


@dataclass(frozen=True)
class PredictionSet:
    detections: tuple[Detection, ...]

    def __len__(self) -> int:
        return len(self.detections)


def _load(source: Source) -> Any:
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(f"not valid UTF-8 ({exc.reason})") from None
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"{exc.msg} (line {exc.lineno}, column {exc.colno})") from None


def _require(obj: dict, key: str, kinds, path: str):
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        names = kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        raise SchemaError(f"{key!r} must be {names}, got {type(value).__name__}", f"{path}.{key}")
    return value


def _as_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", path)
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"expected an array, got {type(value).__name__}", path)
    return value


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {type(value).__name__}", path)
    if not math.isfinite(value):
        raise SemanticError(f"number must be finite, got {value!r}", path)
    return float(value)


def _box(value, path: str) -> BoundingBox:
    items = _as_list(value, path)
    if len(items) != 4:
        raise SchemaError(f"bbox must have 4 numbers, got {len(items)}", path)
    coords = [_real(v, f"{path}[{i}]") for i, v in enumerate(items)]
    try:
        return BoundingBox(*coords)
    except InputError as exc:
        raise SemanticError(exc.message, path) from None


def _category(value, path: str, what: str) -> DamageState:
    if not 0 <= value < NUM_CLASSES:
        raise SemanticError(f"unknown category id {value} for {what}", path)
    return DamageState(value)


def parse_ground_truth(source: Source) -> Dataset:
    doc = _as_object(_load(source), "$")

    categories = _require(doc, "categories", list, "$")
    seen_categories: dict[int, str] = {}
    for i, cat in enumerate(categories):
        path = f"$.categories[{i}]"
        cat = _as_object(cat, path)
        cid = _require(cat, "id", int, path)
        name = _require(cat, "name", str, path)
        if not 0 <= cid < NUM_CLASSES:
            raise SemanticError(f"unknown category id {cid}", f"{path}.id")
        if cid in seen_categories:
            raise SemanticError(f"duplicate category id {cid}", f"{path}.id")
        if name != CLASS_NAMES[cid]:
            raise SemanticError(f"category {cid} must be named {CLASS_NAMES[cid]!r}, got {name!r}", f"{path}.name")
        seen_categories[cid] = name
    if set(seen_categories) != set(range(NUM_CLASSES)):
        missing = sorted(set(range(NUM_CLASSES)) - set(seen_categories))
        raise SemanticError(f"categories must cover ids 0..4, missing {missing}", "$.categories")

    images = []
    image_ids: set[int] = set()
    for i, im in enumerate(_require(doc, "images", list, "$")):
        path = f"$.images[{i}]"
        im = _as_object(im, path)
        image_id = _require(im, "id", int, path)
        file_name = _require(im, "file_name", str, path)
        width = _require(im, "width", int, path)
        height = _require(im, "height", int, path)
        if width <= 0 or height <= 0:
            raise SemanticError(f"image size must be positive, got {width}x{height}", path)
        if image_id in image_ids:
            raise SemanticError(f"duplicate image id {image_id}", f"{path}.id")
        image_ids.add(image_id)
        images.append(ImageInfo(image_id, file_name, width, height))

    ground_truth = []
    instance_ids: set[int] = set()
    for i, ann in enumerate(_require(doc, "annotations", list, "$")):
        path = f"$.annotations[{i}]"
        ann = _as_object(ann, path)
        ann_id = _require(ann, "id", int, path)
        what = f"annotation id {ann_id}"
        image_id = _require(ann, "image_id", int, path)
        box = _box(_require(ann, "bbox", list, path), f"{path}.bbox")
        category = _category(_require(ann, "category_id", int, path), f"{path}.category_id", what)
        if image_id not in image_ids:
            raise SemanticError(f"{what} references unknown image id {image_id}", f"{path}.image_id")
        if ann_id in instance_ids:
            raise SemanticError(f"duplicate annotation id {ann_id}", f"{path}.id")
        instance_ids.add(ann_id)
        ground_truth.append(GroundTruthInstance(image_id, box, category, ann_id))

    return Dataset(tuple(images), tuple(ground_truth))


def parse_predictions(source: Source) -> PredictionSet:
    doc = _as_list(_load(source), "$")
    detections = []
    for i, rec in enumerate(doc):
        path = f"$[{i}]"
        rec = _as_object(rec, path)
        image_id = _require(rec, "image_id", int, path)
        box = _box(_require(rec, "bbox", list, path), f"{path}.bbox")
        score = _real(_require(rec, "score", (int, float), path), f"{path}.score")
        if not 0.0 <= score <= 1.0:
            raise SemanticError(f"score {score!r} outside [0, 1]", f"{path}.score")
        category = _category(_require(rec, "category_id", int, path), f"{path}.category_id", f"record {i}")

        probs = None
        if rec.get("probs") is not None:
            raw = _as_list(rec["probs"], f"{path}.probs")
            if len(raw) != NUM_CLASSES:
                raise SemanticError(f"probs must have {NUM_CLASSES} entries, got {len(raw)}", f"{path}.probs")
            probs = tuple(_real(p, f"{path}.probs[{k}]") for k, p in enumerate(raw))
            for k, p in enumerate(probs):
                if not 0.0 <= p <= 1.0:
                    raise SemanticError(f"probability {p!r} outside [0, 1]", f"{path}.probs[{k}]")
            best = argmax_lowest(probs)
            if best != category:
                raise SemanticError(
                    f"category_id {int(category)} disagrees with argmax(probs) = {int(best)}",
                    f"{path}.category_id",
                )
            category = best
        detections.append(Detection(image_id, box, score, category, probs))
    return PredictionSet(tuple(detections))


def check_references(dataset: Dataset, preds: PredictionSet) -> None:
    """Raise if any detection points at an image absent from the dataset."""
    known = dataset.image_ids
    for i, det in enumerate(preds.detections):
        if det.image_id not in known:
            raise SemanticError(f"record {i} references unknown image id {det.image_id}", f"$[{i}].image_id")


def ground_truth_document(dataset: Dataset) -> dict:
    return {
        "images": [
            {"id": im.image_id, "file_name": im.file_name, "width": im.width, "height": im.height}
            for im in dataset.images
        ],
        "annotations": [
            {"id": g.instance_id, "image_id": g.image_id, "bbox": g.box.to_list(), "category_id": int(g.true_class)}
            for g in dataset.ground_truth
        ],
        "categories": [{"id": k, "name": name} for k, name in enumerate(CLASS_NAMES)],
    }


def prediction_document(preds: PredictionSet) -> list:
    out = []
    for det in preds.detections:
        rec = {
            "image_id": det.image_id,
            "bbox": det.box.to_list(),
            "score": det.confidence,
            "category_id": int(det.predicted_class),
        }
        if det.class_probs is not None:
            rec["probs"] = list(det.class_probs)
        out.append(rec)
    return out


def dumps(doc) -> bytes:
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode("utf-8")


def serialize_ground_truth(dataset: Dataset) -> bytes:
    return dumps(ground_truth_document(dataset))


def serialize_predictions(preds: PredictionSet) -> bytes:
    return dumps(prediction_document(preds))


def load_ground_truth(path: Union[str, Path]) -> Dataset:
    return parse_ground_truth(Path(path).read_bytes())


def load_predictions(path: Union[str, Path]) -> PredictionSet:
    return parse_predictions(Path(path).read_bytes())


def dataset_stats(dataset: Dataset) -> dict:
    """Per-class instance counts and box-size summary."""
    widths = np.array([g.box.w for g in dataset.ground_truth])
    heights = np.array([g.box.h for g in dataset.ground_truth])

    def summary(values: np.ndarray) -> dict:
        if values.size == 0:
            return {"min": None, "median": None, "mean": None, "max": None}
        return {
            "min": float(values.min()),
            "median": float(np.median(values)),
            "mean": float(values.mean()),
            "max": float(values.max()),
        }

    counts = dataset.class_counts()
    return {
        "images": len(dataset.images),
        "instances": len(dataset.ground_truth),
        "per_class": {name: counts[k] for k, name in enumerate(CLASS_NAMES)},
        "box_width": summary(widths),
        "box_height": summary(heights),
    }
