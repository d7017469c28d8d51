"""Core value types: boxes, damage states, ground truth and detections."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

NUM_CLASSES = 5
CLASS_NAMES = ("DS0", "DS1", "DS2", "DS3", "DS4")


class InputError(ValueError):
    """Invalid input, carrying a path to the offending element."""

    kind = "invalid input"

    def __init__(self, message: str, path: str = ""):
        self.path = path
        self.message = message
        super().__init__(f"{self.kind} at {path}: {message}" if path else f"{self.kind}: {message}")


class DamageState(enum.IntEnum):
    DS0 = 0  # undamaged
    DS1 = 1  # slight
    DS2 = 2  # moderate
    DS3 = 3  # extensive
    DS4 = 4  # complete

    @property
    def label(self) -> str:
        return CLASS_NAMES[self]


def as_damage_state(value) -> DamageState:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InputError(f"class index must be an integer, got {value!r}")
    if not 0 <= value < NUM_CLASSES:
        raise InputError(f"class index {value} outside 0..{NUM_CLASSES - 1}")
    return DamageState(int(value))


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, COCO ``[x, y, w, h]`` order."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InputError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InputError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.w <= 0 or self.h <= 0:
            raise InputError(f"box size must be positive, got w={self.w}, h={self.h}")

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "BoundingBox":
        if len(values) != 4:
            raise InputError(f"bbox needs 4 numbers, got {len(values)}")
        return cls(*values)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]

    def corners(self) -> tuple[float, float, float, float]:
        return self.x, self.y, self.x + self.w, self.y + self.h


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes.

    Areas are taken from the corner coordinates, the same way the
    vectorised :func:`iou_matrix` does, so identical boxes give exactly 1.
    """
    ax1, ay1, ax2, ay2 = a.corners()
    bx1, by1, bx2, by2 = b.corners()
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return min(1.0, inter / union)


def corners_array(boxes: Sequence[BoundingBox]) -> np.ndarray:
    if not boxes:
        return np.zeros((0, 4))
    return np.array([b.corners() for b in boxes], dtype=np.float64)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between corner arrays of shape (n, 4) and (m, 4)."""
    ix1 = np.maximum(a[:, None, 0], b[None, :, 0])
    iy1 = np.maximum(a[:, None, 1], b[None, :, 1])
    ix2 = np.minimum(a[:, None, 2], b[None, :, 2])
    iy2 = np.minimum(a[:, None, 3], b[None, :, 3])
    iw = ix2 - ix1
    ih = iy2 - iy1
    overlap = (iw > 0) & (ih > 0)
    inter = np.where(overlap, iw * ih, 0.0)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return np.minimum(1.0, inter / union)


def argmax_lowest(probs: Sequence[float]) -> DamageState:
    """Index of the largest value; ties go to the lower (less severe) class."""
    best = 0
    for k in range(1, len(probs)):
        if probs[k] > probs[best]:
            best = k
    return DamageState(best)


@dataclass(frozen=True)
class GroundTruthInstance:
    image_id: int
    box: BoundingBox
    true_class: DamageState
    instance_id: int


@dataclass(frozen=True)
class Detection:
    image_id: int
    box: BoundingBox
    confidence: float
    predicted_class: DamageState
    class_probs: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise InputError(f"confidence {self.confidence!r} outside [0, 1]")
        if self.class_probs is not None:
            probs = tuple(float(p) for p in self.class_probs)
            if len(probs) != NUM_CLASSES:
                raise InputError(f"probs must have {NUM_CLASSES} entries, got {len(probs)}")
            for k, p in enumerate(probs):
                if not (0.0 <= p <= 1.0):
                    raise InputError(f"probs[{k}] = {p!r} outside [0, 1]")
            object.__setattr__(self, "class_probs", probs)
            if argmax_lowest(probs) != self.predicted_class:
                raise InputError(
                    f"predicted class {int(self.predicted_class)} disagrees with "
                    f"argmax(probs) = {int(argmax_lowest(probs))}"
                )
