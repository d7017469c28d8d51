"""Seeded synthetic ground-truth/prediction pairs for known metric behaviour.

Scenarios:

perfect
    every instance detected with its exact box and class at confidence 1.
off-by-one
    exact boxes, every class shifted one level (DS4 goes down to DS3).
collapse
    ground truth skewed toward DS0-DS2 and predictions confined to
    DS0-DS2, so severe classes are never predicted.
random
    jittered boxes, uniformly random classes, misses and false positives.
"""

from __future__ import annotations

import numpy as np

from .domain import NUM_CLASSES, BoundingBox, DamageState, Detection, GroundTruthInstance, argmax_lowest
from .ingestion import Dataset, ImageInfo, PredictionSet

SCENARIOS = ("perfect", "off-by-one", "collapse", "random")
IMAGE_W, IMAGE_H = 1280, 720
GRID_COLS, GRID_ROWS = 3, 2
COLLAPSE_CLASS_FREQ = (0.38, 0.30, 0.20, 0.09, 0.03)


def _layout(rng: np.random.Generator, n_images: int, class_freq=None):
    cell_w, cell_h = IMAGE_W // GRID_COLS, IMAGE_H // GRID_ROWS
    images, gts = [], []
    next_id = 1
    for image_id in range(1, n_images + 1):
        images.append(ImageInfo(image_id, f"synth_{image_id:05d}.jpg", IMAGE_W, IMAGE_H))
        n = int(rng.integers(1, GRID_COLS * GRID_ROWS + 1))
        cells = rng.permutation(GRID_COLS * GRID_ROWS)[:n]
        for cell in sorted(cells.tolist()):
            cx, cy = (cell % GRID_COLS) * cell_w, (cell // GRID_COLS) * cell_h
            w = round(float(rng.uniform(0.4, 0.9) * cell_w), 2)
            h = round(float(rng.uniform(0.4, 0.9) * cell_h), 2)
            x = round(cx + float(rng.uniform(0, cell_w - w)), 2)
            y = round(cy + float(rng.uniform(0, cell_h - h)), 2)
            if class_freq is None:
                cls = int(rng.integers(0, NUM_CLASSES))
            else:
                cls = int(rng.choice(NUM_CLASSES, p=class_freq))
            gts.append(GroundTruthInstance(image_id, BoundingBox(x, y, w, h), DamageState(cls), next_id))
            next_id += 1
    return images, gts


def _jitter(rng, box: BoundingBox, amount: float) -> BoundingBox:
    dx, dy, dw, dh = rng.uniform(-amount, amount, size=4)
    w = round(box.w * (1 + dw), 2)
    h = round(box.h * (1 + dh), 2)
    return BoundingBox(round(box.x + dx * box.w, 2), round(box.y + dy * box.h, 2), w, h)


def _probs(rng, cls: int) -> tuple[float, ...]:
    logits = rng.normal(0.0, 1.0, size=NUM_CLASSES)
    others = np.delete(logits, cls)
    logits[cls] = others.max() + rng.uniform(0.5, 3.0)
    e = np.exp(logits - logits.max())
    probs = tuple(round(float(v), 6) for v in e / e.sum())
    assert argmax_lowest(probs) == cls
    return probs


def _det(rng, image_id, box, cls, score) -> Detection:
    return Detection(image_id, box, round(float(score), 6), DamageState(cls), _probs(rng, cls))


def _collapse_class(rng, true_class: int) -> int:
    if true_class >= 3:
        return 2
    if rng.random() < 0.75:
        return true_class
    neighbours = [k for k in (true_class - 1, true_class + 1) if 0 <= k <= 2]
    return int(rng.choice(neighbours))


def generate(scenario: str, seed: int = 42, n_images: int = 100) -> tuple[Dataset, PredictionSet]:
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}, expected one of {SCENARIOS}")
    rng = np.random.default_rng(seed)
    freq = COLLAPSE_CLASS_FREQ if scenario == "collapse" else None
    images, gts = _layout(rng, n_images, freq)

    dets: list[Detection] = []
    if scenario == "perfect":
        for g in gts:
            one_hot = tuple(1.0 if k == g.true_class else 0.0 for k in range(NUM_CLASSES))
            dets.append(Detection(g.image_id, g.box, 1.0, g.true_class, one_hot))
    elif scenario == "off-by-one":
        for g in gts:
            cls = int(g.true_class) + 1 if g.true_class < 4 else 3
            dets.append(_det(rng, g.image_id, g.box, cls, rng.uniform(0.5, 1.0)))
    elif scenario == "collapse":
        for g in gts:
            if rng.random() < 0.1:
                continue
            box = _jitter(rng, g.box, 0.04)
            dets.append(_det(rng, g.image_id, box, _collapse_class(rng, int(g.true_class)), rng.uniform(0.3, 1.0)))
        for im in images:
            if rng.random() < 0.1:
                box = BoundingBox(round(float(rng.uniform(0, 600)), 2), round(float(rng.uniform(0, 300)), 2), 80.0, 80.0)
                dets.append(_det(rng, im.image_id, box, int(rng.integers(0, 3)), rng.uniform(0.05, 0.4)))
    else:
        for g in gts:
            if rng.random() < 0.15:
                continue
            box = _jitter(rng, g.box, 0.15)
            dets.append(_det(rng, g.image_id, box, int(rng.integers(0, NUM_CLASSES)), rng.uniform(0.05, 1.0)))
        for im in images:
            for _ in range(int(rng.integers(0, 3))):
                box = BoundingBox(round(float(rng.uniform(0, 1000)), 2), round(float(rng.uniform(0, 500)), 2),
                                  round(float(rng.uniform(40, 250)), 2), round(float(rng.uniform(40, 200)), 2))
                dets.append(_det(rng, im.image_id, box, int(rng.integers(0, NUM_CLASSES)), rng.uniform(0.0, 1.0)))

    return Dataset(tuple(images), tuple(gts)), PredictionSet(tuple(dets))
