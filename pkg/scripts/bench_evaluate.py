"""Time a full evaluation of 10,000 detections against 10,000 ground truths."""

import argparse
import time

import numpy as np

from ordinaldet.domain import BoundingBox, DamageState, Detection, GroundTruthInstance
from ordinaldet.ingestion import Dataset, ImageInfo, PredictionSet
from ordinaldet.report import evaluate, render_report


def build(n_images=1000, per_image=10, seed=0):
    rng = np.random.default_rng(seed)
    images, gts, dets = [], [], []
    for im in range(n_images):
        images.append(ImageInfo(im, f"{im}.jpg", 2000, 2000))
        for j in range(per_image):
            x, y = (j % 5) * 400 + 10, (j // 5) * 400 + 10
            gts.append(GroundTruthInstance(im, BoundingBox(x, y, 300, 300), DamageState(int(rng.integers(5))),
                                           im * per_image + j))
            box = BoundingBox(x + rng.uniform(-30, 30), y + rng.uniform(-30, 30), 300, 300)
            dets.append(Detection(im, box, float(rng.uniform()), DamageState(int(rng.integers(5)))))
    return Dataset(tuple(images), tuple(gts)), PredictionSet(tuple(dets))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    dataset, preds = build()
    times = []
    for _ in range(args.repeat):
        start = time.perf_counter()
        render_report(evaluate(dataset, preds, threads=args.threads))
        times.append(time.perf_counter() - start)
    print(f"{len(preds.detections)} detections, {len(dataset.ground_truth)} ground truths: "
          f"best {min(times):.3f}s, median {sorted(times)[len(times) // 2]:.3f}s")


if __name__ == "__main__":
    main()
