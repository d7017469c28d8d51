"""Small constructors for hand-written fixtures."""

from ordinaldet.domain import BoundingBox, DamageState, Detection, GroundTruthInstance
from ordinaldet.ingestion import Dataset, ImageInfo, PredictionSet


def gt(image_id, box, cls, instance_id):
    return GroundTruthInstance(image_id, BoundingBox(*box), DamageState(cls), instance_id)


def det(image_id, box, conf, cls, probs=None):
    return Detection(image_id, BoundingBox(*box), conf, DamageState(cls), probs)


def dataset(gts, image_ids=None):
    ids = sorted(set(image_ids or []) | {g.image_id for g in gts}) or [1]
    return Dataset(tuple(ImageInfo(i, f"{i}.jpg", 1000, 1000) for i in ids), tuple(gts))


def predictions(dets):
    return PredictionSet(tuple(dets))


def paired(pred_classes, true_classes):
    """One image per pair, detection box equal to the ground-truth box."""
    gts, dets = [], []
    for i, (p, t) in enumerate(zip(pred_classes, true_classes)):
        box = (10.0 * i, 0.0, 5.0, 5.0)
        gts.append(gt(i, box, t, i))
        dets.append(det(i, box, 0.9, p))
    return dataset(gts), predictions(dets)
